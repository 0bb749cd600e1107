#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rectrack/matrix.hpp"
#include "rectrack/nn.hpp"

namespace rectrack {

// Versioned binary model container. Layout (all integers and doubles little
// endian, no padding):
//   byte[8]  magic "RTCKPT01"
//   u32      model kind (1 = motion net, 2 = association net, 0 = generic)
//   u64      training iteration counter
//   u32      n_dims, then n_dims x u32 structural sizes (meaning per kind)
//   u32      n_params, then per param: u32 rows, u32 cols, rows*cols f64
// Doubles are serialized via their IEEE-754 bit pattern, so files are
// byte-stable across platforms.
struct Checkpoint {
  std::uint32_t kind = 0;
  std::uint64_t iteration = 0;
  std::vector<std::uint32_t> dims;
  std::vector<Matrix> matrices;
};

inline constexpr std::uint32_t kCheckpointMotion = 1;
inline constexpr std::uint32_t kCheckpointAssoc = 2;

void save_checkpoint(const std::string& path, std::uint32_t kind, std::uint64_t iteration,
                     const std::vector<std::uint32_t>& dims,
                     const std::vector<const Param*>& params);
Checkpoint load_checkpoint(const std::string& path);

// Copies checkpoint matrices into params; shapes must match exactly.
void restore_params(const Checkpoint& ckpt, const std::vector<Param*>& params);

}  // namespace rectrack
