#include "rectrack/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace rectrack {

namespace {

constexpr char kMagic[8] = {'R', 'T', 'C', 'K', 'P', 'T', '0', '1'};

void put_u32(std::ostream& os, std::uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
  os.write(reinterpret_cast<const char*>(b), 4);
}

void put_u64(std::ostream& os, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
  os.write(reinterpret_cast<const char*>(b), 8);
}

void put_f64(std::ostream& os, double v) { put_u64(os, std::bit_cast<std::uint64_t>(v)); }

std::uint32_t get_u32(std::istream& is) {
  unsigned char b[4];
  is.read(reinterpret_cast<char*>(b), 4);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return v;
}

std::uint64_t get_u64(std::istream& is) {
  unsigned char b[8];
  is.read(reinterpret_cast<char*>(b), 8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

double get_f64(std::istream& is) { return std::bit_cast<double>(get_u64(is)); }

}  // namespace

void save_checkpoint(const std::string& path, std::uint32_t kind, std::uint64_t iteration,
                     const std::vector<std::uint32_t>& dims,
                     const std::vector<const Param*>& params) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open checkpoint for writing: " + path);
  os.write(kMagic, 8);
  put_u32(os, kind);
  put_u64(os, iteration);
  put_u32(os, static_cast<std::uint32_t>(dims.size()));
  for (std::uint32_t d : dims) put_u32(os, d);
  put_u32(os, static_cast<std::uint32_t>(params.size()));
  for (const Param* p : params) {
    put_u32(os, static_cast<std::uint32_t>(p->value.rows));
    put_u32(os, static_cast<std::uint32_t>(p->value.cols));
    for (double v : p->value.data) put_f64(os, v);
  }
  if (!os) throw std::runtime_error("checkpoint write failed: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open checkpoint: " + path);
  char magic[8];
  is.read(magic, 8);
  if (!is || std::memcmp(magic, kMagic, 8) != 0)
    throw std::runtime_error("not a checkpoint file (bad magic): " + path);
  Checkpoint ckpt;
  ckpt.kind = get_u32(is);
  ckpt.iteration = get_u64(is);
  std::uint32_t n_dims = get_u32(is);
  ckpt.dims.resize(n_dims);
  for (auto& d : ckpt.dims) d = get_u32(is);
  std::uint32_t n_params = get_u32(is);
  ckpt.matrices.reserve(n_params);
  for (std::uint32_t p = 0; p < n_params; ++p) {
    std::uint32_t rows = get_u32(is);
    std::uint32_t cols = get_u32(is);
    Matrix m(static_cast<int>(rows), static_cast<int>(cols));
    for (double& v : m.data) v = get_f64(is);
    ckpt.matrices.push_back(std::move(m));
  }
  if (!is) throw std::runtime_error("truncated checkpoint: " + path);
  return ckpt;
}

void restore_params(const Checkpoint& ckpt, const std::vector<Param*>& params) {
  if (ckpt.matrices.size() != params.size())
    throw std::runtime_error("checkpoint param count mismatch");
  for (std::size_t k = 0; k < params.size(); ++k) {
    if (!params[k]->value.same_shape(ckpt.matrices[k]))
      throw std::runtime_error("checkpoint param shape mismatch at index " + std::to_string(k));
    params[k]->value = ckpt.matrices[k];
    params[k]->grad.zero();
    params[k]->rms_cache.zero();
  }
}

}  // namespace rectrack
