#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rectrack/gradcheck.hpp"

namespace rectrack {

struct GradSuiteCase {
  std::string name;
  GradCheckReport report;
};

struct GradSuiteResult {
  std::vector<GradSuiteCase> cases;
  double seconds = 0.0;

  bool ok() const {
    for (const auto& c : cases)
      if (!c.report.ok()) return false;
    return true;
  }
};

// Finite-difference verification across the four differentiable pieces: RNN
// backpropagation through time, the LSTM stack, the motion-model window loss
// (all four terms active), and the association sequence loss. Each case runs
// `instances` independently sampled small networks and inputs.
GradSuiteResult run_gradcheck_suite(int instances = 50, std::uint64_t seed = 1,
                                    double fd_step = 1e-5, double rel_tol = 1e-4);

}  // namespace rectrack
