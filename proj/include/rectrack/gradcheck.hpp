#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "rectrack/nn.hpp"

namespace rectrack {

// Central finite-difference verification of analytic gradients. The caller
// runs its backward pass first (filling Param::grad), then hands over a
// forward-only loss closure; check_gradients perturbs each weight in turn and
// compares (L(w+h) - L(w-h)) / 2h against the stored gradient. The closure
// must not touch any gradient state.
struct GradCheckReport {
  std::size_t checked = 0;
  std::size_t failed = 0;
  double max_rel_error = 0.0;
  bool ok() const { return failed == 0; }
};

GradCheckReport check_gradients(std::span<Param* const> params,
                                const std::function<double()>& loss_fn, double fd_step = 1e-5,
                                double rel_tol = 1e-4, double abs_floor = 1e-8);

}  // namespace rectrack
