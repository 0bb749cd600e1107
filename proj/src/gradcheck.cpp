#include "rectrack/gradcheck.hpp"

#include <algorithm>
#include <cmath>

namespace rectrack {

GradCheckReport check_gradients(std::span<Param* const> params,
                                const std::function<double()>& loss_fn, double fd_step,
                                double rel_tol, double abs_floor) {
  GradCheckReport report;
  for (Param* p : params) {
    for (std::size_t k = 0; k < p->value.data.size(); ++k) {
      double saved = p->value.data[k];
      p->value.data[k] = saved + fd_step;
      double lp = loss_fn();
      p->value.data[k] = saved - fd_step;
      double lm = loss_fn();
      p->value.data[k] = saved;
      double numeric = (lp - lm) / (2.0 * fd_step);
      double analytic = p->grad.data[k];
      double diff = std::abs(analytic - numeric);
      double scale = std::max(std::abs(analytic), std::abs(numeric));
      double rel = scale > 0.0 ? diff / scale : 0.0;
      ++report.checked;
      if (diff > abs_floor && rel > rel_tol) {
        ++report.failed;
        report.max_rel_error = std::max(report.max_rel_error, rel);
      } else if (diff > abs_floor) {
        report.max_rel_error = std::max(report.max_rel_error, rel);
      }
    }
  }
  return report;
}

}  // namespace rectrack
