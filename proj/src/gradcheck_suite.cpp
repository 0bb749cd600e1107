#include "rectrack/gradcheck_suite.hpp"

#include <chrono>
#include <cstddef>
#include <vector>

#include "rectrack/assoc.hpp"
#include "rectrack/motion.hpp"
#include "rectrack/nn.hpp"
#include "rectrack/rng.hpp"

namespace rectrack {
namespace {

Vec random_vec(Rng& rng, int n, double lo, double hi) {
  Vec v(n);
  for (double& x : v) x = rng.uniform(lo, hi);
  return v;
}

void merge(GradCheckReport& into, const GradCheckReport& r) {
  into.checked += r.checked;
  into.failed += r.failed;
  if (r.max_rel_error > into.max_rel_error) into.max_rel_error = r.max_rel_error;
}

double sequence_mse(const std::vector<Vec>& outputs, const std::vector<Vec>& targets) {
  double loss = 0.0;
  const std::size_t T = outputs.size();
  const std::size_t d = outputs.front().size();
  for (std::size_t t = 0; t < T; ++t)
    for (std::size_t k = 0; k < d; ++k) {
      double diff = outputs[t][k] - targets[t][k];
      loss += diff * diff;
    }
  return loss / (static_cast<double>(T) * static_cast<double>(d));
}

GradCheckReport check_rnn(int instances, std::uint64_t seed, double fd_step, double rel_tol) {
  GradCheckReport total;
  for (int i = 0; i < instances; ++i) {
    Rng rng(Rng::split(seed, static_cast<std::uint64_t>(i)));
    std::vector<int> sizes(rng.uniform_int(1, 2));
    for (int& s : sizes) s = static_cast<int>(rng.uniform_int(3, 8));
    const int in_dim = static_cast<int>(rng.uniform_int(2, 4));
    const int out_dim = static_cast<int>(rng.uniform_int(1, 3));
    const int T = static_cast<int>(rng.uniform_int(1, 10));

    RnnRegressor net(sizes, in_dim, out_dim);
    net.init(rng, 0.3);
    std::vector<Vec> inputs(T), targets(T);
    for (int t = 0; t < T; ++t) {
      inputs[t] = random_vec(rng, in_dim, -1.0, 1.0);
      targets[t] = random_vec(rng, out_dim, -1.0, 1.0);
    }

    auto params = net.params();
    zero_grads(params);
    net.bptt_gradients(inputs, targets);
    merge(total, check_gradients(
                     params, [&] { return sequence_mse(net.forward(inputs), targets); },
                     fd_step, rel_tol));
  }
  return total;
}

GradCheckReport check_lstm(int instances, std::uint64_t seed, double fd_step, double rel_tol) {
  GradCheckReport total;
  for (int i = 0; i < instances; ++i) {
    Rng rng(Rng::split(seed, static_cast<std::uint64_t>(i)));
    const int layers = static_cast<int>(rng.uniform_int(1, 2));
    const int hidden = static_cast<int>(rng.uniform_int(3, 6));
    const int in_dim = static_cast<int>(rng.uniform_int(2, 4));
    const int out_dim = static_cast<int>(rng.uniform_int(1, 3));
    const int T = static_cast<int>(rng.uniform_int(1, 10));

    LstmRegressor net(layers, hidden, in_dim, out_dim);
    net.init(rng, 0.3);
    std::vector<Vec> inputs(T), targets(T);
    for (int t = 0; t < T; ++t) {
      inputs[t] = random_vec(rng, in_dim, -1.0, 1.0);
      targets[t] = random_vec(rng, out_dim, -1.0, 1.0);
    }

    auto params = net.params();
    zero_grads(params);
    net.bptt_gradients(inputs, targets);
    merge(total, check_gradients(
                     params, [&] { return sequence_mse(net.forward(inputs), targets); },
                     fd_step, rel_tol));
  }
  return total;
}

MotionInstance random_motion_instance(Rng& rng, int capacity) {
  MotionInstance inst;
  const int T = static_cast<int>(rng.uniform_int(2, 5));
  const int alive_until = static_cast<int>(rng.uniform_int(1, T));  // steps with gt presence

  TargetState gt{rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3), rng.uniform(0.05, 0.2),
                 rng.uniform(0.05, 0.2)};
  inst.x0 = {gt.x, gt.y, gt.w, gt.h};
  for (int t = 0; t < T; ++t) {
    gt.x += rng.normal(0.0, 0.02);
    gt.y += rng.normal(0.0, 0.02);
    MeasurementFrame frame(capacity);
    std::vector<int> open;
    for (int j = 0; j < capacity; ++j) {
      if (rng.uniform01() < 0.7) {
        frame.occupied[j] = 1;
        frame.slots[j] = {gt.x + rng.normal(0.0, 0.01), gt.y + rng.normal(0.0, 0.01),
                          gt.w + rng.normal(0.0, 0.005), gt.h + rng.normal(0.0, 0.005)};
        open.push_back(j);
      }
    }
    Vec a(capacity + 1, 0.0);
    if (rng.uniform01() < 0.3 && !open.empty()) {
      // Soft row over the occupied slots plus miss.
      double total = 0.0;
      for (int j : open) total += (a[j] = rng.uniform(0.1, 1.0));
      total += (a[capacity] = rng.uniform(0.1, 1.0));
      for (double& x : a) x /= total;
    } else {
      long pick = rng.uniform_int(0, static_cast<long>(open.size()));
      a[pick == static_cast<long>(open.size()) ? capacity : open[pick]] = 1.0;
    }
    inst.frames.push_back(std::move(frame));
    inst.a_rows.push_back(std::move(a));
    inst.gt_states.push_back(gt);
    inst.gt_existence.push_back(t < alive_until ? 1.0 : 0.0);
  }
  return inst;
}

GradCheckReport check_motion(int instances, std::uint64_t seed, double fd_step, double rel_tol) {
  GradCheckReport total;
  const LossWeights w;  // all four terms active (xi = 0.1)
  for (int i = 0; i < instances; ++i) {
    Rng rng(Rng::split(seed, static_cast<std::uint64_t>(i)));
    MotionNet net(static_cast<int>(rng.uniform_int(5, 8)),
                  static_cast<int>(rng.uniform_int(4, 7)));
    net.init(rng, 0.3);
    MotionInstance inst = random_motion_instance(rng, static_cast<int>(rng.uniform_int(1, 3)));

    auto params = net.params();
    zero_grads(params);
    motion_backward(net, inst, w);
    merge(total, check_gradients(
                     params, [&] { return motion_forward(net, inst, w); }, fd_step, rel_tol));
  }
  return total;
}

GradCheckReport check_assoc(int instances, std::uint64_t seed, double fd_step, double rel_tol) {
  GradCheckReport total;
  for (int i = 0; i < instances; ++i) {
    Rng rng(Rng::split(seed, static_cast<std::uint64_t>(i)));
    AssocConfig cfg;
    cfg.n_max = static_cast<int>(rng.uniform_int(2, 3));
    cfg.m_max = static_cast<int>(rng.uniform_int(2, 3));
    cfg.embed = static_cast<int>(rng.uniform_int(4, 6));
    cfg.hidden = static_cast<int>(rng.uniform_int(4, 6));
    cfg.layers = static_cast<int>(rng.uniform_int(1, 2));
    AssocNet net(cfg);
    net.init(rng, 0.3);

    AssocInstance inst;
    const int n = static_cast<int>(rng.uniform_int(1, cfg.n_max));
    const int m = static_cast<int>(rng.uniform_int(1, cfg.m_max));
    inst.cost = CostMatrix(n, m);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < m; ++c) inst.cost.at(r, c) = rng.uniform(0.0, 1.0);
    for (int r = 0; r < n; ++r) {
      long lbl = rng.uniform_int(0, m);
      inst.labels.push_back(lbl == m ? kMiss : static_cast<int>(lbl));
    }

    auto params = net.params();
    zero_grads(params);
    assoc_backward(net, inst);
    merge(total, check_gradients(
                     params, [&] { return assoc_sequence_loss(net, inst); }, fd_step, rel_tol));
  }
  return total;
}

}  // namespace

GradSuiteResult run_gradcheck_suite(int instances, std::uint64_t seed, double fd_step,
                                    double rel_tol) {
  const auto start = std::chrono::steady_clock::now();
  GradSuiteResult out;
  out.cases.push_back({"rnn_bptt", check_rnn(instances, Rng::split(seed, 101), fd_step, rel_tol)});
  out.cases.push_back(
      {"lstm_bptt", check_lstm(instances, Rng::split(seed, 102), fd_step, rel_tol)});
  out.cases.push_back(
      {"motion_loss", check_motion(instances, Rng::split(seed, 103), fd_step, rel_tol)});
  out.cases.push_back(
      {"da_loss", check_assoc(instances, Rng::split(seed, 104), fd_step, rel_tol)});
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

}  // namespace rectrack
