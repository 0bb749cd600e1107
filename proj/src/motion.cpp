#include "rectrack/motion.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rectrack/error.hpp"

namespace rectrack {

namespace {

constexpr double kBceEps = 1e-7;
constexpr double kExistClamp = 1e-12;

double clamp01(double v, double eps) { return std::clamp(v, eps, 1.0 - eps); }

double bce_grad(double e, double e_gt) {
  if (e <= kBceEps || e >= 1.0 - kBceEps) return 0.0;
  return -(e_gt / e) + (1.0 - e_gt) / (1.0 - e);
}

double sgn(double v) { return (v > 0.0) ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

double existence_from_logit(double logit) { return clamp01(sigmoid(logit), kExistClamp); }

}  // namespace

double bce_term(double e, double e_gt) {
  double c = clamp01(e, kBceEps);
  return -(e_gt * std::log(c) + (1.0 - e_gt) * std::log(1.0 - c));
}

double motion_loss(std::span<const TargetState> x_star_seq, std::span<const TargetState> x_seq,
                   std::span<const double> e_seq, std::span<const double> e_diff_seq,
                   std::span<const TargetState> gt_states, std::span<const double> gt_existence,
                   const LossWeights& w, MotionLossTerms* terms) {
  const std::size_t n = x_star_seq.size();
  if (x_seq.size() != n || e_seq.size() != n || e_diff_seq.size() != n ||
      gt_states.size() != n || gt_existence.size() != n)
    throw std::invalid_argument("motion_loss: sequence lengths differ");
  if (n == 0) throw std::invalid_argument("motion_loss: empty sequence");
  for (std::size_t t = 0; t < n; ++t) {
    if (!x_star_seq[t].finite() || !x_seq[t].finite() || !std::isfinite(e_seq[t]) ||
        !std::isfinite(e_diff_seq[t]) || !gt_states[t].finite())
      throw NumericError("motion_loss: non-finite input", static_cast<long>(t));
  }

  MotionLossTerms acc;
  int n_exist = 0;
  for (std::size_t t = 0; t < n; ++t) {
    if (gt_existence[t] == 1.0) {
      ++n_exist;
      auto gt = gt_states[t].to_array();
      auto p = x_star_seq[t].to_array();
      auto u = x_seq[t].to_array();
      for (int d = 0; d < kStateDim; ++d) {
        acc.prediction += (p[d] - gt[d]) * (p[d] - gt[d]);
        acc.update += (u[d] - gt[d]) * (u[d] - gt[d]);
      }
    }
    acc.existence += bce_term(e_seq[t], gt_existence[t]);
    acc.smoothness += e_diff_seq[t];
  }
  if (n_exist > 0) {
    acc.prediction /= kStateDim * n_exist;
    acc.update /= kStateDim * n_exist;
  }
  acc.existence /= static_cast<double>(n);
  acc.smoothness /= static_cast<double>(n);
  if (terms) *terms = acc;
  return acc.total(w);
}

MotionNet::MotionNet(int hidden, int update_hidden_size)
    : hidden_size(hidden),
      update_hidden(update_hidden_size),
      core(kStateDim, hidden),
      pred_head(hidden, kStateDim),
      update_in(2 * kStateDim + hidden, update_hidden_size),
      update_out(update_hidden_size, kStateDim),
      exist_head(hidden + 2, 1) {
  if (hidden < 1 || update_hidden_size < 1)
    throw std::invalid_argument("MotionNet: sizes must be positive");
}

void MotionNet::init(Rng& rng, double range) {
  core.init(rng, range);
  init_uniform(pred_head.w, rng, range);
  init_uniform(update_in.w, rng, range);
  init_uniform(update_out.w, rng, range);
  init_uniform(exist_head.w, rng, range);
}

std::vector<Param*> MotionNet::params() {
  return {&core.weights, &pred_head.w, &update_in.w, &update_out.w, &exist_head.w};
}

std::vector<const Param*> MotionNet::params() const {
  return {&core.weights, &pred_head.w, &update_in.w, &update_out.w, &exist_head.w};
}

void motion_predict(const MotionNet& net, std::span<const double> x_t,
                    std::span<const double> h_t, Vec& x_star, Vec& h_next) {
  h_next = net.core.step(x_t, h_t);
  x_star = net.pred_head.forward(h_next);
}

Vec weighted_input(const MeasurementFrame& frame, std::span<const double> a_row,
                   std::span<const double> x_star, Vec* a_eff) {
  const int m = frame.capacity();
  if (static_cast<int>(a_row.size()) != m + 1)
    throw std::invalid_argument("weighted_input: a_row length must be capacity+1");
  if (static_cast<int>(x_star.size()) != kStateDim)
    throw std::invalid_argument("weighted_input: x_star must have 4 entries");
  double sum = 0.0;
  for (double v : a_row) {
    if (v < -1e-9) throw std::invalid_argument("weighted_input: negative probability");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-6)
    throw std::invalid_argument("weighted_input: a_row must sum to 1");

  Vec eff(a_row.begin(), a_row.end());
  double total = eff[m];
  for (int j = 0; j < m; ++j) {
    if (!frame.occupied[j]) eff[j] = 0.0;
    total += eff[j];
  }
  if (total <= 0.0) {
    std::fill(eff.begin(), eff.end(), 0.0);
    eff[m] = 1.0;
    total = 1.0;
  }
  for (double& v : eff) v /= total;

  Vec out(kStateDim, 0.0);
  for (int j = 0; j < m; ++j) {
    if (eff[j] == 0.0) continue;
    auto z = frame.slots[j].to_array();
    for (int d = 0; d < kStateDim; ++d) out[d] += eff[j] * z[d];
  }
  for (int d = 0; d < kStateDim; ++d) out[d] += eff[m] * x_star[d];
  if (a_eff) *a_eff = std::move(eff);
  return out;
}

TargetState motion_update(const MotionNet& net, const TargetState& x_star,
                          const MeasurementFrame& z_next, std::span<const double> a_row,
                          std::span<const double> h) {
  if (static_cast<int>(h.size()) != net.hidden_size)
    throw std::invalid_argument("motion_update: hidden size mismatch");
  auto xs = x_star.to_array();
  Vec x_hat = weighted_input(z_next, a_row, xs);
  Vec cat;
  cat.reserve(2 * kStateDim + h.size());
  cat.insert(cat.end(), x_hat.begin(), x_hat.end());
  cat.insert(cat.end(), xs.begin(), xs.end());
  cat.insert(cat.end(), h.begin(), h.end());
  Vec u = net.update_in.forward(cat);
  for (double& v : u) v = std::tanh(v);
  Vec x = net.update_out.forward(u);
  return TargetState::from_span(x);
}

std::pair<double, double> motion_existence(const MotionNet& net, std::span<const double> h_next,
                                           double e_t, double a_miss) {
  if (!(e_t >= 0.0 && e_t <= 1.0))
    throw std::invalid_argument("motion_existence: e_t must be in [0, 1]");
  if (static_cast<int>(h_next.size()) != net.hidden_size)
    throw std::invalid_argument("motion_existence: hidden size mismatch");
  Vec in;
  in.reserve(h_next.size() + 2);
  in.insert(in.end(), h_next.begin(), h_next.end());
  in.push_back(e_t);
  in.push_back(a_miss);
  double e = existence_from_logit(net.exist_head.forward(in)[0]);
  return {e, std::abs(e - e_t)};
}

double motion_forward(const MotionNet& net, const MotionInstance& inst, const LossWeights& w,
                      MotionTrace* trace, MotionLossTerms* terms) {
  const int T = inst.steps();
  if (T == 0) throw std::invalid_argument("motion_forward: empty instance");
  if (static_cast<int>(inst.x0.size()) != kStateDim ||
      inst.a_rows.size() != inst.frames.size() || inst.gt_states.size() != inst.frames.size() ||
      inst.gt_existence.size() != inst.frames.size())
    throw std::invalid_argument("motion_forward: inconsistent instance");

  MotionTrace local;
  MotionTrace& tr = trace ? *trace : local;
  tr = MotionTrace{};
  tr.x_in.reserve(T);
  tr.h.reserve(T);

  Vec h_prev(net.hidden_size, 0.0);
  Vec x_cur = inst.x0;
  double e_prev = kInitialExistence;
  for (int t = 0; t < T; ++t) {
    tr.x_in.push_back(x_cur);
    Vec h = net.core.step(x_cur, h_prev);
    Vec x_star = net.pred_head.forward(h);
    Vec a_eff;
    Vec x_hat = weighted_input(inst.frames[t], inst.a_rows[t], x_star, &a_eff);
    Vec cat;
    cat.reserve(2 * kStateDim + h.size());
    cat.insert(cat.end(), x_hat.begin(), x_hat.end());
    cat.insert(cat.end(), x_star.begin(), x_star.end());
    cat.insert(cat.end(), h.begin(), h.end());
    Vec u = net.update_in.forward(cat);
    for (double& v : u) v = std::tanh(v);
    Vec x = net.update_out.forward(u);
    if (!all_finite(x) || !all_finite(x_star))
      throw NumericError("motion_forward: non-finite state", t);

    Vec exist_in;
    exist_in.reserve(h.size() + 2);
    exist_in.insert(exist_in.end(), h.begin(), h.end());
    exist_in.push_back(e_prev);
    exist_in.push_back(a_eff.back());
    double e = existence_from_logit(net.exist_head.forward(exist_in)[0]);

    tr.x_star_states.push_back(TargetState::from_span(x_star));
    tr.x_states.push_back(TargetState::from_span(x));
    tr.e.push_back(e);
    tr.e_diff.push_back(std::abs(e - e_prev));
    tr.h.push_back(std::move(h));
    tr.x_star.push_back(std::move(x_star));
    tr.x_hat.push_back(std::move(x_hat));
    tr.a_eff.push_back(std::move(a_eff));
    tr.cat.push_back(std::move(cat));
    tr.u.push_back(std::move(u));
    tr.exist_in.push_back(std::move(exist_in));

    h_prev = tr.h.back();
    x_cur = x;
    e_prev = e;
  }

  return motion_loss(tr.x_star_states, tr.x_states, tr.e, tr.e_diff, inst.gt_states,
                     inst.gt_existence, w, terms);
}

double motion_backward(MotionNet& net, const MotionInstance& inst, const LossWeights& w,
                       MotionLossTerms* terms) {
  MotionTrace tr;
  double loss = motion_forward(net, inst, w, &tr, terms);

  const int T = inst.steps();
  const int H = net.hidden_size;
  const int U = net.update_hidden;
  int n_exist = 0;
  for (double g : inst.gt_existence)
    if (g == 1.0) ++n_exist;

  const Vec h_zero(H, 0.0);
  Vec dnext_x(kStateDim, 0.0);
  Vec dnext_h(H, 0.0);
  double dnext_e = 0.0;
  for (int t = T - 1; t >= 0; --t) {
    double e_prev = (t == 0) ? kInitialExistence : tr.e[t - 1];
    double e = tr.e[t];

    Vec dx = dnext_x;
    Vec dx_star(kStateDim, 0.0);
    if (inst.gt_existence[t] == 1.0) {
      auto gt = inst.gt_states[t].to_array();
      auto p = tr.x_star_states[t].to_array();
      auto u = tr.x_states[t].to_array();
      double scale_p = 2.0 * w.lambda / (kStateDim * n_exist);
      double scale_u = 2.0 * w.kappa / (kStateDim * n_exist);
      for (int d = 0; d < kStateDim; ++d) {
        dx_star[d] += scale_p * (p[d] - gt[d]);
        dx[d] += scale_u * (u[d] - gt[d]);
      }
    }

    double sg = sgn(e - e_prev);
    double de = dnext_e + (w.nu / T) * bce_grad(e, inst.gt_existence[t]) + (w.xi / T) * sg;
    double carry_e = -(w.xi / T) * sg;
    double de_pre = de * e * (1.0 - e);
    Vec de_pre_v{de_pre};
    Vec dexist_in(H + 2, 0.0);
    net.exist_head.backward(tr.exist_in[t], de_pre_v, &dexist_in);
    Vec dh = dnext_h;
    for (int k = 0; k < H; ++k) dh[k] += dexist_in[k];
    carry_e += dexist_in[H];

    Vec du(U, 0.0);
    net.update_out.backward(tr.u[t], dx, &du);
    Vec du_pre(U);
    for (int k = 0; k < U; ++k) du_pre[k] = du[k] * (1.0 - tr.u[t][k] * tr.u[t][k]);
    Vec dcat(2 * kStateDim + H, 0.0);
    net.update_in.backward(tr.cat[t], du_pre, &dcat);
    double a_miss = tr.a_eff[t].back();
    for (int d = 0; d < kStateDim; ++d) dx_star[d] += dcat[kStateDim + d] + a_miss * dcat[d];
    for (int k = 0; k < H; ++k) dh[k] += dcat[2 * kStateDim + k];

    net.pred_head.backward(tr.h[t], dx_star, &dh);

    const Vec& h_prev = (t == 0) ? h_zero : tr.h[t - 1];
    Vec dx_in(kStateDim, 0.0);
    Vec dh_prev(H, 0.0);
    net.core.backward(tr.x_in[t], h_prev, tr.h[t], dh, &dx_in, &dh_prev);
    dnext_x = std::move(dx_in);
    dnext_h = std::move(dh_prev);
    dnext_e = carry_e;
  }
  return loss;
}

std::vector<MotionInstance> make_motion_instances(const SceneSequence& scene,
                                                  int extend_past_death) {
  const int T = static_cast<int>(scene.frames.size());
  std::vector<MotionInstance> out;
  for (const auto& track : scene.gt_tracks) {
    int last = std::min(T - 1, track.death + extend_past_death);
    if (track.birth >= last) continue;

    MotionInstance inst;
    auto gt0 = track.state_at(track.birth).to_array();
    inst.x0.assign(gt0.begin(), gt0.end());
    const auto& birth_frame = scene.frames[track.birth];
    for (int j = 0; j < birth_frame.capacity(); ++j) {
      if (birth_frame.occupied[j] && birth_frame.source[j] == track.id) {
        auto z = birth_frame.slots[j].to_array();
        inst.x0.assign(z.begin(), z.end());
        break;
      }
    }

    for (int f = track.birth + 1; f <= last; ++f) {
      const auto& frame = scene.frames[f];
      Vec a(frame.capacity() + 1, 0.0);
      int slot = -1;
      if (track.alive_at(f)) {
        for (int j = 0; j < frame.capacity(); ++j) {
          if (frame.occupied[j] && frame.source[j] == track.id) {
            slot = j;
            break;
          }
        }
      }
      if (slot >= 0)
        a[slot] = 1.0;
      else
        a.back() = 1.0;
      bool alive = track.alive_at(f);
      inst.frames.push_back(frame);
      inst.a_rows.push_back(std::move(a));
      inst.gt_states.push_back(alive ? track.state_at(f) : TargetState{0.0, 0.0, 0.0, 0.0});
      inst.gt_existence.push_back(alive ? 1.0 : 0.0);
    }
    out.push_back(std::move(inst));
  }
  return out;
}

std::vector<MotionInstance> make_clutter_instances(const SceneSequence& scene, int window_len,
                                                   int max_windows) {
  const int T = static_cast<int>(scene.frames.size());
  int cap = max_windows >= 0 ? max_windows : static_cast<int>(scene.gt_tracks.size());
  std::vector<MotionInstance> out;
  for (int f = 0; f + 1 < T && static_cast<int>(out.size()) < cap; ++f) {
    const auto& born = scene.frames[f];
    for (int j = 0; j < born.capacity() && static_cast<int>(out.size()) < cap; ++j) {
      if (!born.occupied[j] || born.source[j] != kClutter) continue;
      MotionInstance inst;
      auto z = born.slots[j].to_array();
      inst.x0.assign(z.begin(), z.end());
      int last = std::min(T - 1, f + window_len);
      for (int g = f + 1; g <= last; ++g) {
        const auto& frame = scene.frames[g];
        Vec a(frame.capacity() + 1, 0.0);
        a.back() = 1.0;
        inst.frames.push_back(frame);
        inst.a_rows.push_back(std::move(a));
        inst.gt_states.push_back(TargetState{0.0, 0.0, 0.0, 0.0});
        inst.gt_existence.push_back(0.0);
      }
      out.push_back(std::move(inst));
    }
  }
  return out;
}

TrainResult train_motion(MotionNet& net, std::span<const MotionInstance> data,
                         const LossWeights& w, const TrainConfig& tc, Rng& rng,
                         std::vector<TrainLogRow>* log, int log_every,
                         std::span<Param* const> trainable) {
  if (data.empty()) throw std::invalid_argument("train_motion: no training data");
  auto all = net.params();
  std::vector<Param*> params = trainable.empty()
                                   ? all
                                   : std::vector<Param*>(trainable.begin(), trainable.end());
  TrainResult res;
  double window_loss = 0.0;
  MotionLossTerms window_terms;
  long window_n = 0;
  for (long it = 0; it < tc.max_iterations; ++it) {
    zero_grads(all);  // backward fills every param; only the trainable set is stepped
    double batch_loss = 0.0;
    for (int b = 0; b < tc.batch_size; ++b) {
      const auto& inst = data[rng.uniform_int(0, static_cast<long>(data.size()) - 1)];
      MotionLossTerms terms;
      batch_loss += motion_backward(net, inst, w, &terms);
      window_terms.prediction += terms.prediction;
      window_terms.update += terms.update;
      window_terms.existence += terms.existence;
      window_terms.smoothness += terms.smoothness;
    }
    batch_loss /= tc.batch_size;
    scale_grads(params, 1.0 / tc.batch_size);
    clip_grads(params, tc.grad_clip);
    double lr = learning_rate_at(it, tc);
    for (auto* p : params) rmsprop_update(*p, lr, tc.rho, tc.eps);

    window_loss += batch_loss;
    ++window_n;
    if ((it + 1) % log_every == 0 || it + 1 == tc.max_iterations) {
      res.final_loss = window_loss / window_n;
      if (log) {
        double denom = static_cast<double>(window_n) * tc.batch_size;
        TrainLogRow row;
        row.iteration = it + 1;
        row.lr = lr;
        row.loss = res.final_loss;
        row.breakdown = {window_terms.prediction / denom, window_terms.update / denom,
                         window_terms.existence / denom, window_terms.smoothness / denom};
        log->push_back(row);
      }
      window_loss = 0.0;
      window_terms = MotionLossTerms{};
      window_n = 0;
    }
  }
  res.iterations = tc.max_iterations;
  return res;
}

}  // namespace rectrack
