#include "rectrack/assoc.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rectrack {

namespace {

constexpr double kProbEps = 1e-12;

int label_column(int label, int m_max) { return label == kMiss ? m_max : label; }

}  // namespace

CostMatrix build_cost_matrix(std::span<const TargetState> predicted,
                             const MeasurementFrame& frame) {
  if (predicted.empty())
    throw std::invalid_argument("build_cost_matrix: need at least one target");
  CostMatrix c(static_cast<int>(predicted.size()), frame.capacity());
  for (int i = 0; i < c.rows; ++i) {
    for (int j = 0; j < c.cols; ++j) {
      c.at(i, j) =
          frame.occupied[j] ? euclidean(predicted[i], frame.slots[j]) : kMaskedSlotCost;
    }
  }
  return c;
}

AssignmentMatrix::AssignmentMatrix(Matrix probs) : p(std::move(probs)) {
  if (p.rows < 1 || p.cols < 2)
    throw std::invalid_argument("AssignmentMatrix: need >= 1 row and >= 2 columns");
  for (int i = 0; i < p.rows; ++i) {
    double sum = 0.0;
    for (int j = 0; j < p.cols; ++j) {
      double v = p.at(i, j);
      if (!(v >= 0.0 && v <= 1.0))
        throw std::invalid_argument("AssignmentMatrix: entry outside [0, 1]");
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-9)
      throw std::invalid_argument("AssignmentMatrix: row does not sum to 1");
  }
}

double da_loss(std::span<const double> a_row, int correct) {
  if (correct < 0 || correct >= static_cast<int>(a_row.size()))
    throw std::invalid_argument("da_loss: correct index out of range");
  return -std::log(std::max(a_row[correct], kProbEps));
}

AssocNet::AssocNet(const AssocConfig& config)
    : cfg(config),
      embed(config.n_max * config.m_max + config.n_max, config.embed),
      core(config.layers, config.embed, config.hidden),
      head(config.hidden, config.m_max + 1) {
  if (cfg.n_max < 1 || cfg.m_max < 1 || cfg.embed < 1 || cfg.hidden < 1 || cfg.layers < 1)
    throw std::invalid_argument("AssocNet: sizes must be positive");
}

void AssocNet::init(Rng& rng, double range) {
  init_uniform(embed.w, rng, range);
  core.init(rng, range);
  init_uniform(head.w, rng, range);
}

std::vector<Param*> AssocNet::params() {
  std::vector<Param*> out{&embed.w};
  for (Param* p : core.params()) out.push_back(p);
  out.push_back(&head.w);
  return out;
}

std::vector<const Param*> AssocNet::params() const {
  auto mutable_params = const_cast<AssocNet*>(this)->params();
  return {mutable_params.begin(), mutable_params.end()};
}

Vec flatten_cost_input(const AssocConfig& cfg, const CostMatrix& c) {
  if (c.rows > cfg.n_max || c.cols > cfg.m_max)
    throw std::invalid_argument("flatten_cost_input: matrix exceeds configured capacity");
  const double scale = 1.0 / std::sqrt(static_cast<double>(kStateDim));
  Vec flat(static_cast<std::size_t>(cfg.n_max) * cfg.m_max);
  for (int i = 0; i < cfg.n_max; ++i) {
    for (int j = 0; j < cfg.m_max; ++j) {
      double v = (i < c.rows && j < c.cols) ? c.at(i, j) : kMaskedSlotCost;
      flat[static_cast<std::size_t>(i) * cfg.m_max + j] = v * scale;
    }
  }
  return flat;
}

namespace {

// Shared by inference and training: one LSTM step per target over the fixed
// flattened input plus the step's one-hot index.
struct StepOutputs {
  std::vector<Vec> inputs;
  std::vector<Vec> tops;
  std::vector<Vec> probs;  // softmax over m_max + 1 logits
  std::vector<std::vector<LstmCell::Cache>> caches;
};

void run_steps(const AssocNet& net, const CostMatrix& c, int n_steps, bool keep_caches,
               StepOutputs& out) {
  Vec flat = flatten_cost_input(net.cfg, c);
  LstmState state(net.cfg.layers, net.cfg.hidden);
  for (int i = 0; i < n_steps; ++i) {
    Vec input(flat);
    input.resize(flat.size() + net.cfg.n_max, 0.0);
    input[flat.size() + i] = 1.0;
    Vec embedded = net.embed.forward(input);
    Vec top;
    if (keep_caches) {
      std::vector<LstmCell::Cache> caches;
      net.core.step_cached(embedded, state, caches);
      top = caches.back().h;
      out.caches.push_back(std::move(caches));
    } else {
      top = net.core.step(embedded, state);
    }
    out.probs.push_back(softmax(net.head.forward(top)));
    out.tops.push_back(std::move(top));
    out.inputs.push_back(std::move(input));
  }
}

}  // namespace

AssignmentMatrix assoc_forward(const AssocNet& net, const CostMatrix& c) {
  if (c.rows < 1) throw std::invalid_argument("assoc_forward: need at least one target");
  StepOutputs steps;
  run_steps(net, c, c.rows, false, steps);
  Matrix rows(c.rows, c.cols + 1);
  for (int i = 0; i < c.rows; ++i) {
    const Vec& p = steps.probs[i];
    double total = p[net.cfg.m_max];
    for (int j = 0; j < c.cols; ++j) total += p[j];
    for (int j = 0; j < c.cols; ++j) rows.at(i, j) = p[j] / total;
    rows.at(i, c.cols) = p[net.cfg.m_max] / total;
  }
  return AssignmentMatrix(std::move(rows));
}

Assignment infer_hard_assignment(const AssignmentMatrix& a, HardAssignMode mode) {
  const int n = a.targets();
  const int m = a.slots();
  if (mode == HardAssignMode::argmax) {
    Assignment out;
    out.col_of_row.resize(n);
    for (int i = 0; i < n; ++i) {
      int best = 0;
      for (int j = 1; j <= m; ++j)
        if (a.at(i, j) > a.at(i, best)) best = j;
      out.col_of_row[i] = (best == m) ? kMiss : best;
    }
    return out;
  }
  CostMatrix c(n, m);
  std::vector<double> miss_costs(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) c.at(i, j) = -std::log(std::max(a.at(i, j), kProbEps));
    miss_costs[i] = -std::log(std::max(a.miss(i), kProbEps));
  }
  return solve_lap(c, miss_costs);
}

double assoc_sequence_loss(const AssocNet& net, const AssocInstance& inst) {
  const int n = inst.cost.rows;
  if (n < 1 || static_cast<int>(inst.labels.size()) != n)
    throw std::invalid_argument("assoc_sequence_loss: bad instance");
  StepOutputs steps;
  run_steps(net, inst.cost, n, false, steps);
  double loss = 0.0;
  for (int i = 0; i < n; ++i)
    loss += da_loss(steps.probs[i], label_column(inst.labels[i], net.cfg.m_max));
  return loss / n;
}

double assoc_backward(AssocNet& net, const AssocInstance& inst) {
  const int n = inst.cost.rows;
  if (n < 1 || static_cast<int>(inst.labels.size()) != n)
    throw std::invalid_argument("assoc_backward: bad instance");
  StepOutputs steps;
  run_steps(net, inst.cost, n, true, steps);

  double loss = 0.0;
  std::vector<Vec> dh_carry(net.cfg.layers, Vec(net.cfg.hidden, 0.0));
  std::vector<Vec> dc_carry(net.cfg.layers, Vec(net.cfg.hidden, 0.0));
  for (int i = n - 1; i >= 0; --i) {
    int col = label_column(inst.labels[i], net.cfg.m_max);
    loss += da_loss(steps.probs[i], col);
    // d(-log softmax)/dlogits = p - onehot, averaged over the n steps.
    Vec dlogits = steps.probs[i];
    dlogits[col] -= 1.0;
    for (double& v : dlogits) v /= n;
    Vec dh_top(net.cfg.hidden, 0.0);
    net.head.backward(steps.tops[i], dlogits, &dh_top);
    Vec dembedded(net.cfg.embed, 0.0);
    net.core.backward(steps.caches[i], dh_top, dh_carry, dc_carry, &dembedded);
    net.embed.backward(steps.inputs[i], dembedded, nullptr);
  }
  return loss / n;
}

FrameLabels make_training_labels(const std::vector<GtTrack>& gt_tracks, int frame_index,
                                 const MeasurementFrame& frame) {
  FrameLabels out;
  for (const auto& track : gt_tracks) {
    if (!track.alive_at(frame_index)) continue;
    int slot = kMiss;
    for (int j = 0; j < frame.capacity(); ++j) {
      if (frame.occupied[j] && frame.source[j] == track.id) {
        slot = j;
        break;
      }
    }
    out.track_ids.push_back(track.id);
    out.labels.push_back(slot);
  }
  return out;
}

std::vector<AssocInstance> make_assoc_instances(const SceneSequence& scene,
                                                const AssocDataConfig& dcfg, Rng& rng) {
  std::vector<AssocInstance> out;
  const int T = static_cast<int>(scene.frames.size());
  for (int f = 0; f < T; ++f) {
    std::vector<TargetState> predicted;
    std::vector<int> alive_ids;
    for (const auto& track : scene.gt_tracks) {
      if (!track.alive_at(f)) continue;
      TargetState s = track.state_at(f);
      s.x += rng.normal(0.0, dcfg.pred_noise);
      s.y += rng.normal(0.0, dcfg.pred_noise);
      s.w += rng.normal(0.0, dcfg.pred_noise);
      s.h += rng.normal(0.0, dcfg.pred_noise);
      predicted.push_back(s);
      alive_ids.push_back(track.id);
    }
    if (predicted.empty()) continue;

    AssocInstance inst;
    inst.cost = build_cost_matrix(predicted, scene.frames[f]);
    if (dcfg.provenance_labels) {
      FrameLabels fl = make_training_labels(scene.gt_tracks, f, scene.frames[f]);
      inst.labels = fl.labels;
    } else {
      Assignment oracle = solve_lap(inst.cost, dcfg.miss_cost);
      inst.labels = oracle.col_of_row;
    }
    out.push_back(std::move(inst));
  }
  return out;
}

AssocInstance make_separated_instance(int n_max, int m_max, const SeparatedInstanceConfig& icfg,
                                      Rng& rng) {
  if (n_max < 1 || m_max < n_max)
    throw std::invalid_argument("make_separated_instance: need 1 <= n_max <= m_max");
  // Half the draws hit the full-capacity corner: late LSTM steps and wide
  // matrices are the hard part of the selection task and need the exposure.
  int n = rng.uniform01() < 0.5 ? n_max : static_cast<int>(rng.uniform_int(1, n_max));
  int m = rng.uniform01() < 0.5 ? m_max : static_cast<int>(rng.uniform_int(n, m_max));
  std::vector<int> perm(m);
  for (int j = 0; j < m; ++j) perm[j] = j;
  for (int j = m - 1; j > 0; --j) std::swap(perm[j], perm[rng.uniform_int(0, j)]);

  AssocInstance inst;
  inst.cost = CostMatrix(n, m);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) {
      if (j == perm[i]) {
        double d2 = 0.0;
        for (int d = 0; d < kStateDim; ++d) {
          double g = rng.normal(0.0, icfg.match_noise);
          d2 += g * g;
        }
        inst.cost.at(i, j) = std::sqrt(d2);
      } else {
        inst.cost.at(i, j) = rng.uniform(icfg.min_separation, icfg.max_separation);
      }
    }
  }
  inst.labels = solve_lap(inst.cost, icfg.miss_cost).col_of_row;
  return inst;
}

TrainResult train_assoc(AssocNet& net, std::span<const AssocInstance> data,
                        const TrainConfig& tc, Rng& rng, std::vector<TrainLogRow>* log,
                        int log_every) {
  if (data.empty()) throw std::invalid_argument("train_assoc: no training data");
  auto params = net.params();
  TrainResult res;
  double window_loss = 0.0;
  long window_n = 0;
  for (long it = 0; it < tc.max_iterations; ++it) {
    zero_grads(params);
    double batch_loss = 0.0;
    for (int b = 0; b < tc.batch_size; ++b) {
      const auto& inst = data[rng.uniform_int(0, static_cast<long>(data.size()) - 1)];
      batch_loss += assoc_backward(net, inst);
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
        TrainLogRow row;
        row.iteration = it + 1;
        row.lr = lr;
        row.loss = res.final_loss;
        log->push_back(row);
      }
      window_loss = 0.0;
      window_n = 0;
    }
  }
  res.iterations = tc.max_iterations;
  return res;
}

AgreementReport oracle_agreement(const AssocNet& net, std::span<const AssocInstance> data,
                                 double miss_cost) {
  AgreementReport report;
  for (const auto& inst : data) {
    Assignment oracle = solve_lap(inst.cost, miss_cost);
    AssignmentMatrix a = assoc_forward(net, inst.cost);
    Assignment predicted = infer_hard_assignment(a, HardAssignMode::argmax);
    for (int i = 0; i < inst.cost.rows; ++i) {
      ++report.rows;
      if (predicted.col_of_row[i] == oracle.col_of_row[i]) ++report.matches;
    }
  }
  return report;
}

}  // namespace rectrack
