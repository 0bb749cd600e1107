#pragma once

#include <span>
#include <vector>

#include "rectrack/datagen.hpp"
#include "rectrack/lap.hpp"
#include "rectrack/nn.hpp"
#include "rectrack/rng.hpp"
#include "rectrack/types.hpp"

namespace rectrack {

// Cost for a masked measurement slot; far outside the diameter of the
// normalized coordinate space (about 2).
inline constexpr double kMaskedSlotCost = 10.0;

// C_ij = Euclidean distance over the 4 box components between predicted state
// i and measurement slot j. Unoccupied slots get kMaskedSlotCost.
CostMatrix build_cost_matrix(std::span<const TargetState> predicted,
                             const MeasurementFrame& frame);

// Row-stochastic soft assignment: one row per target over measurement columns
// plus a trailing miss column. The constructor rejects rows that do not sum to
// 1 within 1e-9 or entries outside [0, 1].
struct AssignmentMatrix {
  Matrix p;

  explicit AssignmentMatrix(Matrix probs);
  int targets() const { return p.rows; }
  int slots() const { return p.cols - 1; }
  double at(int i, int j) const { return p.at(i, j); }
  double miss(int i) const { return p.at(i, p.cols - 1); }
  std::span<const double> row(int i) const {
    return {p.row_ptr(i), static_cast<std::size_t>(p.cols)};
  }
};

// Negative log-likelihood of the correct column under a_row; clamped at 1e-12.
double da_loss(std::span<const double> a_row, int correct);

struct AssocConfig {
  int n_max = 10;
  int m_max = 10;
  int embed = 64;
  int hidden = 500;
  int layers = 2;
};

// Per-target assignment predictor: the whole (padded, scaled) cost matrix is
// fed at every step together with a one-hot step index; step i emits the
// distribution for target i.
struct AssocNet {
  AssocConfig cfg;
  Affine embed;
  LstmStack core;
  Affine head;

  AssocNet() = default;
  explicit AssocNet(const AssocConfig& config);
  void init(Rng& rng, double range = 0.08);
  std::vector<Param*> params();
  std::vector<const Param*> params() const;

  int input_size() const { return cfg.n_max * cfg.m_max + cfg.n_max; }
};

// Flattened cost input shared by every step: padded to n_max x m_max with the
// sentinel, then scaled by 1/sqrt(D).
Vec flatten_cost_input(const AssocConfig& cfg, const CostMatrix& c);

// Throws std::invalid_argument when c exceeds the configured capacity. The
// returned matrix has c.cols measurement columns plus miss: logits for padded
// columns are dropped and each row renormalized.
AssignmentMatrix assoc_forward(const AssocNet& net, const CostMatrix& c);

enum class HardAssignMode { argmax, lap };

// argmax: per-row argmax, which may violate one-to-one; lap: solve_lap on
// -ln(p) with the per-row miss probability as that row's miss cost.
Assignment infer_hard_assignment(const AssignmentMatrix& a, HardAssignMode mode);

// One supervised frame: cost over the frame's slots plus the correct column
// per target (kMiss for a dropped detection).
struct AssocInstance {
  CostMatrix cost{0, 0};
  std::vector<int> labels;
};

// Mean NLL over the full (m_max+1)-way softmax at each step; label kMiss maps
// to column m_max.
double assoc_sequence_loss(const AssocNet& net, const AssocInstance& inst);

// Forward plus backpropagation; accumulates parameter gradients.
double assoc_backward(AssocNet& net, const AssocInstance& inst);

// Correct slot index per ground-truth track alive at the frame (kMiss when the
// detection was dropped); track order gives target order.
struct FrameLabels {
  std::vector<int> track_ids;
  std::vector<int> labels;
};
FrameLabels make_training_labels(const std::vector<GtTrack>& gt_tracks, int frame_index,
                                 const MeasurementFrame& frame);

struct AssocDataConfig {
  double pred_noise = 0.02;  // stddev applied to gt states to mimic predictions
  // LAP miss cost for oracle labels. Sits in the gap between true-match
  // distances (~0.05 for the default noise levels) and typical clutter
  // distances, so the oracle's miss decisions are learnable structure rather
  // than coin flips on boundary rows.
  double miss_cost = 0.1;
  bool provenance_labels = false;  // generator correspondences instead of the LAP oracle
};

// One instance per frame with at least one live target. Predicted states are
// the gt states plus pred_noise; labels come from solve_lap on the resulting
// cost (or from provenance when configured).
std::vector<AssocInstance> make_assoc_instances(const SceneSequence& scene,
                                                const AssocDataConfig& dcfg, Rng& rng);

struct SeparatedInstanceConfig {
  double match_noise = 0.0224;   // per-dim stddev of a matched pair's offset
  double min_separation = 0.15;  // off-pair entries uniform in this range
  double max_separation = 1.2;
  double miss_cost = 0.1;  // oracle labeling
};

// Diagonal-dominant instance: n targets each near one distinct measurement of
// m, every other entry far. Scene frames rarely produce such clean geometry,
// so training mixes these in to cover the easy regime the evaluation probes.
AssocInstance make_separated_instance(int n_max, int m_max, const SeparatedInstanceConfig& icfg,
                                      Rng& rng);

TrainResult train_assoc(AssocNet& net, std::span<const AssocInstance> data,
                        const TrainConfig& tc, Rng& rng,
                        std::vector<TrainLogRow>* log = nullptr, int log_every = 200);

struct AgreementReport {
  long rows = 0;
  long matches = 0;
  double rate() const { return rows == 0 ? 0.0 : static_cast<double>(matches) / rows; }
};

// Row-argmax of the net against solve_lap labels on held-out instances.
AgreementReport oracle_agreement(const AssocNet& net, std::span<const AssocInstance> data,
                                 double miss_cost);

}  // namespace rectrack
