#pragma once

#include <span>
#include <utility>
#include <vector>

#include "rectrack/datagen.hpp"
#include "rectrack/nn.hpp"
#include "rectrack/rng.hpp"
#include "rectrack/types.hpp"

namespace rectrack {

struct LossWeights {
  double lambda = 1.0;
  double kappa = 1.0;
  double nu = 1.0;
  double xi = 0.1;
};

// -[e_gt*ln(e) + (1-e_gt)*ln(1-e)] with e clamped to [1e-7, 1-1e-7].
double bce_term(double e, double e_gt);

struct MotionLossTerms {
  double prediction = 0.0;  // mean over existing frames of ||x* - gt||^2 / D
  double update = 0.0;      // mean over existing frames of ||x - gt||^2 / D
  double existence = 0.0;   // mean over all frames of BCE(e, gt_e)
  double smoothness = 0.0;  // mean over all frames of |e_t - e_{t-1}|

  double total(const LossWeights& w) const {
    return w.lambda * prediction + w.kappa * update + w.nu * existence + w.xi * smoothness;
  }
};

// Per-frame location terms only count frames whose ground-truth existence is 1;
// the existence and smoothness terms run over the whole window.
double motion_loss(std::span<const TargetState> x_star_seq, std::span<const TargetState> x_seq,
                   std::span<const double> e_seq, std::span<const double> e_diff_seq,
                   std::span<const TargetState> gt_states, std::span<const double> gt_existence,
                   const LossWeights& w, MotionLossTerms* terms = nullptr);

// Per-target recurrent motion model. One network instance is shared by all
// targets; each target carries its own hidden vector.
struct MotionNet {
  int hidden_size = 0;
  int update_hidden = 0;
  RnnCell core;       // x_t -> h
  Affine pred_head;   // h -> x*
  Affine update_in;   // [x_hat; x*; h] -> pre-tanh update features
  Affine update_out;  // tanh(features) -> x
  Affine exist_head;  // [h; e_prev; a_miss] -> existence logit

  MotionNet() = default;
  MotionNet(int hidden, int update_hidden_size);
  void init(Rng& rng, double range = 0.08);
  std::vector<Param*> params();
  std::vector<const Param*> params() const;
};

// h_next = core(x_t, h_t); x_star = pred_head(h_next).
void motion_predict(const MotionNet& net, std::span<const double> x_t,
                    std::span<const double> h_t, Vec& x_star, Vec& h_next);

// Convex weighting stage of the update: sum_j a_j * z_j + a_miss * x_star.
// Probability mass on unoccupied slots is zeroed and the row renormalized; if
// nothing remains the row degenerates to all-miss. a_row has length
// capacity+1, the last entry being the miss probability. Throws
// std::invalid_argument unless a_row sums to 1 within 1e-6.
Vec weighted_input(const MeasurementFrame& frame, std::span<const double> a_row,
                   std::span<const double> x_star, Vec* a_eff = nullptr);

TargetState motion_update(const MotionNet& net, const TargetState& x_star,
                          const MeasurementFrame& z_next, std::span<const double> a_row,
                          std::span<const double> h);

// e_next = sigmoid(exist_head([h_next; e_t; a_miss])); returns (e_next,
// |e_next - e_t|). a_miss is the effective miss probability of the step's
// assignment row. Throws std::invalid_argument unless e_t is in [0, 1].
std::pair<double, double> motion_existence(const MotionNet& net, std::span<const double> h_next,
                                           double e_t, double a_miss = 0.0);

// One training window for a single target: the state at its first frame, then
// for every following frame the measurement set, the assignment row (one-hot
// label during supervised training), and the ground truth.
struct MotionInstance {
  Vec x0;
  std::vector<MeasurementFrame> frames;
  std::vector<Vec> a_rows;
  std::vector<TargetState> gt_states;
  std::vector<double> gt_existence;

  int steps() const { return static_cast<int>(frames.size()); }
};

// Everything the backward pass needs, recorded per step.
struct MotionTrace {
  std::vector<Vec> x_in, h, x_star, x_hat, a_eff, cat, u, exist_in;
  std::vector<double> e, e_diff;
  std::vector<TargetState> x_star_states, x_states;
};

inline constexpr double kInitialExistence = 0.5;

// Closed loop: the model's own updated state is the next core input. Returns
// the window loss; fills trace and terms when given.
double motion_forward(const MotionNet& net, const MotionInstance& inst, const LossWeights& w,
                      MotionTrace* trace = nullptr, MotionLossTerms* terms = nullptr);

// Forward plus backpropagation through time; accumulates parameter gradients.
double motion_backward(MotionNet& net, const MotionInstance& inst, const LossWeights& w,
                       MotionLossTerms* terms = nullptr);

// Builds one window per ground-truth track: frames [birth, min(last,
// death+extend_past_death)], assignment labels from detection provenance, x0
// from the birth-frame detection (ground truth if that detection was dropped).
std::vector<MotionInstance> make_motion_instances(const SceneSequence& scene,
                                                  int extend_past_death = 5);

// Negative windows seeded from clutter detections: x0 is the clutter box,
// every assignment row is all-miss, ground-truth existence is zero throughout.
// Without these a trained existence head never sees a candidate that should
// die, so clutter-born tracks survive their first misses. Windows are taken in
// frame order; max_windows < 0 caps them at the scene's track count.
std::vector<MotionInstance> make_clutter_instances(const SceneSequence& scene, int window_len = 6,
                                                   int max_windows = -1);

// trainable empty means every parameter; otherwise only the listed parameters
// are stepped (e.g. existence-head fine-tuning on a frozen backbone).
TrainResult train_motion(MotionNet& net, std::span<const MotionInstance> data,
                         const LossWeights& w, const TrainConfig& tc, Rng& rng,
                         std::vector<TrainLogRow>* log = nullptr, int log_every = 200,
                         std::span<Param* const> trainable = {});

}  // namespace rectrack
