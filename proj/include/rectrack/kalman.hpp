#pragma once

#include <array>
#include <vector>

#include "rectrack/types.hpp"

namespace rectrack {

struct KalmanConfig {
  double process_noise = 1e-4;
  double meas_noise = 1e-3;
  double init_pos_var = 1e-3;
  double gate_distance = 0.3;
};

struct HeuristicConfig {
  int min_track_length = 3;
  int max_misses = 2;
  double gate_distance = 0.3;
};

// Constant-velocity filter state: (x, y, w, h) plus their velocities, with a
// full 8x8 covariance kept symmetric positive-definite.
struct KalmanTrack {
  int id = 0;
  int age = 0;
  int misses = 0;
  std::array<double, 8> mean{};
  std::array<double, 64> cov{};  // row-major

  TargetState box() const { return {mean[0], mean[1], mean[2], mean[3]}; }
};

// Fresh track at the measurement with zero velocity; velocity variance is 10x
// the position variance.
KalmanTrack make_kalman_track(int id, const TargetState& z, const KalmanConfig& cfg);

// Position += velocity; P <- F P F^T + q*I. Throws NumericError when the
// covariance stops being positive-definite.
KalmanTrack kalman_predict(const KalmanTrack& track, double process_noise);

// Measures the four box components with R = r*I; Joseph-form covariance
// update. Throws NumericError when the innovation covariance is singular.
KalmanTrack kalman_update(const KalmanTrack& track, const TargetState& z, double meas_noise);

// Baseline of the harshest kind: per frame, predict all tracks, match by LAP
// on gated Euclidean distance, update matches, kill every unmatched track
// immediately, spawn (and emit) a track for every unmatched measurement.
ResultsTable run_kalman_ha(const std::vector<MeasurementFrame>& frames, const KalmanConfig& cfg);

// Same loop, but unmatched tracks coast on their prediction for up to
// max_misses frames, and post hoc every track with fewer than min_track_length
// matched frames is dropped along with any trailing coasted boxes.
ResultsTable run_kalman_ha2(const std::vector<MeasurementFrame>& frames, const KalmanConfig& cfg,
                            const HeuristicConfig& heuristics);

}  // namespace rectrack
