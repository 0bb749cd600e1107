#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "rectrack/rng.hpp"
#include "rectrack/types.hpp"

namespace rectrack {

// Per-dimension start-location and average-velocity statistics of a set of
// trajectories; everything the generative model knows about motion.
struct TrajectoryModel {
  std::array<double, kStateDim> start_mean{};
  std::array<double, kStateDim> start_var{};
  std::array<double, kStateDim> vel_mean{};
  std::array<double, kStateDim> vel_var{};
};

// Sample mean and (Bessel-corrected) variance of start states and per-track
// average velocities. Requires at least two tracks, each at least two frames.
TrajectoryModel fit_model(const std::vector<GtTrack>& tracks);

// Documented default model used when no real data is fitted: targets start
// anywhere in the central image region with pedestrian-like frame-to-frame
// motion, boxes around 8% x 15% of the image.
TrajectoryModel default_trajectory_model();

struct SceneConfig {
  int seq_len = 20;
  int max_targets = 5;
  int max_detections = 10;  // measurement slots per frame (M)
  double p_det = 0.9;
  double clutter_rate = 1.0;  // expected false alarms per frame
  double sigma_z = 0.01;      // detection noise, normalized units
  int min_life = 5;           // minimum track length in frames
  bool always_alive = false;  // force birth 0 / death T-1 (clean sequences)
  double clutter_size_min = 0.02;
  double clutter_size_max = 0.2;
  std::uint64_t seed = 1;
};

// A generated scene: ground-truth tracks plus per-frame detections with
// provenance tags. Ground-truth existence per target is a box function over
// [birth, death].
struct SceneSequence {
  std::vector<GtTrack> gt_tracks;
  std::vector<MeasurementFrame> frames;
};

// Deterministic given (model, cfg): identical inputs reproduce the scene
// bit for bit. Track positions stay inside the documented working range
// [-0.55, 0.55] (rejection sampling); clutter is uniform over [-0.5, 0.5].
SceneSequence sample_sequence(const TrajectoryModel& model, const SceneConfig& cfg);

// count scenes with per-scene seeds Rng::split(master_seed, index).
std::vector<SceneSequence> sample_scenes(const TrajectoryModel& model, SceneConfig cfg,
                                         std::uint64_t master_seed, int count);

}  // namespace rectrack
