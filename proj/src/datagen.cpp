#include "rectrack/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rectrack {

ResultsTable tracks_to_boxes(const std::vector<GtTrack>& tracks) {
  ResultsTable out;
  for (const auto& t : tracks)
    for (int f = t.birth; f <= t.death; ++f) out.push_back({f, t.id, t.state_at(f)});
  std::stable_sort(out.begin(), out.end(),
                   [](const OutputBox& a, const OutputBox& b) { return a.frame < b.frame; });
  return out;
}

TrajectoryModel fit_model(const std::vector<GtTrack>& tracks) {
  if (tracks.size() < 2) throw std::invalid_argument("fit_model: need at least 2 tracks");
  const std::size_t n = tracks.size();
  std::vector<std::array<double, kStateDim>> starts, vels;
  starts.reserve(n);
  vels.reserve(n);
  for (const auto& t : tracks) {
    if (t.states.size() < 2) throw std::invalid_argument("fit_model: tracks need >= 2 frames");
    starts.push_back(t.states.front().to_array());
    auto first = t.states.front().to_array();
    auto last = t.states.back().to_array();
    std::array<double, kStateDim> v{};
    double span = static_cast<double>(t.states.size() - 1);
    for (int d = 0; d < kStateDim; ++d) v[d] = (last[d] - first[d]) / span;
    vels.push_back(v);
  }
  auto stats = [n](const std::vector<std::array<double, kStateDim>>& xs,
                   std::array<double, kStateDim>& mean, std::array<double, kStateDim>& var) {
    mean.fill(0.0);
    var.fill(0.0);
    for (const auto& x : xs)
      for (int d = 0; d < kStateDim; ++d) mean[d] += x[d];
    for (int d = 0; d < kStateDim; ++d) mean[d] /= static_cast<double>(n);
    for (const auto& x : xs)
      for (int d = 0; d < kStateDim; ++d) var[d] += (x[d] - mean[d]) * (x[d] - mean[d]);
    for (int d = 0; d < kStateDim; ++d) var[d] /= static_cast<double>(n - 1);
  };
  TrajectoryModel model;
  stats(starts, model.start_mean, model.start_var);
  stats(vels, model.vel_mean, model.vel_var);
  return model;
}

TrajectoryModel default_trajectory_model() {
  TrajectoryModel m;
  m.start_mean = {0.0, 0.0, 0.08, 0.15};
  m.start_var = {0.22 * 0.22, 0.22 * 0.22, 0.01 * 0.01, 0.02 * 0.02};
  m.vel_mean = {0.0, 0.0, 0.0, 0.0};
  m.vel_var = {0.02 * 0.02, 0.02 * 0.02, 0.002 * 0.002, 0.002 * 0.002};
  return m;
}

namespace {

constexpr double kWorkingRange = 0.55;
constexpr double kMinBoxSize = 0.005;

TargetState sample_state(const TrajectoryModel& m, Rng& rng) {
  TargetState s;
  s.x = rng.normal(m.start_mean[0], std::sqrt(m.start_var[0]));
  s.y = rng.normal(m.start_mean[1], std::sqrt(m.start_var[1]));
  s.w = rng.normal(m.start_mean[2], std::sqrt(m.start_var[2]));
  s.h = rng.normal(m.start_mean[3], std::sqrt(m.start_var[3]));
  return s;
}

std::array<double, kStateDim> sample_velocity(const TrajectoryModel& m, Rng& rng) {
  std::array<double, kStateDim> v;
  for (int d = 0; d < kStateDim; ++d) v[d] = rng.normal(m.vel_mean[d], std::sqrt(m.vel_var[d]));
  return v;
}

bool track_in_range(const GtTrack& t) {
  for (const auto& s : t.states) {
    if (std::abs(s.x) > kWorkingRange || std::abs(s.y) > kWorkingRange) return false;
    if (s.w < kMinBoxSize || s.h < kMinBoxSize || s.w > 1.0 || s.h > 1.0) return false;
  }
  return true;
}

}  // namespace

SceneSequence sample_sequence(const TrajectoryModel& model, const SceneConfig& cfg) {
  if (cfg.seq_len < 2 || cfg.max_targets < 1 || cfg.max_detections < 1 ||
      cfg.p_det < 0.0 || cfg.p_det > 1.0 || cfg.clutter_rate < 0.0 || cfg.sigma_z < 0.0 ||
      cfg.min_life < 2)
    throw std::invalid_argument("sample_sequence: invalid SceneConfig");
  Rng rng(cfg.seed);
  SceneSequence scene;
  const int T = cfg.seq_len;
  const int min_life = std::min(cfg.min_life, T);
  for (int i = 0; i < cfg.max_targets; ++i) {
    GtTrack track;
    track.id = i + 1;
    if (cfg.always_alive) {
      track.birth = 0;
      track.death = T - 1;
    } else {
      track.birth = static_cast<int>(rng.uniform_int(0, T - min_life));
      track.death = static_cast<int>(rng.uniform_int(track.birth + min_life - 1, T - 1));
    }
    // Rejection keeps every in-life position inside the working range.
    for (int attempt = 0; attempt < 200; ++attempt) {
      TargetState start = sample_state(model, rng);
      auto vel = sample_velocity(model, rng);
      track.states.clear();
      for (int f = track.birth; f <= track.death; ++f) {
        double dt = static_cast<double>(f - track.birth);
        track.states.push_back({start.x + vel[0] * dt, start.y + vel[1] * dt,
                                start.w + vel[2] * dt, start.h + vel[3] * dt});
      }
      if (track_in_range(track)) break;
    }
    scene.gt_tracks.push_back(std::move(track));
  }

  scene.frames.reserve(T);
  for (int f = 0; f < T; ++f) {
    // Collect this frame's detections, then shuffle them into slots so a slot
    // index carries no identity information.
    std::vector<std::pair<TargetState, int>> dets;
    for (const auto& track : scene.gt_tracks) {
      if (!track.alive_at(f)) continue;
      if (rng.uniform01() >= cfg.p_det) continue;
      TargetState z = track.state_at(f);
      z.x += rng.normal(0.0, cfg.sigma_z);
      z.y += rng.normal(0.0, cfg.sigma_z);
      z.w += rng.normal(0.0, cfg.sigma_z);
      z.h += rng.normal(0.0, cfg.sigma_z);
      dets.emplace_back(z, track.id);
    }
    int n_clutter = rng.poisson(cfg.clutter_rate);
    for (int k = 0; k < n_clutter; ++k) {
      TargetState z;
      z.x = rng.uniform(-0.5, 0.5);
      z.y = rng.uniform(-0.5, 0.5);
      z.w = rng.uniform(cfg.clutter_size_min, cfg.clutter_size_max);
      z.h = rng.uniform(cfg.clutter_size_min, cfg.clutter_size_max);
      dets.emplace_back(z, kClutter);
    }
    // Fisher-Yates with the scene rng.
    for (std::size_t k = dets.size(); k > 1; --k) {
      std::size_t j = static_cast<std::size_t>(rng.uniform_int(0, static_cast<long>(k) - 1));
      std::swap(dets[k - 1], dets[j]);
    }
    MeasurementFrame frame(cfg.max_detections);
    int n = std::min<int>(static_cast<int>(dets.size()), cfg.max_detections);
    for (int k = 0; k < n; ++k) {
      frame.slots[k] = dets[k].first;
      frame.occupied[k] = 1;
      frame.source[k] = dets[k].second;
    }
    scene.frames.push_back(std::move(frame));
  }
  return scene;
}

std::vector<SceneSequence> sample_scenes(const TrajectoryModel& model, SceneConfig cfg,
                                         std::uint64_t master_seed, int count) {
  std::vector<SceneSequence> scenes;
  scenes.reserve(count);
  for (int i = 0; i < count; ++i) {
    cfg.seed = Rng::split(master_seed, static_cast<std::uint64_t>(i));
    scenes.push_back(sample_sequence(model, cfg));
  }
  return scenes;
}

}  // namespace rectrack
