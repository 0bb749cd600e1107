#include "rectrack/kalman.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <algorithm>
#include <stdexcept>

#include "rectrack/error.hpp"
#include "rectrack/lap.hpp"

namespace rectrack {

namespace {

using Mat8 = Eigen::Matrix<double, 8, 8>;
using Vec8 = Eigen::Matrix<double, 8, 1>;
using Mat4 = Eigen::Matrix<double, 4, 4>;
using Vec4 = Eigen::Matrix<double, 4, 1>;
using Mat48 = Eigen::Matrix<double, 4, 8>;

Mat8 load_cov(const KalmanTrack& t) {
  Mat8 p;
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j) p(i, j) = t.cov[static_cast<std::size_t>(i) * 8 + j];
  return p;
}

void store_cov(KalmanTrack& t, const Mat8& p) {
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j) t.cov[static_cast<std::size_t>(i) * 8 + j] = p(i, j);
}

// Symmetrize, then require a successful Cholesky factorization.
void check_spd(Mat8& p, const char* where, int frame = -1) {
  p = ((p + p.transpose()) * 0.5).eval();
  Eigen::LLT<Mat8> llt(p);
  if (llt.info() != Eigen::Success) throw NumericError(where, frame);
}

Mat8 transition() {
  Mat8 f = Mat8::Identity();
  for (int d = 0; d < 4; ++d) f(d, d + 4) = 1.0;
  return f;
}

constexpr double kForbidden = 1e6;

// Per-frame bookkeeping for the heuristic variant.
struct Emission {
  int frame;
  TargetState box;
  bool matched;
};

struct TrackLog {
  int id;
  std::vector<Emission> emissions;
  int matched_frames = 0;
};

}  // namespace

KalmanTrack make_kalman_track(int id, const TargetState& z, const KalmanConfig& cfg) {
  KalmanTrack t;
  t.id = id;
  t.mean = {z.x, z.y, z.w, z.h, 0.0, 0.0, 0.0, 0.0};
  Mat8 p = Mat8::Zero();
  for (int d = 0; d < 4; ++d) {
    p(d, d) = cfg.init_pos_var;
    p(d + 4, d + 4) = 10.0 * cfg.init_pos_var;
  }
  store_cov(t, p);
  return t;
}

KalmanTrack kalman_predict(const KalmanTrack& track, double process_noise) {
  KalmanTrack out = track;
  out.age += 1;
  for (int d = 0; d < 4; ++d) out.mean[d] += out.mean[d + 4];
  Mat8 f = transition();
  Mat8 p = load_cov(track);
  p = f * p * f.transpose() + process_noise * Mat8::Identity();
  check_spd(p, "kalman_predict: covariance not positive-definite");
  store_cov(out, p);
  return out;
}

KalmanTrack kalman_update(const KalmanTrack& track, const TargetState& z, double meas_noise) {
  KalmanTrack out = track;
  Mat8 p = load_cov(track);
  Mat48 h = Mat48::Zero();
  for (int d = 0; d < 4; ++d) h(d, d) = 1.0;
  Mat4 s = h * p * h.transpose() + meas_noise * Mat4::Identity();
  Eigen::LLT<Mat4> llt(s);
  if (llt.info() != Eigen::Success)
    throw NumericError("kalman_update: singular innovation covariance");
  Eigen::Matrix<double, 8, 4> k = p * h.transpose() * llt.solve(Mat4::Identity());

  Vec4 innovation;
  auto za = z.to_array();
  for (int d = 0; d < 4; ++d) innovation(d) = za[d] - track.mean[d];
  Vec8 mean;
  for (int d = 0; d < 8; ++d) mean(d) = track.mean[d];
  mean += k * innovation;
  for (int d = 0; d < 8; ++d) out.mean[d] = mean(d);

  Mat8 ikh = Mat8::Identity() - k * h;
  p = ikh * p * ikh.transpose() + k * (meas_noise * Mat4::Identity()) * k.transpose();
  check_spd(p, "kalman_update: covariance not positive-definite");
  store_cov(out, p);
  out.misses = 0;
  return out;
}

namespace {

// Shared frame loop. When heuristics is null the track dies on its first miss
// and coasted boxes are never produced (Kalman-HA).
std::vector<TrackLog> run_kalman_common(const std::vector<MeasurementFrame>& frames,
                                        const KalmanConfig& cfg,
                                        const HeuristicConfig* heuristics) {
  const int max_misses = heuristics ? heuristics->max_misses : 0;
  const double gate = heuristics ? heuristics->gate_distance : cfg.gate_distance;

  std::vector<KalmanTrack> tracks;
  std::vector<TrackLog> logs;
  std::vector<std::size_t> log_of_track;  // parallel to tracks
  int next_id = 1;

  for (int f = 0; f < static_cast<int>(frames.size()); ++f) {
    const auto& frame = frames[f];
    std::vector<int> occupied_slots;
    for (int j = 0; j < frame.capacity(); ++j)
      if (frame.occupied[j]) occupied_slots.push_back(j);

    for (auto& t : tracks) t = kalman_predict(t, cfg.process_noise);

    std::vector<int> match_of_track(tracks.size(), kMiss);
    std::vector<char> slot_claimed(occupied_slots.size(), 0);
    if (!tracks.empty() && !occupied_slots.empty()) {
      CostMatrix c(static_cast<int>(tracks.size()), static_cast<int>(occupied_slots.size()));
      for (int i = 0; i < c.rows; ++i) {
        for (int j = 0; j < c.cols; ++j) {
          double d = euclidean(tracks[i].box(), frame.slots[occupied_slots[j]]);
          c.at(i, j) = d <= gate ? d : kForbidden;
        }
      }
      Assignment a = solve_lap(c, gate);
      for (int i = 0; i < c.rows; ++i) {
        int j = a.col_of_row[i];
        if (j != kMiss && c.at(i, j) < kForbidden) {
          match_of_track[i] = j;
          slot_claimed[j] = 1;
        }
      }
    }

    std::vector<KalmanTrack> survivors;
    std::vector<std::size_t> survivor_logs;
    for (std::size_t i = 0; i < tracks.size(); ++i) {
      TrackLog& log = logs[log_of_track[i]];
      if (match_of_track[i] != kMiss) {
        KalmanTrack t =
            kalman_update(tracks[i], frame.slots[occupied_slots[match_of_track[i]]],
                          cfg.meas_noise);
        log.emissions.push_back({f, t.box(), true});
        log.matched_frames += 1;
        survivors.push_back(t);
        survivor_logs.push_back(log_of_track[i]);
      } else {
        tracks[i].misses += 1;
        if (tracks[i].misses <= max_misses) {
          log.emissions.push_back({f, tracks[i].box(), false});
          survivors.push_back(tracks[i]);
          survivor_logs.push_back(log_of_track[i]);
        }
      }
    }

    for (std::size_t j = 0; j < occupied_slots.size(); ++j) {
      if (slot_claimed[j]) continue;
      const TargetState& z = frame.slots[occupied_slots[j]];
      KalmanTrack t = make_kalman_track(next_id++, z, cfg);
      TrackLog log;
      log.id = t.id;
      log.emissions.push_back({f, z, true});
      log.matched_frames = 1;
      logs.push_back(std::move(log));
      survivors.push_back(t);
      survivor_logs.push_back(logs.size() - 1);
    }

    tracks = std::move(survivors);
    log_of_track = std::move(survivor_logs);
  }
  return logs;
}

ResultsTable logs_to_results(std::vector<TrackLog> logs, const HeuristicConfig* heuristics) {
  ResultsTable out;
  for (auto& log : logs) {
    if (heuristics) {
      if (log.matched_frames < heuristics->min_track_length) continue;
      while (!log.emissions.empty() && !log.emissions.back().matched) log.emissions.pop_back();
    }
    for (const auto& e : log.emissions) out.push_back({e.frame, log.id, e.box});
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const OutputBox& a, const OutputBox& b) { return a.frame < b.frame; });
  return out;
}

}  // namespace

ResultsTable run_kalman_ha(const std::vector<MeasurementFrame>& frames, const KalmanConfig& cfg) {
  return logs_to_results(run_kalman_common(frames, cfg, nullptr), nullptr);
}

ResultsTable run_kalman_ha2(const std::vector<MeasurementFrame>& frames, const KalmanConfig& cfg,
                            const HeuristicConfig& heuristics) {
  if (heuristics.min_track_length < 1 || heuristics.max_misses < 0 ||
      heuristics.gate_distance <= 0.0)
    throw std::invalid_argument("run_kalman_ha2: invalid heuristics");
  return logs_to_results(run_kalman_common(frames, cfg, &heuristics), &heuristics);
}

}  // namespace rectrack
