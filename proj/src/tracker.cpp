#include "rectrack/tracker.hpp"

#include <algorithm>
#include <chrono>
#include <stdexcept>

namespace rectrack {

RnnTracker::RnnTracker(const MotionNet& motion, const AssocNet* assoc, const TrackerConfig& cfg)
    : motion_(motion), assoc_(assoc), cfg_(cfg) {
  if (!(cfg.existence_threshold > 0.0 && cfg.existence_threshold < 1.0))
    throw std::invalid_argument("RnnTracker: existence_threshold must be in (0, 1)");
  if (!(cfg.init_existence >= 0.0 && cfg.init_existence <= 1.0))
    throw std::invalid_argument("RnnTracker: init_existence must be in [0, 1]");
  if (cfg.max_targets < 1) throw std::invalid_argument("RnnTracker: max_targets must be positive");
  if (cfg.assoc_mode == AssocMode::lstm) {
    if (!assoc) throw std::invalid_argument("RnnTracker: lstm mode needs an association net");
    if (cfg.max_targets > assoc->cfg.n_max)
      throw std::invalid_argument("RnnTracker: max_targets exceeds association net capacity");
  }
}

void RnnTracker::step_frame(const MeasurementFrame& frame, ResultsTable& out) {
  const int m = frame.capacity();
  std::vector<char> claimed(m, 0);

  if (!tracks_.empty()) {
    const int n = static_cast<int>(tracks_.size());
    std::vector<Vec> x_star(n), h_next(n);
    std::vector<TargetState> predicted(n);
    for (int i = 0; i < n; ++i) {
      auto xa = tracks_[i].state.to_array();
      motion_predict(motion_, xa, tracks_[i].hidden, x_star[i], h_next[i]);
      predicted[i] = TargetState::from_span(x_star[i]);
    }

    CostMatrix c = build_cost_matrix(predicted, frame);
    // One assignment row per track, miss probability last.
    std::vector<Vec> rows(n);
    if (cfg_.assoc_mode == AssocMode::hungarian) {
      Assignment a = solve_lap(c, cfg_.miss_cost);
      for (int i = 0; i < n; ++i) {
        Vec row(m + 1, 0.0);
        int j = a.col_of_row[i];
        if (j != kMiss && frame.occupied[j]) {
          row[j] = 1.0;
          claimed[j] = 1;
        } else {
          row[m] = 1.0;
        }
        rows[i] = std::move(row);
      }
    } else {
      AssignmentMatrix a = assoc_forward(*assoc_, c);
      Assignment hard = infer_hard_assignment(a, cfg_.claim_mode);
      for (int i = 0; i < n; ++i) {
        int j = hard.col_of_row[i];
        if (j != kMiss && frame.occupied[j]) claimed[j] = 1;
        rows[i] = Vec(a.row(i).begin(), a.row(i).end());
      }
    }

    for (int i = 0; i < n; ++i) {
      Vec a_eff;
      Vec x_hat = weighted_input(frame, rows[i], x_star[i], &a_eff);
      Vec cat;
      cat.reserve(2 * kStateDim + h_next[i].size());
      cat.insert(cat.end(), x_hat.begin(), x_hat.end());
      cat.insert(cat.end(), x_star[i].begin(), x_star[i].end());
      cat.insert(cat.end(), h_next[i].begin(), h_next[i].end());
      Vec u = motion_.update_in.forward(cat);
      for (double& v : u) v = std::tanh(v);
      Vec x = motion_.update_out.forward(u);

      auto [e, e_diff] = motion_existence(motion_, h_next[i], tracks_[i].existence, a_eff.back());
      tracks_[i].state = TargetState::from_span(x);
      tracks_[i].hidden = std::move(h_next[i]);
      tracks_[i].existence = e;
    }

    std::erase_if(tracks_, [&](const LiveTrack& t) {
      return t.existence < cfg_.existence_threshold;
    });

    for (auto& t : tracks_) {
      out.push_back({frame_, t.id, t.state});
      t.history.emplace_back(frame_, t.state);
    }
  }

  for (int j = 0; j < m; ++j) {
    if (!frame.occupied[j] || claimed[j]) continue;
    LiveTrack t;
    t.id = next_id_++;
    t.state = frame.slots[j];
    t.hidden = Vec(motion_.hidden_size, 0.0);
    t.existence = cfg_.init_existence;
    tracks_.push_back(std::move(t));
  }

  while (static_cast<int>(tracks_.size()) > cfg_.max_targets) {
    auto weakest = tracks_.begin();
    for (auto it = tracks_.begin(); it != tracks_.end(); ++it)
      if (it->existence <= weakest->existence) weakest = it;  // ties drop the newest
    tracks_.erase(weakest);
  }

  frame_ += 1;
}

ResultsTable run_sequence(const MotionNet& motion, const AssocNet* assoc,
                          const TrackerConfig& cfg, const std::vector<MeasurementFrame>& frames,
                          RunStats* stats) {
  RnnTracker tracker(motion, assoc, cfg);
  ResultsTable out;
  double seconds = 0.0;
  for (const auto& frame : frames) {
    auto t0 = std::chrono::steady_clock::now();
    tracker.step_frame(frame, out);
    auto t1 = std::chrono::steady_clock::now();
    seconds += std::chrono::duration<double>(t1 - t0).count();
  }
  if (stats) {
    stats->frames = static_cast<long>(frames.size());
    stats->seconds = seconds;
  }
  return out;
}

}  // namespace rectrack
