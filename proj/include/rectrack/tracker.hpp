#pragma once

#include <utility>
#include <vector>

#include "rectrack/assoc.hpp"
#include "rectrack/motion.hpp"
#include "rectrack/types.hpp"

namespace rectrack {

enum class AssocMode { hungarian, lstm };

struct TrackerConfig {
  double existence_threshold = 0.6;
  double init_existence = 0.5;
  AssocMode assoc_mode = AssocMode::hungarian;
  int max_targets = 10;
  // LAP miss cost in hungarian mode. Doubles as a distance gate: detections
  // farther than this from every prediction stay unclaimed, so a coasting
  // track cannot refresh its existence from passing clutter.
  double miss_cost = 0.1;
  HardAssignMode claim_mode = HardAssignMode::argmax;  // detection claiming in lstm mode
};

struct LiveTrack {
  int id = 0;
  TargetState state{};
  Vec hidden;
  double existence = 0.5;
  std::vector<std::pair<int, TargetState>> history;  // emitted (frame, box), frames increasing
};

// Online loop: per frame predict all tracks, associate, update states and
// existence, drop tracks under the threshold, then spawn a candidate per
// unclaimed detection. Candidates start below the threshold and are only
// emitted once their existence reaches it; outputs for a frame are final.
class RnnTracker {
 public:
  // assoc may be null in hungarian mode; in lstm mode max_targets must fit the
  // association net's capacity.
  RnnTracker(const MotionNet& motion, const AssocNet* assoc, const TrackerConfig& cfg);

  // Appends this frame's boxes (0-based frame index) to out.
  void step_frame(const MeasurementFrame& frame, ResultsTable& out);

  const std::vector<LiveTrack>& live_tracks() const { return tracks_; }
  int frames_processed() const { return frame_; }

 private:
  const MotionNet& motion_;
  const AssocNet* assoc_;
  TrackerConfig cfg_;
  std::vector<LiveTrack> tracks_;
  int next_id_ = 1;
  int frame_ = 0;
};

struct RunStats {
  long frames = 0;
  double seconds = 0.0;
  double fps() const { return seconds > 0.0 ? frames / seconds : 0.0; }
};

ResultsTable run_sequence(const MotionNet& motion, const AssocNet* assoc,
                          const TrackerConfig& cfg, const std::vector<MeasurementFrame>& frames,
                          RunStats* stats = nullptr);

}  // namespace rectrack
