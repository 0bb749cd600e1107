#pragma once

#include "rectrack/types.hpp"

namespace rectrack {

struct EvalResult {
  double recall = 0.0;
  double precision = 0.0;
  int mostly_tracked = 0;
  int mostly_lost = 0;
  long fp = 0;
  long fn = 0;
  long id_switches = 0;
  long fragmentations = 0;
  double mota = 0.0;
  double motp = 0.0;
  long total_gt = 0;
  long matches = 0;
};

// Intersection over union of two top-left (x, y, w, h) boxes; nonpositive
// sizes give 0.
double iou(const TargetState& a, const TargetState& b);

// CLEAR evaluation. Per frame: correspondences from the previous frame are
// kept while their IoU stays at or above the threshold, then the remaining
// boxes are matched by LAP on 1-IoU with pairs under the threshold forbidden.
// An ID switch is a ground-truth track whose matched id differs from its most
// recent previously matched id; a fragmentation is any continuity break: a
// tracked frame followed by an untracked stretch that is tracked again later,
// or an id change between consecutively tracked frames. Throws
// std::invalid_argument on a duplicate id within one frame of one input.
EvalResult evaluate(const ResultsTable& gt, const ResultsTable& hyp,
                    double match_threshold = 0.5);

}  // namespace rectrack
