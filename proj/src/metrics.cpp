#include "rectrack/metrics.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>
#include <vector>

#include "rectrack/lap.hpp"

namespace rectrack {

double iou(const TargetState& a, const TargetState& b) {
  if (a.w <= 0.0 || a.h <= 0.0 || b.w <= 0.0 || b.h <= 0.0) return 0.0;
  double ix = std::max(a.x, b.x);
  double iy = std::max(a.y, b.y);
  double ix2 = std::min(a.x + a.w, b.x + b.w);
  double iy2 = std::min(a.y + a.h, b.y + b.h);
  double iw = ix2 - ix;
  double ih = iy2 - iy;
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  double inter = iw * ih;
  double uni = a.w * a.h + b.w * b.h - inter;
  // (x+w)-x need not round back to w, so the ratio can land a few ulps above 1.
  return std::min(1.0, inter / uni);
}

namespace {

constexpr double kForbidden = 1e6;
constexpr double kMissCost = 2.0;  // above any admissible pair, below two of them

using FrameIndex = std::map<int, std::vector<const OutputBox*>>;

// Grouping preserves input order within a frame, so evaluation depends on box
// order but never on the numeric value of hypothesis ids.
FrameIndex group_by_frame(const ResultsTable& table, const char* side) {
  FrameIndex index;
  for (const auto& box : table) index[box.frame].push_back(&box);
  for (const auto& [frame, boxes] : index) {
    std::set<int> ids;
    for (const auto* b : boxes)
      if (!ids.insert(b->id).second)
        throw std::invalid_argument(std::string("evaluate: duplicate ") + side +
                                    " id in frame " + std::to_string(frame));
  }
  return index;
}

struct GtTrackState {
  int last_hyp = 0;
  bool matched_ever = false;
  bool matched_at_last_presence = false;
  bool in_gap = false;
  long frames_total = 0;
  long frames_matched = 0;
};

}  // namespace

EvalResult evaluate(const ResultsTable& gt, const ResultsTable& hyp, double match_threshold) {
  FrameIndex gt_frames = group_by_frame(gt, "gt");
  FrameIndex hyp_frames = group_by_frame(hyp, "hyp");

  std::set<int> frames;
  for (const auto& [f, _] : gt_frames) frames.insert(f);
  for (const auto& [f, _] : hyp_frames) frames.insert(f);

  std::map<int, GtTrackState> states;
  std::map<int, int> prev_corr;  // gt id -> hyp id matched in the previous frame
  EvalResult r;
  double iou_sum = 0.0;

  for (int f : frames) {
    static const std::vector<const OutputBox*> kEmpty;
    const auto git = gt_frames.find(f);
    const auto hit = hyp_frames.find(f);
    const auto& gts = git == gt_frames.end() ? kEmpty : git->second;
    const auto& hyps = hit == hyp_frames.end() ? kEmpty : hit->second;

    std::vector<int> match_of_gt(gts.size(), -1);  // index into hyps
    std::vector<char> hyp_used(hyps.size(), 0);

    // Keep surviving correspondences first.
    for (std::size_t i = 0; i < gts.size(); ++i) {
      auto corr = prev_corr.find(gts[i]->id);
      if (corr == prev_corr.end()) continue;
      for (std::size_t j = 0; j < hyps.size(); ++j) {
        if (hyp_used[j] || hyps[j]->id != corr->second) continue;
        if (iou(gts[i]->box, hyps[j]->box) >= match_threshold) {
          match_of_gt[i] = static_cast<int>(j);
          hyp_used[j] = 1;
        }
        break;
      }
    }

    // LAP over what is left.
    std::vector<int> free_gt, free_hyp;
    for (std::size_t i = 0; i < gts.size(); ++i)
      if (match_of_gt[i] < 0) free_gt.push_back(static_cast<int>(i));
    for (std::size_t j = 0; j < hyps.size(); ++j)
      if (!hyp_used[j]) free_hyp.push_back(static_cast<int>(j));
    if (!free_gt.empty() && !free_hyp.empty()) {
      CostMatrix c(static_cast<int>(free_gt.size()), static_cast<int>(free_hyp.size()));
      for (int i = 0; i < c.rows; ++i) {
        for (int j = 0; j < c.cols; ++j) {
          double v = iou(gts[free_gt[i]]->box, hyps[free_hyp[j]]->box);
          c.at(i, j) = v >= match_threshold ? 1.0 - v : kForbidden;
        }
      }
      Assignment a = solve_lap(c, kMissCost);
      for (int i = 0; i < c.rows; ++i) {
        int j = a.col_of_row[i];
        if (j != kMiss && c.at(i, j) < kForbidden) {
          match_of_gt[free_gt[i]] = free_hyp[j];
          hyp_used[free_hyp[j]] = 1;
        }
      }
    }

    prev_corr.clear();
    for (std::size_t i = 0; i < gts.size(); ++i) {
      GtTrackState& st = states[gts[i]->id];
      st.frames_total += 1;
      if (match_of_gt[i] >= 0) {
        const OutputBox* h = hyps[match_of_gt[i]];
        r.matches += 1;
        iou_sum += iou(gts[i]->box, h->box);
        if (st.matched_ever && st.last_hyp != h->id) r.id_switches += 1;
        if (st.in_gap)
          r.fragmentations += 1;
        else if (st.matched_at_last_presence && st.last_hyp != h->id)
          r.fragmentations += 1;
        st.last_hyp = h->id;
        st.matched_ever = true;
        st.in_gap = false;
        st.matched_at_last_presence = true;
        st.frames_matched += 1;
        prev_corr[gts[i]->id] = h->id;
      } else {
        r.fn += 1;
        if (st.matched_ever) st.in_gap = true;
        st.matched_at_last_presence = false;
      }
    }
    for (std::size_t j = 0; j < hyps.size(); ++j)
      if (!hyp_used[j]) r.fp += 1;
  }

  r.total_gt = static_cast<long>(gt.size());
  for (const auto& [id, st] : states) {
    double coverage =
        st.frames_total == 0 ? 0.0 : static_cast<double>(st.frames_matched) / st.frames_total;
    if (coverage > 0.8) r.mostly_tracked += 1;
    if (coverage < 0.2) r.mostly_lost += 1;
  }
  r.recall = r.total_gt == 0 ? 0.0 : static_cast<double>(r.matches) / r.total_gt;
  long emitted = r.matches + r.fp;
  r.precision = emitted == 0 ? 0.0 : static_cast<double>(r.matches) / emitted;
  r.motp = r.matches == 0 ? 0.0 : iou_sum / r.matches;
  long errors = r.fn + r.fp + r.id_switches;
  r.mota = r.total_gt == 0 ? (errors == 0 ? 1.0 : 0.0)
                           : 1.0 - static_cast<double>(errors) / r.total_gt;
  return r;
}

}  // namespace rectrack
