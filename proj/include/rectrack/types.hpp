#pragma once

#include <array>
#include <cmath>
#include <span>
#include <vector>

namespace rectrack {

// State dimensionality: a bounding box (x, y, w, h).
inline constexpr int kStateDim = 4;

// One target's bounding box in normalized image coordinates: x, y are the
// top-left corner mapped to [-0.5, 0.5], w and h are fractions of the image
// width and height.
struct TargetState {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;

  std::array<double, kStateDim> to_array() const { return {x, y, w, h}; }
  static TargetState from_span(std::span<const double> v) { return {v[0], v[1], v[2], v[3]}; }
  bool finite() const {
    return std::isfinite(x) && std::isfinite(y) && std::isfinite(w) && std::isfinite(h);
  }
};

inline double euclidean(const TargetState& a, const TargetState& b) {
  double dx = a.x - b.x, dy = a.y - b.y, dw = a.w - b.w, dh = a.h - b.h;
  return std::sqrt(dx * dx + dy * dy + dw * dw + dh * dh);
}

// Detection provenance tags inside generated scenes.
inline constexpr int kClutter = -1;
inline constexpr int kUnknownSource = -2;

// Up to max_slots detections for one frame. Empty slots hold the zero box and
// are marked unoccupied; consumers must consult the mask before using a slot.
struct MeasurementFrame {
  std::vector<TargetState> slots;
  std::vector<char> occupied;
  std::vector<int> source;  // gt track id, kClutter, or kUnknownSource

  MeasurementFrame() = default;
  explicit MeasurementFrame(int max_slots)
      : slots(max_slots), occupied(max_slots, 0), source(max_slots, kUnknownSource) {}

  int capacity() const { return static_cast<int>(slots.size()); }
  int count() const {
    int n = 0;
    for (char o : occupied) n += o != 0;
    return n;
  }
};

// Ground-truth trajectory: states cover frames [birth, death] inclusive
// (frame numbers are 0-based internally, 1-based only in MOT CSV files).
struct GtTrack {
  int id = 0;
  int birth = 0;
  int death = 0;
  std::vector<TargetState> states;

  int length() const { return death - birth + 1; }
  bool alive_at(int frame) const { return frame >= birth && frame <= death; }
  const TargetState& state_at(int frame) const { return states[frame - birth]; }
};

// One tracker (or ground truth) box emission.
struct OutputBox {
  int frame = 0;  // 0-based
  int id = 0;
  TargetState box;
};

using ResultsTable = std::vector<OutputBox>;

ResultsTable tracks_to_boxes(const std::vector<GtTrack>& tracks);

}  // namespace rectrack
