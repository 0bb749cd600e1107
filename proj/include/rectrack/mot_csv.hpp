#pragma once

#include <string>
#include <vector>

#include "rectrack/datagen.hpp"
#include "rectrack/metrics.hpp"
#include "rectrack/types.hpp"

namespace rectrack {

// One line of the detection/ground-truth interchange format:
// frame,id,bb_left,bb_top,bb_width,bb_height,conf,-1,-1,-1 with 1-based frames
// and id -1 for raw detections. Pixel coordinates.
struct DetectionFileRow {
  int frame = 1;
  int id = -1;
  double bb_left = 0.0;
  double bb_top = 0.0;
  double bb_width = 0.0;
  double bb_height = 0.0;
  double confidence = 1.0;
};

// Synthetic scenes have no camera; files use a fixed virtual image size.
inline constexpr int kVirtualImageW = 1000;
inline constexpr int kVirtualImageH = 1000;

// Throws ParseError (with the 1-based line number) on a malformed row; an
// empty file gives an empty vector.
std::vector<DetectionFileRow> parse_mot_csv(const std::string& path);

void write_mot_csv(const std::string& path, const std::vector<DetectionFileRow>& rows);

// x' = x/W - 0.5, y' = y/H - 0.5, w' = w/W, h' = h/H.
TargetState normalize_box(double bb_left, double bb_top, double bb_width, double bb_height,
                          int image_w, int image_h);
DetectionFileRow denormalize_box(const TargetState& s, int frame_1based, int id, int image_w,
                                 int image_h, double confidence = 1.0);

// Detections grouped into fixed-capacity frames covering frames 1..max(frame).
// Rows beyond capacity are dropped in file order. Detection provenance is
// unknown. Enforces positive sizes.
std::vector<MeasurementFrame> rows_to_frames(const std::vector<DetectionFileRow>& rows,
                                             int max_slots, int image_w, int image_h);

// Generic (frame, id, box) view used for gt and results files; frames become
// 0-based internally.
ResultsTable rows_to_boxes(const std::vector<DetectionFileRow>& rows, int image_w, int image_h);

void write_results_csv(const std::string& path, const ResultsTable& table, int image_w,
                       int image_h);
ResultsTable read_results_csv(const std::string& path, int image_w, int image_h);

// det file (id -1), gt file (track ids), and a provenance sidecar
// (frame,slot,source) tying each detection slot to its origin.
void write_scene(const std::string& det_path, const std::string& gt_path,
                 const std::string& prov_path, const SceneSequence& scene, int image_w,
                 int image_h);
SceneSequence read_scene(const std::string& det_path, const std::string& gt_path,
                         const std::string& prov_path, int max_slots, int image_w, int image_h);

// One-row summary in Table order: Rcll,Prcn,MT,ML,FP,FN,IDs,FM,MOTA,MOTP.
std::string summary_header();
std::string summary_row(const EvalResult& r);
void write_summary_csv(const std::string& path, const EvalResult& r);

}  // namespace rectrack
