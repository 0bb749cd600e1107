#include "rectrack/mot_csv.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "rectrack/error.hpp"

namespace rectrack {

namespace {

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find(',', start);
    if (pos == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return fields;
}

double parse_number(const std::string& field, const std::string& path, long line_no) {
  const char* begin = field.c_str();
  char* end = nullptr;
  double value = std::strtod(begin, &end);
  if (end == begin || *end != '\0' || !std::isfinite(value))
    throw ParseError(path, line_no, "malformed numeric field '" + field + "'");
  return value;
}

long parse_integer(const std::string& field, const std::string& path, long line_no) {
  double v = parse_number(field, path, line_no);
  long r = std::lround(v);
  if (std::abs(v - static_cast<double>(r)) > 1e-9)
    throw ParseError(path, line_no, "expected an integer, got '" + field + "'");
  return r;
}

void check_dims(int image_w, int image_h) {
  if (image_w <= 0 || image_h <= 0)
    throw std::invalid_argument("image dimensions must be positive");
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  return out;
}

void append_row(std::string& buf, const DetectionFileRow& r) {
  char line[256];
  std::snprintf(line, sizeof(line), "%d,%d,%.6f,%.6f,%.6f,%.6f,%.6f,-1,-1,-1\n", r.frame, r.id,
                r.bb_left, r.bb_top, r.bb_width, r.bb_height, r.confidence);
  buf += line;
}

}  // namespace

std::vector<DetectionFileRow> parse_mot_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::vector<DetectionFileRow> rows;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split_commas(line);
    if (fields.size() != 10)
      throw ParseError(path, line_no,
                       "expected 10 comma-separated fields, got " +
                           std::to_string(fields.size()));
    DetectionFileRow r;
    long frame = parse_integer(fields[0], path, line_no);
    if (frame < 1) throw ParseError(path, line_no, "frame must be >= 1");
    r.frame = static_cast<int>(frame);
    r.id = static_cast<int>(parse_integer(fields[1], path, line_no));
    r.bb_left = parse_number(fields[2], path, line_no);
    r.bb_top = parse_number(fields[3], path, line_no);
    r.bb_width = parse_number(fields[4], path, line_no);
    r.bb_height = parse_number(fields[5], path, line_no);
    r.confidence = parse_number(fields[6], path, line_no);
    for (int k = 7; k < 10; ++k) (void)parse_number(fields[k], path, line_no);
    rows.push_back(r);
  }
  return rows;
}

void write_mot_csv(const std::string& path, const std::vector<DetectionFileRow>& rows) {
  std::string buf;
  buf.reserve(rows.size() * 64);
  for (const auto& r : rows) append_row(buf, r);
  open_out(path) << buf;
}

TargetState normalize_box(double bb_left, double bb_top, double bb_width, double bb_height,
                          int image_w, int image_h) {
  check_dims(image_w, image_h);
  return {bb_left / image_w - 0.5, bb_top / image_h - 0.5, bb_width / image_w,
          bb_height / image_h};
}

DetectionFileRow denormalize_box(const TargetState& s, int frame_1based, int id, int image_w,
                                 int image_h, double confidence) {
  check_dims(image_w, image_h);
  DetectionFileRow r;
  r.frame = frame_1based;
  r.id = id;
  r.bb_left = (s.x + 0.5) * image_w;
  r.bb_top = (s.y + 0.5) * image_h;
  r.bb_width = s.w * image_w;
  r.bb_height = s.h * image_h;
  r.confidence = confidence;
  return r;
}

std::vector<MeasurementFrame> rows_to_frames(const std::vector<DetectionFileRow>& rows,
                                             int max_slots, int image_w, int image_h) {
  check_dims(image_w, image_h);
  if (max_slots < 1) throw std::invalid_argument("rows_to_frames: max_slots must be positive");
  int last_frame = 0;
  for (const auto& r : rows) last_frame = std::max(last_frame, r.frame);
  std::vector<MeasurementFrame> frames(last_frame, MeasurementFrame(max_slots));
  std::vector<int> counts(last_frame, 0);
  for (const auto& r : rows) {
    if (r.bb_width <= 0.0 || r.bb_height <= 0.0)
      throw std::invalid_argument("rows_to_frames: nonpositive box size in frame " +
                                  std::to_string(r.frame));
    int f = r.frame - 1;
    if (counts[f] >= max_slots) continue;
    int slot = counts[f]++;
    frames[f].slots[slot] = normalize_box(r.bb_left, r.bb_top, r.bb_width, r.bb_height, image_w,
                                          image_h);
    frames[f].occupied[slot] = 1;
    frames[f].source[slot] = kUnknownSource;
  }
  return frames;
}

ResultsTable rows_to_boxes(const std::vector<DetectionFileRow>& rows, int image_w, int image_h) {
  check_dims(image_w, image_h);
  ResultsTable out;
  out.reserve(rows.size());
  for (const auto& r : rows)
    out.push_back({r.frame - 1, r.id,
                   normalize_box(r.bb_left, r.bb_top, r.bb_width, r.bb_height, image_w, image_h)});
  return out;
}

void write_results_csv(const std::string& path, const ResultsTable& table, int image_w,
                       int image_h) {
  std::string buf;
  buf.reserve(table.size() * 64);
  for (const auto& b : table)
    append_row(buf, denormalize_box(b.box, b.frame + 1, b.id, image_w, image_h, 1.0));
  open_out(path) << buf;
}

ResultsTable read_results_csv(const std::string& path, int image_w, int image_h) {
  return rows_to_boxes(parse_mot_csv(path), image_w, image_h);
}

void write_scene(const std::string& det_path, const std::string& gt_path,
                 const std::string& prov_path, const SceneSequence& scene, int image_w,
                 int image_h) {
  std::vector<DetectionFileRow> det_rows;
  std::string prov;
  for (std::size_t f = 0; f < scene.frames.size(); ++f) {
    const auto& frame = scene.frames[f];
    for (int j = 0; j < frame.capacity(); ++j) {
      if (!frame.occupied[j]) continue;
      det_rows.push_back(
          denormalize_box(frame.slots[j], static_cast<int>(f) + 1, -1, image_w, image_h, 1.0));
      char line[64];
      std::snprintf(line, sizeof(line), "%d,%d,%d\n", static_cast<int>(f) + 1, j,
                    frame.source[j]);
      prov += line;
    }
  }
  write_mot_csv(det_path, det_rows);

  std::vector<DetectionFileRow> gt_rows;
  for (const auto& track : scene.gt_tracks)
    for (int f = track.birth; f <= track.death; ++f)
      gt_rows.push_back(denormalize_box(track.state_at(f), f + 1, track.id, image_w, image_h,
                                        1.0));
  std::sort(gt_rows.begin(), gt_rows.end(), [](const auto& a, const auto& b) {
    return a.frame != b.frame ? a.frame < b.frame : a.id < b.id;
  });
  write_mot_csv(gt_path, gt_rows);
  open_out(prov_path) << prov;
}

SceneSequence read_scene(const std::string& det_path, const std::string& gt_path,
                         const std::string& prov_path, int max_slots, int image_w, int image_h) {
  SceneSequence scene;
  scene.frames = rows_to_frames(parse_mot_csv(det_path), max_slots, image_w, image_h);

  std::ifstream prov(prov_path, std::ios::binary);
  if (!prov) throw std::runtime_error("cannot open: " + prov_path);
  std::string line;
  long line_no = 0;
  while (std::getline(prov, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split_commas(line);
    if (fields.size() != 3)
      throw ParseError(prov_path, line_no, "expected frame,slot,source");
    long f = parse_integer(fields[0], prov_path, line_no) - 1;
    long slot = parse_integer(fields[1], prov_path, line_no);
    long source = parse_integer(fields[2], prov_path, line_no);
    if (f < 0 || f >= static_cast<long>(scene.frames.size()) || slot < 0 ||
        slot >= max_slots || !scene.frames[f].occupied[slot])
      throw ParseError(prov_path, line_no, "provenance entry does not match a detection");
    scene.frames[f].source[slot] = static_cast<int>(source);
  }

  std::map<int, std::map<int, TargetState>> by_id;  // id -> frame -> state
  for (const auto& b : rows_to_boxes(parse_mot_csv(gt_path), image_w, image_h)) {
    if (!by_id[b.id].emplace(b.frame, b.box).second)
      throw std::invalid_argument("read_scene: duplicate gt row for id " +
                                  std::to_string(b.id));
  }
  for (const auto& [id, states] : by_id) {
    GtTrack track;
    track.id = id;
    track.birth = states.begin()->first;
    track.death = states.rbegin()->first;
    if (track.death - track.birth + 1 != static_cast<int>(states.size()))
      throw std::invalid_argument("read_scene: gt track " + std::to_string(id) +
                                  " has frame gaps");
    for (const auto& [f, s] : states) track.states.push_back(s);
    scene.gt_tracks.push_back(std::move(track));
  }
  return scene;
}

std::string summary_header() { return "Rcll,Prcn,MT,ML,FP,FN,IDs,FM,MOTA,MOTP"; }

std::string summary_row(const EvalResult& r) {
  char line[256];
  std::snprintf(line, sizeof(line), "%.6f,%.6f,%d,%d,%ld,%ld,%ld,%ld,%.6f,%.6f", r.recall,
                r.precision, r.mostly_tracked, r.mostly_lost, r.fp, r.fn, r.id_switches,
                r.fragmentations, r.mota, r.motp);
  return line;
}

void write_summary_csv(const std::string& path, const EvalResult& r) {
  open_out(path) << summary_header() << "\n" << summary_row(r) << "\n";
}

}  // namespace rectrack
