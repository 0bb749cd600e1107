#include "rectrack/config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <stdexcept>

#include "rectrack/error.hpp"

namespace rectrack {

namespace {

double to_double(const std::string& key, const std::string& value) {
  const char* begin = value.c_str();
  char* end = nullptr;
  double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0' || !std::isfinite(v))
    throw std::invalid_argument("config key '" + key + "': bad number '" + value + "'");
  return v;
}

long to_long(const std::string& key, const std::string& value) {
  double v = to_double(key, value);
  long r = std::lround(v);
  if (std::abs(v - static_cast<double>(r)) > 1e-9)
    throw std::invalid_argument("config key '" + key + "': expected an integer");
  return r;
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t");
  return s.substr(a, b - a + 1);
}

}  // namespace

void apply_config_entry(RunConfig& cfg, const std::string& key, const std::string& value) {
  using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;
  static const std::map<std::string, Setter> setters = {
      {"lr0", [](RunConfig& c, const std::string& k, const std::string& v) { c.train.lr0 = to_double(k, v); }},
      {"lr_decay", [](RunConfig& c, const std::string& k, const std::string& v) { c.train.lr_decay = to_double(k, v); }},
      {"lr_decay_every", [](RunConfig& c, const std::string& k, const std::string& v) { c.train.lr_decay_every = to_long(k, v); }},
      {"max_iterations", [](RunConfig& c, const std::string& k, const std::string& v) { c.train.max_iterations = to_long(k, v); }},
      {"batch_size", [](RunConfig& c, const std::string& k, const std::string& v) { c.train.batch_size = static_cast<int>(to_long(k, v)); }},
      {"grad_clip", [](RunConfig& c, const std::string& k, const std::string& v) { c.train.grad_clip = to_double(k, v); }},
      {"lambda", [](RunConfig& c, const std::string& k, const std::string& v) { c.loss.lambda = to_double(k, v); }},
      {"kappa", [](RunConfig& c, const std::string& k, const std::string& v) { c.loss.kappa = to_double(k, v); }},
      {"nu", [](RunConfig& c, const std::string& k, const std::string& v) { c.loss.nu = to_double(k, v); }},
      {"xi", [](RunConfig& c, const std::string& k, const std::string& v) { c.loss.xi = to_double(k, v); }},
      {"motion_hidden", [](RunConfig& c, const std::string& k, const std::string& v) { c.motion_hidden = static_cast<int>(to_long(k, v)); }},
      {"motion_update_hidden", [](RunConfig& c, const std::string& k, const std::string& v) { c.motion_update_hidden = static_cast<int>(to_long(k, v)); }},
      {"assoc_n_max", [](RunConfig& c, const std::string& k, const std::string& v) { c.assoc.n_max = static_cast<int>(to_long(k, v)); }},
      {"assoc_m_max", [](RunConfig& c, const std::string& k, const std::string& v) { c.assoc.m_max = static_cast<int>(to_long(k, v)); }},
      {"assoc_embed", [](RunConfig& c, const std::string& k, const std::string& v) { c.assoc.embed = static_cast<int>(to_long(k, v)); }},
      {"assoc_hidden", [](RunConfig& c, const std::string& k, const std::string& v) { c.assoc.hidden = static_cast<int>(to_long(k, v)); }},
      {"assoc_layers", [](RunConfig& c, const std::string& k, const std::string& v) { c.assoc.layers = static_cast<int>(to_long(k, v)); }},
      {"gen_seq_len", [](RunConfig& c, const std::string& k, const std::string& v) { c.scene.seq_len = static_cast<int>(to_long(k, v)); }},
      {"gen_max_targets", [](RunConfig& c, const std::string& k, const std::string& v) { c.scene.max_targets = static_cast<int>(to_long(k, v)); }},
      {"gen_max_detections", [](RunConfig& c, const std::string& k, const std::string& v) { c.scene.max_detections = static_cast<int>(to_long(k, v)); }},
      {"gen_p_det", [](RunConfig& c, const std::string& k, const std::string& v) { c.scene.p_det = to_double(k, v); }},
      {"gen_clutter_rate", [](RunConfig& c, const std::string& k, const std::string& v) { c.scene.clutter_rate = to_double(k, v); }},
      {"gen_sigma_z", [](RunConfig& c, const std::string& k, const std::string& v) { c.scene.sigma_z = to_double(k, v); }},
      {"gen_min_life", [](RunConfig& c, const std::string& k, const std::string& v) { c.scene.min_life = static_cast<int>(to_long(k, v)); }},
      {"existence_threshold", [](RunConfig& c, const std::string& k, const std::string& v) { c.tracker.existence_threshold = to_double(k, v); }},
      {"init_existence", [](RunConfig& c, const std::string& k, const std::string& v) { c.tracker.init_existence = to_double(k, v); }},
      {"tracker_max_targets", [](RunConfig& c, const std::string& k, const std::string& v) { c.tracker.max_targets = static_cast<int>(to_long(k, v)); }},
      {"miss_cost", [](RunConfig& c, const std::string& k, const std::string& v) { c.miss_cost = to_double(k, v); }},
      {"tracker_miss_cost", [](RunConfig& c, const std::string& k, const std::string& v) { c.tracker.miss_cost = to_double(k, v); }},
      {"pred_noise", [](RunConfig& c, const std::string& k, const std::string& v) { c.pred_noise = to_double(k, v); }},
      {"kalman_q", [](RunConfig& c, const std::string& k, const std::string& v) { c.kalman.process_noise = to_double(k, v); }},
      {"kalman_r", [](RunConfig& c, const std::string& k, const std::string& v) { c.kalman.meas_noise = to_double(k, v); }},
      {"kalman_gate", [](RunConfig& c, const std::string& k, const std::string& v) { c.kalman.gate_distance = to_double(k, v); c.heuristics.gate_distance = c.kalman.gate_distance; }},
      {"kalman_init_pos_var", [](RunConfig& c, const std::string& k, const std::string& v) { c.kalman.init_pos_var = to_double(k, v); }},
      {"ha2_min_track_length", [](RunConfig& c, const std::string& k, const std::string& v) { c.heuristics.min_track_length = static_cast<int>(to_long(k, v)); }},
      {"ha2_max_misses", [](RunConfig& c, const std::string& k, const std::string& v) { c.heuristics.max_misses = static_cast<int>(to_long(k, v)); }},
  };
  auto it = setters.find(key);
  if (it == setters.end()) throw std::invalid_argument("unknown config key '" + key + "'");
  it->second(cfg, key, value);
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config: " + path);
  RunConfig cfg;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(path, line_no, "expected key=value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    try {
      apply_config_entry(cfg, key, value);
    } catch (const std::invalid_argument& e) {
      throw ParseError(path, line_no, e.what());
    }
  }
  validate_config(cfg);
  return cfg;
}

void validate_config(const RunConfig& cfg) {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("config: ") + what);
  };
  require(cfg.train.lr0 > 0.0, "lr0 must be positive");
  require(cfg.train.lr_decay > 0.0 && cfg.train.lr_decay <= 1.0, "lr_decay must be in (0, 1]");
  require(cfg.train.lr_decay_every > 0, "lr_decay_every must be positive");
  require(cfg.train.max_iterations > 0, "max_iterations must be positive");
  require(cfg.train.batch_size > 0, "batch_size must be positive");
  require(cfg.loss.lambda >= 0.0 && cfg.loss.kappa >= 0.0 && cfg.loss.nu >= 0.0 &&
              cfg.loss.xi >= 0.0,
          "loss weights must be nonnegative");
  require(cfg.motion_hidden > 0 && cfg.motion_update_hidden > 0, "motion sizes must be positive");
  require(cfg.assoc.n_max > 0 && cfg.assoc.m_max > 0 && cfg.assoc.embed > 0 &&
              cfg.assoc.hidden > 0 && cfg.assoc.layers > 0,
          "association sizes must be positive");
  require(cfg.scene.seq_len >= 2, "gen_seq_len must be at least 2");
  require(cfg.scene.max_targets > 0, "gen_max_targets must be positive");
  require(cfg.scene.max_detections > 0, "gen_max_detections must be positive");
  require(cfg.scene.p_det >= 0.0 && cfg.scene.p_det <= 1.0, "gen_p_det must be in [0, 1]");
  require(cfg.scene.clutter_rate >= 0.0, "gen_clutter_rate must be nonnegative");
  require(cfg.scene.sigma_z >= 0.0, "gen_sigma_z must be nonnegative");
  require(cfg.scene.min_life >= 2, "gen_min_life must be at least 2");
  require(cfg.tracker.existence_threshold > 0.0 && cfg.tracker.existence_threshold < 1.0,
          "existence_threshold must be in (0, 1)");
  require(cfg.tracker.init_existence >= 0.0 && cfg.tracker.init_existence <= 1.0,
          "init_existence must be in [0, 1]");
  require(cfg.tracker.max_targets > 0, "tracker_max_targets must be positive");
  require(cfg.miss_cost > 0.0, "miss_cost must be positive");
  require(cfg.tracker.miss_cost > 0.0, "tracker_miss_cost must be positive");
  require(cfg.pred_noise >= 0.0, "pred_noise must be nonnegative");
  require(cfg.kalman.process_noise > 0.0 && cfg.kalman.meas_noise > 0.0,
          "kalman noise terms must be positive");
  require(cfg.kalman.gate_distance > 0.0, "kalman_gate must be positive");
  require(cfg.kalman.init_pos_var > 0.0, "kalman_init_pos_var must be positive");
  require(cfg.heuristics.min_track_length >= 1, "ha2_min_track_length must be at least 1");
  require(cfg.heuristics.max_misses >= 0, "ha2_max_misses must be nonnegative");
}

}  // namespace rectrack
