#pragma once

#include <string>

#include "rectrack/assoc.hpp"
#include "rectrack/datagen.hpp"
#include "rectrack/kalman.hpp"
#include "rectrack/motion.hpp"
#include "rectrack/nn.hpp"
#include "rectrack/tracker.hpp"

namespace rectrack {

// Every tunable in one place, with the published defaults. Loaded from flat
// key=value files ('#' starts a comment); unknown keys are rejected.
struct RunConfig {
  TrainConfig train;
  LossWeights loss;
  int motion_hidden = 300;
  int motion_update_hidden = 64;
  AssocConfig assoc;
  SceneConfig scene;
  TrackerConfig tracker;
  KalmanConfig kalman;
  HeuristicConfig heuristics;
  double pred_noise = 0.02;  // association training: noise faking predictions
  double miss_cost = 0.1;    // LAP miss cost for association labels and the oracle
};

// Throws std::invalid_argument naming the key on unknown keys or values that
// fail validation.
void apply_config_entry(RunConfig& cfg, const std::string& key, const std::string& value);

// Throws ParseError with the line number on lines that are not key=value.
RunConfig load_run_config(const std::string& path);

void validate_config(const RunConfig& cfg);

}  // namespace rectrack
