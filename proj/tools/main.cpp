#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rectrack/assoc.hpp"
#include "rectrack/config.hpp"
#include "rectrack/datagen.hpp"
#include "rectrack/error.hpp"
#include "rectrack/gradcheck_suite.hpp"
#include "rectrack/kalman.hpp"
#include "rectrack/metrics.hpp"
#include "rectrack/model_io.hpp"
#include "rectrack/mot_csv.hpp"
#include "rectrack/motion.hpp"
#include "rectrack/tracker.hpp"

namespace rt = rectrack;

namespace {

// Shared --config/--set handling. Bad keys or values are usage errors.
struct ConfigOpts {
  std::string config_path;
  std::vector<std::string> sets;

  void attach(CLI::App* sub) {
    sub->add_option("--config", config_path, "flat key=value config file")
        ->check(CLI::ExistingFile);
    sub->add_option("--set", sets, "override one config entry (KEY=VALUE, repeatable)");
  }

  rt::RunConfig load() const {
    rt::RunConfig cfg;
    if (!config_path.empty()) cfg = rt::load_run_config(config_path);
    try {
      for (const std::string& kv : sets) {
        auto eq = kv.find('=');
        if (eq == std::string::npos)
          throw std::invalid_argument("--set expects KEY=VALUE, got '" + kv + "'");
        rt::apply_config_entry(cfg, kv.substr(0, eq), kv.substr(eq + 1));
      }
      rt::validate_config(cfg);
    } catch (const std::invalid_argument& e) {
      throw CLI::ValidationError("config", e.what());
    }
    return cfg;
  }
};

std::string scene_path(const std::string& dir, int index, const char* kind) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "scene_%03d_%s.csv", index, kind);
  return (std::filesystem::path(dir) / buf).string();
}

void write_curve_csv(const std::string& path, const std::vector<rt::TrainLogRow>& log,
                     const std::array<const char*, 4>& term_names) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << "iteration,lr,loss";
  for (const char* name : term_names)
    if (name) out << ',' << name;
  out << '\n';
  char buf[256];
  for (const auto& row : log) {
    int n = std::snprintf(buf, sizeof(buf), "%ld,%.8f,%.6f", row.iteration, row.lr, row.loss);
    out.write(buf, n);
    for (std::size_t k = 0; k < term_names.size(); ++k) {
      if (!term_names[k]) continue;
      n = std::snprintf(buf, sizeof(buf), ",%.6f", row.breakdown[k]);
      out.write(buf, n);
    }
    out.put('\n');
  }
  if (!out) throw std::runtime_error("failed writing " + path);
}

// Interleaves `frac` of indices evenly: true on index i when the running
// count floor((i+1)*frac) advances.
bool interleaved(int i, double frac) {
  return static_cast<long>((i + 1) * frac) > static_cast<long>(i * frac);
}

// ---------------------------------------------------------------- gen-data

struct GenDataOpts {
  ConfigOpts config;
  std::string out_dir;
  int scenes = 10;
  std::uint64_t seed = 1;
};

void run_gen_data(const GenDataOpts& opt) {
  rt::RunConfig cfg = opt.config.load();
  std::filesystem::create_directories(opt.out_dir);
  auto model = rt::default_trajectory_model();
  auto scenes = rt::sample_scenes(model, cfg.scene, opt.seed, opt.scenes);
  for (int i = 0; i < opt.scenes; ++i)
    rt::write_scene(scene_path(opt.out_dir, i, "det"), scene_path(opt.out_dir, i, "gt"),
                    scene_path(opt.out_dir, i, "prov"), scenes[i], rt::kVirtualImageW,
                    rt::kVirtualImageH);
  std::cout << "wrote " << opt.scenes << " scenes to " << opt.out_dir << "\n";
}

// ------------------------------------------------------------- train-motion

struct TrainMotionOpts {
  ConfigOpts config;
  std::string out_path;
  std::string curve_path;
  int scenes = 300;
  std::uint64_t seed = 1;
  double p_det = 0.8;
  double always_alive_frac = 0.3;
  int extend_past_death = 5;
  std::vector<double> sigma_mix = {0.01, 0.01, 0.005, 0.0};
  int clutter_per_scene = -1;
  int clutter_window_len = 6;
  long exist_iterations = 30000;
  int log_every = 200;
};

void run_train_motion(const TrainMotionOpts& opt) {
  rt::RunConfig cfg = opt.config.load();
  auto model = rt::default_trajectory_model();

  // Training mix: a lowered detection rate plus a share of never-dying tracks
  // teaches the existence head that one missed frame is usually survivable
  // while a sustained gap is not; cycling the measurement noise down to zero
  // keeps the prediction head sharp on clean tracks.
  std::vector<rt::MotionInstance> data;
  std::vector<rt::MotionInstance> clutter;
  for (int i = 0; i < opt.scenes; ++i) {
    rt::SceneConfig sc = cfg.scene;
    sc.p_det = opt.p_det;
    sc.always_alive = interleaved(i, opt.always_alive_frac);
    if (!opt.sigma_mix.empty()) sc.sigma_z = opt.sigma_mix[i % opt.sigma_mix.size()];
    sc.seed = rt::Rng::split(opt.seed, static_cast<std::uint64_t>(i));
    auto scene = rt::sample_sequence(model, sc);
    auto inst = rt::make_motion_instances(scene, opt.extend_past_death);
    data.insert(data.end(), std::make_move_iterator(inst.begin()),
                std::make_move_iterator(inst.end()));
    if (opt.clutter_per_scene != 0) {
      auto neg = rt::make_clutter_instances(scene, opt.clutter_window_len, opt.clutter_per_scene);
      clutter.insert(clutter.end(), std::make_move_iterator(neg.begin()),
                     std::make_move_iterator(neg.end()));
    }
  }
  if (data.empty()) throw std::runtime_error("train-motion: no training instances generated");

  rt::MotionNet net(cfg.motion_hidden, cfg.motion_update_hidden);
  rt::Rng init_rng(rt::Rng::split(opt.seed, 0xA11));
  net.init(init_rng);

  rt::Rng train_rng(rt::Rng::split(opt.seed, 0xB22));
  std::vector<rt::TrainLogRow> log;
  auto result = rt::train_motion(net, data, cfg.loss, cfg.train, train_rng,
                                 opt.curve_path.empty() ? nullptr : &log, opt.log_every);

  // All-miss clutter windows would pull the shared core away from its motion
  // task, so they only enter a second phase that steps the existence head
  // alone: candidates that are never re-detected learn to die without costing
  // prediction accuracy.
  const std::size_t track_windows = data.size();
  long exist_iters = 0;
  if (!clutter.empty() && opt.exist_iterations > 0) {
    data.insert(data.end(), std::make_move_iterator(clutter.begin()),
                std::make_move_iterator(clutter.end()));
    rt::TrainConfig tc2 = cfg.train;
    tc2.max_iterations = opt.exist_iterations;
    std::array<rt::Param*, 1> head = {&net.exist_head.w};
    std::vector<rt::TrainLogRow> log2;
    auto fine = rt::train_motion(net, data, cfg.loss, tc2, train_rng,
                                 opt.curve_path.empty() ? nullptr : &log2, opt.log_every, head);
    exist_iters = fine.iterations;
    for (auto& row : log2) {
      row.iteration += result.iterations;
      log.push_back(row);
    }
  }

  rt::save_motion_net(opt.out_path, net,
                      static_cast<std::uint64_t>(result.iterations + exist_iters));
  if (!opt.curve_path.empty())
    write_curve_csv(opt.curve_path, log, {"pred", "update", "exist", "smooth"});
  std::cout << "trained motion net on " << track_windows << " track windows (" << opt.scenes
            << " scenes): iterations=" << result.iterations << " loss=" << result.final_loss
            << "\n";
  if (exist_iters > 0)
    std::cout << "existence fine-tune on " << data.size() << " windows (+"
              << data.size() - track_windows << " clutter): iterations=" << exist_iters << "\n";
  std::cout << "saved " << opt.out_path << "\n";
}

// -------------------------------------------------------------- train-assoc

struct TrainAssocOpts {
  ConfigOpts config;
  std::string out_path;
  std::string curve_path;
  int scenes = 1000;
  int holdout = 100;
  std::uint64_t seed = 1;
  bool provenance_labels = false;
  double synthetic_frac = 0.3;
  int log_every = 200;
};

void run_train_assoc(const TrainAssocOpts& opt) {
  rt::RunConfig cfg = opt.config.load();
  if (cfg.scene.max_targets > cfg.assoc.n_max || cfg.scene.max_detections > cfg.assoc.m_max)
    throw std::runtime_error("train-assoc: scene capacity exceeds assoc_n_max/assoc_m_max");
  auto model = rt::default_trajectory_model();

  rt::AssocDataConfig dcfg;
  dcfg.pred_noise = cfg.pred_noise;
  dcfg.miss_cost = cfg.miss_cost;
  dcfg.provenance_labels = opt.provenance_labels;

  rt::SeparatedInstanceConfig icfg;
  icfg.match_noise =
      std::sqrt(cfg.pred_noise * cfg.pred_noise + cfg.scene.sigma_z * cfg.scene.sigma_z);
  icfg.miss_cost = cfg.miss_cost;

  rt::Rng data_rng(rt::Rng::split(opt.seed, 0xC33));
  std::vector<rt::AssocInstance> data;
  for (int i = 0; i < opt.scenes; ++i) {
    rt::SceneConfig sc = cfg.scene;
    sc.seed = rt::Rng::split(opt.seed, static_cast<std::uint64_t>(i));
    auto inst = rt::make_assoc_instances(rt::sample_sequence(model, sc), dcfg, data_rng);
    data.insert(data.end(), std::make_move_iterator(inst.begin()),
                std::make_move_iterator(inst.end()));
  }
  if (data.empty()) throw std::runtime_error("train-assoc: no training instances generated");
  // Scene frames rarely show the clean well-separated geometry the evaluation
  // probes, so a slice of diagonal-dominant instances joins the pool.
  const std::size_t scene_instances = data.size();
  if (opt.synthetic_frac > 0.0) {
    auto synth = static_cast<long>(std::lround(
        scene_instances * opt.synthetic_frac / (1.0 - opt.synthetic_frac)));
    for (long i = 0; i < synth; ++i)
      data.push_back(
          rt::make_separated_instance(cfg.assoc.n_max, cfg.assoc.m_max, icfg, data_rng));
  }

  rt::AssocNet net(cfg.assoc);
  rt::Rng init_rng(rt::Rng::split(opt.seed, 0xA12));
  net.init(init_rng);

  rt::Rng train_rng(rt::Rng::split(opt.seed, 0xB23));
  std::vector<rt::TrainLogRow> log;
  auto result = rt::train_assoc(net, data, cfg.train, train_rng,
                                opt.curve_path.empty() ? nullptr : &log, opt.log_every);

  rt::save_assoc_net(opt.out_path, net, static_cast<std::uint64_t>(result.iterations));
  if (!opt.curve_path.empty())
    write_curve_csv(opt.curve_path, log, {"nll", nullptr, nullptr, nullptr});
  std::cout << "trained assoc net on " << data.size() << " frames (" << scene_instances
            << " from " << opt.scenes << " scenes, " << data.size() - scene_instances
            << " synthetic): iterations=" << result.iterations << " loss=" << result.final_loss
            << "\n";

  if (opt.holdout > 0) {
    std::vector<rt::AssocInstance> held;
    for (int i = 0; i < opt.holdout; ++i) {
      rt::SceneConfig sc = cfg.scene;
      sc.seed = rt::Rng::split(opt.seed ^ 0x5EEDF00DULL, static_cast<std::uint64_t>(i));
      auto inst = rt::make_assoc_instances(rt::sample_sequence(model, sc), dcfg, data_rng);
      held.insert(held.end(), std::make_move_iterator(inst.begin()),
                  std::make_move_iterator(inst.end()));
    }
    auto agree = rt::oracle_agreement(net, held, cfg.miss_cost);
    std::printf("holdout oracle agreement: %ld/%ld = %.4f\n", agree.matches, agree.rows,
                agree.rate());
    rt::Rng sep_rng(rt::Rng::split(opt.seed, 0xD44));
    std::vector<rt::AssocInstance> sep;
    for (int i = 0; i < 1000; ++i)
      sep.push_back(rt::make_separated_instance(cfg.assoc.n_max, cfg.assoc.m_max, icfg, sep_rng));
    auto sagree = rt::oracle_agreement(net, sep, cfg.miss_cost);
    std::printf("separated oracle agreement: %ld/%ld = %.4f\n", sagree.matches, sagree.rows,
                sagree.rate());
  }
  std::cout << "saved " << opt.out_path << "\n";
}

// -------------------------------------------------------------------- track

struct TrackOpts {
  ConfigOpts config;
  std::string det_path;
  std::string out_path;
  std::string tracker = "rnn_ha";
  std::string model_path;
  std::string assoc_model_path;
  std::string existence_path;
  std::string claim = "argmax";
  int max_slots = 10;
  int image_w = rt::kVirtualImageW;
  int image_h = rt::kVirtualImageH;
};

void run_track(const TrackOpts& opt) {
  const bool rnn = opt.tracker == "rnn_ha" || opt.tracker == "rnn_lstm";
  if (rnn && opt.model_path.empty())
    throw CLI::ValidationError("track", "--model is required with --tracker " + opt.tracker);
  if (opt.tracker == "rnn_lstm" && opt.assoc_model_path.empty())
    throw CLI::ValidationError("track", "--assoc-model is required with --tracker rnn_lstm");
  if (!rnn && !opt.existence_path.empty())
    throw CLI::ValidationError("track", "--existence-out requires an rnn tracker");

  rt::RunConfig cfg = opt.config.load();
  auto rows = rt::parse_mot_csv(opt.det_path);
  auto frames = rt::rows_to_frames(rows, opt.max_slots, opt.image_w, opt.image_h);

  rt::ResultsTable results;
  rt::RunStats stats;
  if (rnn) {
    rt::MotionNet motion = rt::load_motion_net(opt.model_path);
    std::unique_ptr<rt::AssocNet> assoc;
    rt::TrackerConfig tcfg = cfg.tracker;
    tcfg.assoc_mode = opt.tracker == "rnn_lstm" ? rt::AssocMode::lstm : rt::AssocMode::hungarian;
    tcfg.claim_mode = opt.claim == "lap" ? rt::HardAssignMode::lap : rt::HardAssignMode::argmax;
    if (opt.tracker == "rnn_lstm") {
      assoc = std::make_unique<rt::AssocNet>(rt::load_assoc_net(opt.assoc_model_path));
      if (opt.max_slots > assoc->cfg.m_max)
        throw std::runtime_error("track: --max-slots exceeds the assoc net's column capacity");
    }

    rt::RnnTracker tracker(motion, assoc.get(), tcfg);
    std::ofstream elog;
    if (!opt.existence_path.empty()) {
      elog.open(opt.existence_path, std::ios::binary);
      if (!elog) throw std::runtime_error("cannot open " + opt.existence_path + " for writing");
      elog << "frame,id,existence\n";
    }
    const auto start = std::chrono::steady_clock::now();
    for (std::size_t f = 0; f < frames.size(); ++f) {
      tracker.step_frame(frames[f], results);
      if (elog.is_open()) {
        char buf[128];
        for (const auto& t : tracker.live_tracks()) {
          int n = std::snprintf(buf, sizeof(buf), "%zu,%d,%.6f\n", f + 1, t.id, t.existence);
          elog.write(buf, n);
        }
      }
    }
    stats.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    stats.frames = static_cast<long>(frames.size());
  } else if (opt.tracker == "kalman_ha" || opt.tracker == "kalman_ha2") {
    const auto start = std::chrono::steady_clock::now();
    results = opt.tracker == "kalman_ha"
                  ? rt::run_kalman_ha(frames, cfg.kalman)
                  : rt::run_kalman_ha2(frames, cfg.kalman, cfg.heuristics);
    stats.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    stats.frames = static_cast<long>(frames.size());
  } else {
    throw CLI::ValidationError("track", "unknown --tracker '" + opt.tracker + "'");
  }

  rt::write_results_csv(opt.out_path, results, opt.image_w, opt.image_h);
  std::printf("%s: %ld frames, %zu boxes, %.1f fps\n", opt.tracker.c_str(), stats.frames,
              results.size(), stats.fps());
}

// --------------------------------------------------------------------- eval

struct EvalOpts {
  std::string gt_path;
  std::string res_path;
  std::string out_path;
  double threshold = 0.5;
  int image_w = rt::kVirtualImageW;
  int image_h = rt::kVirtualImageH;
};

void run_eval(const EvalOpts& opt) {
  auto gt = rt::read_results_csv(opt.gt_path, opt.image_w, opt.image_h);
  auto hyp = rt::read_results_csv(opt.res_path, opt.image_w, opt.image_h);
  rt::EvalResult r = rt::evaluate(gt, hyp, opt.threshold);
  std::cout << rt::summary_header() << "\n" << rt::summary_row(r) << "\n";
  if (!opt.out_path.empty()) rt::write_summary_csv(opt.out_path, r);
}

// ---------------------------------------------------------------- gradcheck

struct GradcheckOpts {
  int instances = 50;
  std::uint64_t seed = 1;
  double fd_step = 1e-5;
  double rel_tol = 1e-4;
};

int run_gradcheck(const GradcheckOpts& opt) {
  auto res = rt::run_gradcheck_suite(opt.instances, opt.seed, opt.fd_step, opt.rel_tol);
  for (const auto& c : res.cases)
    std::printf("%-12s %s  checked=%zu failed=%zu max_rel_err=%.3e\n", c.name.c_str(),
                c.report.ok() ? "PASS" : "FAIL", c.report.checked, c.report.failed,
                c.report.max_rel_error);
  std::printf("gradcheck %s in %.2fs\n", res.ok() ? "passed" : "FAILED", res.seconds);
  return res.ok() ? 0 : 1;
}

// -------------------------------------------------------------------- bench

struct BenchOpts {
  std::string tracker = "rnn_ha";
  std::string model_path;
  int targets = 20;
  int frames = 200;
  int hidden = 300;
  int update_hidden = 64;
  std::uint64_t seed = 1;
  double assert_fps = 0.0;
};

// Dense bouncing targets with every detection present: a steady-state load of
// `targets` live tracks per frame.
std::vector<rt::MeasurementFrame> bench_frames(int targets, int n_frames, std::uint64_t seed) {
  rt::Rng rng(seed);
  std::vector<rt::TargetState> pos(targets);
  std::vector<std::array<double, 2>> vel(targets);
  for (int i = 0; i < targets; ++i) {
    pos[i] = {rng.uniform(-0.45, 0.45), rng.uniform(-0.45, 0.45), rng.uniform(0.05, 0.12),
              rng.uniform(0.1, 0.2)};
    vel[i] = {rng.normal(0.0, 0.004), rng.normal(0.0, 0.004)};
  }
  std::vector<rt::MeasurementFrame> frames;
  frames.reserve(n_frames);
  for (int f = 0; f < n_frames; ++f) {
    rt::MeasurementFrame frame(targets);
    for (int i = 0; i < targets; ++i) {
      pos[i].x += vel[i][0];
      pos[i].y += vel[i][1];
      if (pos[i].x < -0.5 || pos[i].x > 0.5) vel[i][0] = -vel[i][0];
      if (pos[i].y < -0.5 || pos[i].y > 0.5) vel[i][1] = -vel[i][1];
      frame.slots[i] = {pos[i].x + rng.normal(0.0, 0.005), pos[i].y + rng.normal(0.0, 0.005),
                        pos[i].w, pos[i].h};
      frame.occupied[i] = 1;
      frame.source[i] = i + 1;
    }
    frames.push_back(std::move(frame));
  }
  return frames;
}

int run_bench(const BenchOpts& opt) {
  auto frames = bench_frames(opt.targets, opt.frames, rt::Rng::split(opt.seed, 7));
  rt::RunStats stats;
  if (opt.tracker == "rnn_ha") {
    rt::MotionNet motion;
    if (!opt.model_path.empty()) {
      motion = rt::load_motion_net(opt.model_path);
    } else {
      motion = rt::MotionNet(opt.hidden, opt.update_hidden);
      rt::Rng rng(rt::Rng::split(opt.seed, 0xA11));
      motion.init(rng);
    }
    rt::TrackerConfig tcfg;
    tcfg.max_targets = opt.targets;
    rt::run_sequence(motion, nullptr, tcfg, frames, &stats);
  } else if (opt.tracker == "kalman_ha" || opt.tracker == "kalman_ha2") {
    const auto start = std::chrono::steady_clock::now();
    if (opt.tracker == "kalman_ha")
      rt::run_kalman_ha(frames, rt::KalmanConfig{});
    else
      rt::run_kalman_ha2(frames, rt::KalmanConfig{}, rt::HeuristicConfig{});
    stats.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    stats.frames = opt.frames;
  } else {
    throw CLI::ValidationError("bench", "unknown --tracker '" + opt.tracker + "'");
  }
  std::printf("bench %s: targets=%d frames=%ld seconds=%.3f fps=%.1f\n", opt.tracker.c_str(),
              opt.targets, stats.frames, stats.seconds, stats.fps());
  if (opt.assert_fps > 0.0 && stats.fps() < opt.assert_fps) {
    std::fprintf(stderr, "bench: %.1f fps is below the required %.1f\n", stats.fps(),
                 opt.assert_fps);
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"recurrent multi-target tracking toolkit"};
  app.require_subcommand(1);
  int rc = 0;

  GenDataOpts gen;
  auto* sub_gen = app.add_subcommand("gen-data", "sample synthetic scenes to CSV files");
  sub_gen->add_option("--out-dir", gen.out_dir, "output directory")->required();
  sub_gen->add_option("--scenes", gen.scenes, "number of scenes")->check(CLI::PositiveNumber);
  sub_gen->add_option("--seed", gen.seed, "master seed");
  gen.config.attach(sub_gen);
  sub_gen->callback([&] { run_gen_data(gen); });

  TrainMotionOpts tm;
  auto* sub_tm = app.add_subcommand("train-motion", "train the motion/existence network");
  sub_tm->add_option("--out", tm.out_path, "checkpoint output path")->required();
  sub_tm->add_option("--scenes", tm.scenes, "training scenes")->check(CLI::PositiveNumber);
  sub_tm->add_option("--seed", tm.seed, "master seed");
  sub_tm->add_option("--p-det", tm.p_det, "detection rate of the training scenes")
      ->check(CLI::Range(0.0, 1.0));
  sub_tm->add_option("--always-alive-frac", tm.always_alive_frac,
                     "fraction of scenes whose tracks never die")
      ->check(CLI::Range(0.0, 1.0));
  sub_tm->add_option("--extend-past-death", tm.extend_past_death,
                     "window frames kept after a track's death")
      ->check(CLI::NonNegativeNumber);
  sub_tm->add_option("--sigma-mix", tm.sigma_mix,
                     "measurement-noise cycle over scenes (overrides gen_sigma_z)")
      ->expected(-1);
  sub_tm->add_option("--clutter-per-scene", tm.clutter_per_scene,
                     "all-miss clutter windows per scene (-1: one per track, 0: none)");
  sub_tm->add_option("--clutter-window-len", tm.clutter_window_len, "frames per clutter window")
      ->check(CLI::PositiveNumber);
  sub_tm->add_option("--exist-iterations", tm.exist_iterations,
                     "existence-head fine-tune iterations over the clutter mix")
      ->check(CLI::NonNegativeNumber);
  sub_tm->add_option("--curve", tm.curve_path, "training-curve CSV output");
  sub_tm->add_option("--log-every", tm.log_every, "curve row spacing")
      ->check(CLI::PositiveNumber);
  tm.config.attach(sub_tm);
  sub_tm->callback([&] { run_train_motion(tm); });

  TrainAssocOpts ta;
  auto* sub_ta = app.add_subcommand("train-assoc", "train the data-association network");
  sub_ta->add_option("--out", ta.out_path, "checkpoint output path")->required();
  sub_ta->add_option("--scenes", ta.scenes, "training scenes")->check(CLI::PositiveNumber);
  sub_ta->add_option("--holdout", ta.holdout, "held-out scenes for the oracle-agreement report")
      ->check(CLI::NonNegativeNumber);
  sub_ta->add_option("--seed", ta.seed, "master seed");
  sub_ta->add_flag("--provenance-labels", ta.provenance_labels,
                   "label from generator correspondences instead of the LAP oracle");
  sub_ta->add_option("--synthetic-frac", ta.synthetic_frac,
                     "fraction of training data drawn as separated synthetic instances")
      ->check(CLI::Range(0.0, 0.95));
  sub_ta->add_option("--curve", ta.curve_path, "training-curve CSV output");
  sub_ta->add_option("--log-every", ta.log_every, "curve row spacing")
      ->check(CLI::PositiveNumber);
  ta.config.attach(sub_ta);
  sub_ta->callback([&] { run_train_assoc(ta); });

  TrackOpts tr;
  auto* sub_tr = app.add_subcommand("track", "run a tracker over a detection file");
  sub_tr->add_option("--det", tr.det_path, "detection CSV")->required()
      ->check(CLI::ExistingFile);
  sub_tr->add_option("--out", tr.out_path, "results CSV output")->required();
  sub_tr->add_option("--tracker", tr.tracker, "rnn_ha | rnn_lstm | kalman_ha | kalman_ha2")
      ->check(CLI::IsMember({"rnn_ha", "rnn_lstm", "kalman_ha", "kalman_ha2"}));
  sub_tr->add_option("--model", tr.model_path, "motion-net checkpoint (rnn trackers)")
      ->check(CLI::ExistingFile);
  sub_tr->add_option("--assoc-model", tr.assoc_model_path, "assoc-net checkpoint (rnn_lstm)")
      ->check(CLI::ExistingFile);
  sub_tr->add_option("--existence-out", tr.existence_path,
                     "per-frame existence CSV (rnn trackers)");
  sub_tr->add_option("--claim", tr.claim, "detection claiming in rnn_lstm mode: argmax | lap")
      ->check(CLI::IsMember({"argmax", "lap"}));
  sub_tr->add_option("--max-slots", tr.max_slots, "measurement slots per frame")
      ->check(CLI::PositiveNumber);
  sub_tr->add_option("--image-w", tr.image_w, "image width for denormalization")
      ->check(CLI::PositiveNumber);
  sub_tr->add_option("--image-h", tr.image_h, "image height for denormalization")
      ->check(CLI::PositiveNumber);
  tr.config.attach(sub_tr);
  sub_tr->callback([&] { run_track(tr); });

  EvalOpts ev;
  auto* sub_ev = app.add_subcommand("eval", "CLEAR-style evaluation of results against gt");
  sub_ev->add_option("--gt", ev.gt_path, "ground-truth CSV")->required()
      ->check(CLI::ExistingFile);
  sub_ev->add_option("--res", ev.res_path, "results CSV")->required()
      ->check(CLI::ExistingFile);
  sub_ev->add_option("--threshold", ev.threshold, "IoU match threshold")
      ->check(CLI::Range(0.0, 1.0));
  sub_ev->add_option("--out", ev.out_path, "summary CSV output");
  sub_ev->add_option("--image-w", ev.image_w, "image width")->check(CLI::PositiveNumber);
  sub_ev->add_option("--image-h", ev.image_h, "image height")->check(CLI::PositiveNumber);
  sub_ev->callback([&] { run_eval(ev); });

  GradcheckOpts gc;
  auto* sub_gc = app.add_subcommand("gradcheck", "finite-difference gradient verification");
  sub_gc->add_option("--instances", gc.instances, "instances per case")
      ->check(CLI::PositiveNumber);
  sub_gc->add_option("--seed", gc.seed, "master seed");
  sub_gc->add_option("--fd-step", gc.fd_step, "central-difference step")
      ->check(CLI::PositiveNumber);
  sub_gc->add_option("--rel-tol", gc.rel_tol, "relative-error tolerance")
      ->check(CLI::PositiveNumber);
  sub_gc->callback([&] { rc = run_gradcheck(gc); });

  BenchOpts be;
  auto* sub_be = app.add_subcommand("bench", "single-core throughput report");
  sub_be->add_option("--tracker", be.tracker, "rnn_ha | kalman_ha | kalman_ha2")
      ->check(CLI::IsMember({"rnn_ha", "kalman_ha", "kalman_ha2"}));
  sub_be->add_option("--model", be.model_path, "motion-net checkpoint (random init if absent)")
      ->check(CLI::ExistingFile);
  sub_be->add_option("--targets", be.targets, "live targets per frame")
      ->check(CLI::PositiveNumber);
  sub_be->add_option("--frames", be.frames, "benchmark length")->check(CLI::PositiveNumber);
  sub_be->add_option("--hidden", be.hidden, "motion hidden size for random init")
      ->check(CLI::PositiveNumber);
  sub_be->add_option("--update-hidden", be.update_hidden, "update-layer size for random init")
      ->check(CLI::PositiveNumber);
  sub_be->add_option("--seed", be.seed, "scene seed");
  sub_be->add_option("--assert-fps", be.assert_fps, "fail when fps falls below this floor");
  sub_be->callback([&] { rc = run_bench(be); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return rc;
}
