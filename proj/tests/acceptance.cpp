// End-to-end acceptance gate. Run with the CLI binary as argv[1]; prints one
// PASS/FAIL line per criterion and exits with the number of failures.
#include <sys/wait.h>

#include <array>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "rectrack/assoc.hpp"
#include "rectrack/config.hpp"
#include "rectrack/datagen.hpp"
#include "rectrack/gradcheck_suite.hpp"
#include "rectrack/kalman.hpp"
#include "rectrack/lap.hpp"
#include "rectrack/metrics.hpp"
#include "rectrack/motion.hpp"
#include "rectrack/rng.hpp"
#include "rectrack/tracker.hpp"

namespace rt = rectrack;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
  std::printf("criterion %d: %s — %s\n", criterion, pass ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list args;
  va_start(args, f);
  std::vsnprintf(buf, sizeof(buf), f, args);
  va_end(args);
  return buf;
}

// ------------------------------------------------------------- criterion 1

void criterion_gradcheck() {
  auto res = rt::run_gradcheck_suite(50, 1);
  std::size_t checked = 0, failed = 0;
  double max_rel = 0.0;
  for (const auto& c : res.cases) {
    checked += c.report.checked;
    failed += c.report.failed;
    max_rel = std::max(max_rel, c.report.max_rel_error);
  }
  bool pass = res.ok() && res.seconds < 60.0;
  report(1, pass,
         fmt("%zu cases, %zu gradients checked, %zu failed, max rel err %.2e, %.1fs",
             res.cases.size(), checked, failed, max_rel, res.seconds));
}

// ------------------------------------------------------------- criterion 2

void criterion_lap_oracle() {
  const auto t0 = Clock::now();
  rt::Rng rng(2024);
  long mismatches = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    int n = static_cast<int>(rng.uniform_int(1, 6));
    int m = static_cast<int>(rng.uniform_int(1, 7));
    rt::CostMatrix c(n, m);
    for (double& v : c.c) v = rng.uniform(0.0, 2.0);
    rt::Assignment got, want;
    if (trial % 2 == 0) {
      double miss = rng.uniform(0.05, 1.5);
      got = rt::solve_lap(c, miss);
      want = rt::brute_force_lap(c, miss);
    } else {
      std::vector<double> miss(n);
      for (double& v : miss) v = rng.uniform(0.05, 1.5);
      got = rt::solve_lap(c, miss);
      want = rt::brute_force_lap(c, miss);
    }
    if (got.total_cost != want.total_cost || got.col_of_row != want.col_of_row) ++mismatches;
  }
  double secs = seconds_since(t0);
  bool pass = mismatches == 0 && secs < 60.0;
  report(2, pass, fmt("1000 random instances up to 6x7, %ld mismatches, %.2fs", mismatches, secs));
}

// ------------------------------------------------------------- criterion 3
//
// Trains the association net with the shipped recipe (the same code path as
// the CLI's train-assoc, seed 7) and scores oracle agreement on held-out
// scene frames and on well-separated synthetic instances.

void criterion_assoc_training() {
  const auto t0 = Clock::now();
  rt::RunConfig cfg;
  for (const char* kv : {"gen_max_targets=3", "gen_max_detections=5", "assoc_n_max=3",
                         "assoc_m_max=5", "assoc_embed=32", "assoc_hidden=96",
                         "max_iterations=100000", "lr0=0.001"}) {
    std::string s(kv);
    auto eq = s.find('=');
    rt::apply_config_entry(cfg, s.substr(0, eq), s.substr(eq + 1));
  }
  rt::validate_config(cfg);
  const std::uint64_t seed = 7;
  const int scenes = 1000, holdout = 100;
  const double synthetic_frac = 0.35;

  auto model = rt::default_trajectory_model();
  rt::AssocDataConfig dcfg;
  dcfg.pred_noise = cfg.pred_noise;
  dcfg.miss_cost = cfg.miss_cost;
  rt::SeparatedInstanceConfig icfg;
  icfg.match_noise =
      std::sqrt(cfg.pred_noise * cfg.pred_noise + cfg.scene.sigma_z * cfg.scene.sigma_z);
  icfg.miss_cost = cfg.miss_cost;

  rt::Rng data_rng(rt::Rng::split(seed, 0xC33));
  std::vector<rt::AssocInstance> data;
  for (int i = 0; i < scenes; ++i) {
    rt::SceneConfig sc = cfg.scene;
    sc.seed = rt::Rng::split(seed, static_cast<std::uint64_t>(i));
    auto inst = rt::make_assoc_instances(rt::sample_sequence(model, sc), dcfg, data_rng);
    data.insert(data.end(), inst.begin(), inst.end());
  }
  const std::size_t scene_instances = data.size();
  auto synth =
      static_cast<long>(std::lround(scene_instances * synthetic_frac / (1.0 - synthetic_frac)));
  for (long i = 0; i < synth; ++i)
    data.push_back(rt::make_separated_instance(cfg.assoc.n_max, cfg.assoc.m_max, icfg, data_rng));

  rt::AssocNet net(cfg.assoc);
  rt::Rng init_rng(rt::Rng::split(seed, 0xA12));
  net.init(init_rng);
  rt::Rng train_rng(rt::Rng::split(seed, 0xB23));
  rt::train_assoc(net, data, cfg.train, train_rng);

  std::vector<rt::AssocInstance> held;
  for (int i = 0; i < holdout; ++i) {
    rt::SceneConfig sc = cfg.scene;
    sc.seed = rt::Rng::split(seed ^ 0x5EEDF00DULL, static_cast<std::uint64_t>(i));
    auto inst = rt::make_assoc_instances(rt::sample_sequence(model, sc), dcfg, data_rng);
    held.insert(held.end(), inst.begin(), inst.end());
  }
  auto held_agree = rt::oracle_agreement(net, held, cfg.miss_cost);

  rt::Rng sep_rng(rt::Rng::split(seed, 0xD44));
  std::vector<rt::AssocInstance> sep;
  for (int i = 0; i < 1000; ++i)
    sep.push_back(rt::make_separated_instance(cfg.assoc.n_max, cfg.assoc.m_max, icfg, sep_rng));
  auto sep_agree = rt::oracle_agreement(net, sep, cfg.miss_cost);

  double secs = seconds_since(t0);
  bool pass = sep_agree.rate() >= 0.95 && held_agree.rate() >= 0.85 && secs <= 7200.0;
  report(3, pass,
         fmt("%zu training frames; separated %ld/%ld = %.4f (need >= 0.95), "
             "held-out %ld/%ld = %.4f (need >= 0.85), %.0fs",
             data.size(), sep_agree.matches, sep_agree.rows, sep_agree.rate(), held_agree.matches,
             held_agree.rows, held_agree.rate(), secs));
}

// -------------------------------------------------------- criteria 4, 5, 6
//
// One motion/existence net trained with the shipped recipe (the same code
// path as the CLI's train-motion, seed 11) backs all three checks.

rt::MotionNet train_motion_recipe(double* train_secs) {
  const auto t0 = Clock::now();
  rt::RunConfig cfg;
  for (const char* kv : {"lambda=10", "kappa=10", "nu=0.05", "xi=0.005", "lr0=0.001",
                         "max_iterations=150000", "motion_hidden=48", "motion_update_hidden=32"}) {
    std::string s(kv);
    auto eq = s.find('=');
    rt::apply_config_entry(cfg, s.substr(0, eq), s.substr(eq + 1));
  }
  rt::validate_config(cfg);
  const std::uint64_t seed = 11;
  const int scenes = 200;
  const double p_det = 0.8, always_alive_frac = 0.3;
  const std::array<double, 4> sigma_mix = {0.01, 0.01, 0.005, 0.0};
  const long exist_iterations = 30000;

  auto interleaved = [](int i, double frac) {
    return static_cast<long>((i + 1) * frac) > static_cast<long>(i * frac);
  };

  auto model = rt::default_trajectory_model();
  std::vector<rt::MotionInstance> data, clutter;
  for (int i = 0; i < scenes; ++i) {
    rt::SceneConfig sc = cfg.scene;
    sc.p_det = p_det;
    sc.always_alive = interleaved(i, always_alive_frac);
    sc.sigma_z = sigma_mix[i % sigma_mix.size()];
    sc.seed = rt::Rng::split(seed, static_cast<std::uint64_t>(i));
    auto scene = rt::sample_sequence(model, sc);
    auto inst = rt::make_motion_instances(scene, 5);
    data.insert(data.end(), inst.begin(), inst.end());
    auto neg = rt::make_clutter_instances(scene, 6, -1);
    clutter.insert(clutter.end(), neg.begin(), neg.end());
  }

  rt::MotionNet net(cfg.motion_hidden, cfg.motion_update_hidden);
  rt::Rng init_rng(rt::Rng::split(seed, 0xA11));
  net.init(init_rng);
  rt::Rng train_rng(rt::Rng::split(seed, 0xB22));
  rt::train_motion(net, data, cfg.loss, cfg.train, train_rng);

  data.insert(data.end(), clutter.begin(), clutter.end());
  rt::TrainConfig tc2 = cfg.train;
  tc2.max_iterations = exist_iterations;
  std::array<rt::Param*, 1> head = {&net.exist_head.w};
  rt::train_motion(net, data, cfg.loss, tc2, train_rng, nullptr, 200, head);

  *train_secs = seconds_since(t0);
  return net;
}

void criterion_motion_prediction(const rt::MotionNet& net, double train_secs) {
  auto model = rt::default_trajectory_model();
  rt::SceneConfig sc;
  sc.always_alive = true;
  sc.p_det = 1.0;
  sc.clutter_rate = 0.0;
  sc.sigma_z = 0.0;
  double se_net = 0.0, se_pers = 0.0;
  long n = 0;
  for (int s = 0; s < 50; ++s) {
    sc.seed = rt::Rng::split(777, s);
    auto scene = rt::sample_sequence(model, sc);
    for (const auto& inst : rt::make_motion_instances(scene, 0)) {
      rt::MotionTrace trace;
      rt::motion_forward(net, inst, rt::LossWeights{}, &trace);
      rt::TargetState prev = rt::TargetState::from_span(inst.x0);
      for (int t = 0; t < inst.steps(); ++t) {
        const auto& gt = inst.gt_states[t];
        const auto& xs = trace.x_star_states[t];
        if (t >= 3) {  // past the hidden-state warm-up
          se_net += (gt.x - xs.x) * (gt.x - xs.x) + (gt.y - xs.y) * (gt.y - xs.y) +
                    (gt.w - xs.w) * (gt.w - xs.w) + (gt.h - xs.h) * (gt.h - xs.h);
          se_pers += (gt.x - prev.x) * (gt.x - prev.x) + (gt.y - prev.y) * (gt.y - prev.y) +
                     (gt.w - prev.w) * (gt.w - prev.w) + (gt.h - prev.h) * (gt.h - prev.h);
          n += 4;
        }
        for (int j = 0; j < inst.frames[t].capacity(); ++j)
          if (inst.frames[t].occupied[j] && inst.a_rows[t][j] == 1.0) prev = inst.frames[t].slots[j];
      }
    }
  }
  double rms_net = std::sqrt(se_net / n);
  double rms_pers = std::sqrt(se_pers / n);
  bool pass = rms_net < 0.02 && rms_net < 0.5 * rms_pers;
  report(4, pass,
         fmt("noise-free one-step RMS %.5f (need < 0.02) vs persistence %.5f (need < 50%%: "
             "ratio %.3f); recipe trained in %.0fs",
             rms_net, rms_pers, rms_net / rms_pers, train_secs));
}

void criterion_existence_timing(const rt::MotionNet& net) {
  auto model = rt::default_trajectory_model();
  rt::SceneConfig sc;
  rt::TrackerConfig tcfg;
  long birth_ok = 0, birth_n = 0, death_ok = 0, death_n = 0;
  for (int s = 0; s < 100; ++s) {
    sc.seed = rt::Rng::split(4242, s);
    auto scene = rt::sample_sequence(model, sc);
    const int total = static_cast<int>(scene.frames.size());
    auto hyp = rt::run_sequence(net, nullptr, tcfg, scene.frames);
    std::vector<std::vector<const rt::OutputBox*>> by_frame(total);
    std::map<int, int> last_emit;
    for (const auto& b : hyp) {
      by_frame[b.frame].push_back(&b);
      auto it = last_emit.find(b.id);
      if (it == last_emit.end() || it->second < b.frame) last_emit[b.id] = b.frame;
    }
    for (const auto& g : scene.gt_tracks) {
      int last_meas = -1;
      for (int f = g.birth; f <= g.death; ++f)
        for (int j = 0; j < scene.frames[f].capacity(); ++j)
          if (scene.frames[f].occupied[j] && scene.frames[f].source[j] == g.id) last_meas = f;
      std::map<int, int> follow_count;
      int first_match = -1;
      for (int f = g.birth; f <= g.death; ++f)
        for (const auto* b : by_frame[f])
          if (rt::iou(g.state_at(f), b->box) >= 0.5) {
            ++follow_count[b->id];
            if (first_match < 0) first_match = f;
          }
      ++birth_n;
      if (first_match >= 0 && first_match - g.birth <= 3) ++birth_ok;
      if (last_meas >= 0 && last_meas + 4 <= total - 1) {
        ++death_n;
        bool ok = true;
        for (const auto& [id, cnt] : follow_count)
          if (cnt >= 2 && last_emit[id] > last_meas + 3) ok = false;
        if (ok) ++death_ok;
      }
    }
  }
  double birth_rate = birth_n ? static_cast<double>(birth_ok) / birth_n : 0.0;
  double death_rate = death_n ? static_cast<double>(death_ok) / death_n : 0.0;
  bool pass = birth_rate >= 0.90 && death_rate >= 0.90;
  report(5, pass,
         fmt("birth within 3 frames %ld/%ld = %.3f, death within 3 frames %ld/%ld = %.3f "
             "(both need >= 0.90)",
             birth_ok, birth_n, birth_rate, death_ok, death_n, death_rate));
}

struct ClearAggregate {
  long fp = 0, fn = 0, ids = 0, gt = 0;
  void add(const rt::EvalResult& r) {
    fp += r.fp;
    fn += r.fn;
    ids += r.id_switches;
    gt += r.total_gt;
  }
  double mota() const { return 1.0 - static_cast<double>(fn + fp + ids) / static_cast<double>(gt); }
};

void criterion_tracker_comparison(const rt::MotionNet& net) {
  auto model = rt::default_trajectory_model();
  rt::SceneConfig sc;
  rt::TrackerConfig tcfg;
  rt::KalmanConfig kcfg;
  rt::HeuristicConfig heur;
  ClearAggregate rnn, kha, kha2;
  for (int i = 0; i < 100; ++i) {
    sc.seed = rt::Rng::split(4242, i);
    auto scene = rt::sample_sequence(model, sc);
    auto gt = rt::tracks_to_boxes(scene.gt_tracks);
    rnn.add(rt::evaluate(gt, rt::run_sequence(net, nullptr, tcfg, scene.frames)));
    kha.add(rt::evaluate(gt, rt::run_kalman_ha(scene.frames, kcfg)));
    kha2.add(rt::evaluate(gt, rt::run_kalman_ha2(scene.frames, kcfg, heur)));
  }
  bool pass = rnn.mota() > kha.mota() && kha2.mota() > kha.mota();
  report(6, pass,
         fmt("100 scenes: MOTA rnn_ha %.4f > kalman_ha %.4f, and kalman_ha2 %.4f > kalman_ha",
             rnn.mota(), kha.mota(), kha2.mota()));
}

// ------------------------------------------------------------- criterion 7

void criterion_metrics() {
  std::vector<std::string> problems;

  {  // eight of ten covered in a single frame
    rt::ResultsTable gt, hyp;
    for (int i = 0; i < 10; ++i) {
      rt::TargetState box = {0.1 * i - 0.5, 0.0, 0.05, 0.05};
      gt.push_back({0, i + 1, box});
      if (i < 8) hyp.push_back({0, 100 + i, box});
    }
    auto r = rt::evaluate(gt, hyp);
    if (r.fn != 2 || r.fp != 0 || r.id_switches != 0 || std::abs(r.mota - 0.8) > 1e-12 ||
        std::abs(r.recall - 0.8) > 1e-12 || std::abs(r.precision - 1.0) > 1e-12)
      problems.push_back("partial-coverage example");
  }
  {  // two parallel tracks swap ids mid-sequence
    rt::ResultsTable gt, hyp;
    rt::TargetState b1 = {0.1, 0.1, 0.1, 0.1}, b2 = {-0.3, -0.2, 0.1, 0.1};
    for (int f = 0; f < 10; ++f) {
      gt.push_back({f, 1, b1});
      gt.push_back({f, 2, b2});
      hyp.push_back({f, f < 5 ? 101 : 102, b1});
      hyp.push_back({f, f < 5 ? 102 : 101, b2});
    }
    auto r = rt::evaluate(gt, hyp);
    if (r.id_switches != 2 || r.fn != 0 || r.fp != 0 || std::abs(r.mota - 0.9) > 1e-12)
      problems.push_back("id-swap example");
  }
  {  // the ground truth against itself
    auto model = rt::default_trajectory_model();
    rt::SceneConfig sc;
    sc.seed = 777;
    auto gt = rt::tracks_to_boxes(rt::sample_sequence(model, sc).gt_tracks);
    auto r = rt::evaluate(gt, gt);
    if (r.mota != 1.0 || r.motp != 1.0 || r.fp != 0 || r.fn != 0 || r.id_switches != 0)
      problems.push_back("perfect-hypothesis example");
  }
  {  // relabeling fuzz
    auto model = rt::default_trajectory_model();
    rt::SceneConfig sc;
    rt::KalmanConfig kcfg;
    rt::HeuristicConfig heur;
    rt::Rng rng(2025);
    for (int s = 0; s < 10; ++s) {
      sc.seed = rt::Rng::split(2025, s);
      auto scene = rt::sample_sequence(model, sc);
      auto gt = rt::tracks_to_boxes(scene.gt_tracks);
      auto hyp = rt::run_kalman_ha2(scene.frames, kcfg, heur);
      std::set<int> id_set;
      for (const auto& b : hyp) id_set.insert(b.id);
      std::vector<int> ids(id_set.begin(), id_set.end());
      std::vector<int> perm = ids;
      for (std::size_t i = perm.size(); i > 1; --i)
        std::swap(perm[i - 1], perm[rng.uniform_int(0, static_cast<long>(i) - 1)]);
      std::map<int, int> relabel;
      for (std::size_t i = 0; i < ids.size(); ++i) relabel[ids[i]] = 5000 + perm[i];
      auto renamed = hyp;
      for (auto& b : renamed) b.id = relabel[b.id];
      auto r1 = rt::evaluate(gt, hyp);
      auto r2 = rt::evaluate(gt, renamed);
      if (r1.mota != r2.mota || r1.motp != r2.motp || r1.fp != r2.fp || r1.fn != r2.fn ||
          r1.id_switches != r2.id_switches || r1.fragmentations != r2.fragmentations ||
          r1.mostly_tracked != r2.mostly_tracked || r1.mostly_lost != r2.mostly_lost) {
        problems.push_back(fmt("relabel fuzz scene %d", s));
        break;
      }
    }
  }
  std::string detail = "3 pinned examples exact, relabeling fuzz invariant on 10 scenes";
  if (!problems.empty()) {
    detail = "failed:";
    for (const auto& p : problems) detail += " " + p + ";";
  }
  report(7, problems.empty(), detail);
}

// --------------------------------------------------------- criteria 8 and 9

int run_command(const std::string& cmd) {
  int rc = std::system(cmd.c_str());
  if (rc == -1) return -1;
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string quoted(const std::string& s) { return "\"" + s + "\""; }

void criterion_throughput(const std::string& cli) {
  fs::path log = fs::temp_directory_path() / "rectrack-acceptance-bench.txt";
  std::string cmd = quoted(cli) +
                    " bench --tracker rnn_ha --targets 20 --frames 300 --seed 1"
                    " --assert-fps 100 > " +
                    quoted(log.string()) + " 2>&1";
  int rc = run_command(cmd);
  std::string fps = "?";
  std::ifstream in(log);
  std::string line;
  while (std::getline(in, line)) {
    auto pos = line.find("fps=");
    if (pos != std::string::npos) fps = line.substr(pos + 4);
  }
  report(8, rc == 0,
         fmt("full-size net, 20 targets, 300 frames: %s fps (need >= 100, exit code %d)",
             fps.c_str(), rc));
}

bool dirs_byte_identical(const fs::path& a, const fs::path& b, std::string* why) {
  std::set<std::string> names_a, names_b;
  for (const auto& e : fs::recursive_directory_iterator(a))
    if (e.is_regular_file()) names_a.insert(fs::relative(e.path(), a).string());
  for (const auto& e : fs::recursive_directory_iterator(b))
    if (e.is_regular_file()) names_b.insert(fs::relative(e.path(), b).string());
  if (names_a != names_b) {
    *why = "file sets differ";
    return false;
  }
  for (const auto& name : names_a) {
    std::ifstream fa(a / name, std::ios::binary), fb(b / name, std::ios::binary);
    std::ostringstream sa, sb;
    sa << fa.rdbuf();
    sb << fb.rdbuf();
    if (sa.str() != sb.str()) {
      *why = name + " differs";
      return false;
    }
  }
  if (names_a.empty()) {
    *why = "no files produced";
    return false;
  }
  return true;
}

void criterion_determinism(const std::string& cli) {
  fs::path root = fs::temp_directory_path() / "rectrack-acceptance-repro";
  fs::remove_all(root);
  std::vector<std::string> failures;

  auto shell = [&](const fs::path& dir, const std::string& args) {
    std::string cmd = quoted(cli) + " " + args + " >> " + quoted((dir / "stdout.txt").string()) +
                      " 2>&1";
    int rc = run_command(cmd);
    if (rc != 0) failures.push_back(fmt("exit %d: %s", rc, args.c_str()));
  };

  for (const char* run : {"run1", "run2"}) {
    fs::path dir = root / run;
    fs::create_directories(dir);
    std::string d = dir.string() + "/";

    shell(dir, "gen-data --out-dir " + quoted(d + "scenes") + " --scenes 3 --seed 21");
    shell(dir, "train-motion --out " + quoted(d + "motion.ckpt") + " --curve " +
                   quoted(d + "motion_curve.csv") +
                   " --scenes 3 --seed 5 --exist-iterations 200"
                   " --set max_iterations=400 --set motion_hidden=12 --set motion_update_hidden=8");
    shell(dir, "train-assoc --out " + quoted(d + "assoc.ckpt") + " --curve " +
                   quoted(d + "assoc_curve.csv") +
                   " --scenes 5 --holdout 0 --seed 5"
                   " --set max_iterations=300 --set assoc_embed=8 --set assoc_hidden=16"
                   " --set assoc_n_max=5 --set assoc_m_max=10");
    std::string det = quoted(d + "scenes/scene_000_det.csv");
    shell(dir, "track --det " + det + " --out " + quoted(d + "rnn_ha.csv") + " --tracker rnn_ha"
                   " --model " + quoted(d + "motion.ckpt") + " --existence-out " +
                   quoted(d + "existence.csv"));
    shell(dir, "track --det " + det + " --out " + quoted(d + "rnn_lstm.csv") +
                   " --tracker rnn_lstm --claim lap --model " + quoted(d + "motion.ckpt") +
                   " --assoc-model " + quoted(d + "assoc.ckpt"));
    shell(dir, "track --det " + det + " --out " + quoted(d + "kalman_ha.csv") +
                   " --tracker kalman_ha");
    shell(dir, "track --det " + det + " --out " + quoted(d + "kalman_ha2.csv") +
                   " --tracker kalman_ha2");
    shell(dir, "eval --gt " + quoted(d + "scenes/scene_000_gt.csv") + " --res " +
                   quoted(d + "rnn_ha.csv") + " --out " + quoted(d + "summary.csv"));
  }

  std::string why;
  bool same = dirs_byte_identical(root / "run1", root / "run2", &why);
  bool pass = failures.empty() && same;
  std::string detail;
  if (pass) {
    std::size_t files = 0;
    for (const auto& e : fs::recursive_directory_iterator(root / "run1"))
      if (e.is_regular_file()) ++files;
    detail = fmt("every subcommand twice with fixed seeds: %zu files byte-identical", files);
  } else if (!failures.empty()) {
    detail = failures.front();
  } else {
    detail = why;
  }
  report(9, pass, detail);
  if (pass) fs::remove_all(root);
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: %s <path-to-cli-binary>\n", argv[0]);
    return 2;
  }
  const std::string cli = argv[1];

  criterion_gradcheck();
  criterion_lap_oracle();
  criterion_assoc_training();

  double train_secs = 0.0;
  rt::MotionNet net = train_motion_recipe(&train_secs);
  criterion_motion_prediction(net, train_secs);
  criterion_existence_timing(net);
  criterion_tracker_comparison(net);

  criterion_metrics();
  criterion_throughput(cli);
  criterion_determinism(cli);

  if (g_failures == 0)
    std::printf("acceptance: all 9 criteria passed\n");
  else
    std::printf("acceptance: %d criteria FAILED\n", g_failures);
  return g_failures;
}
