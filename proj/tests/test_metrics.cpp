#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <map>
#include <vector>

#include "doctest.h"
#include "rectrack/datagen.hpp"
#include "rectrack/kalman.hpp"
#include "rectrack/metrics.hpp"
#include "rectrack/rng.hpp"

namespace rt = rectrack;

TEST_CASE("iou closed forms") {
  rt::TargetState a = {0.0, 0.0, 1.0, 1.0};
  CHECK(rt::iou(a, a) == doctest::Approx(1.0));
  CHECK(rt::iou(a, {2.0, 2.0, 1.0, 1.0}) == 0.0);
  CHECK(rt::iou(a, {0.5, 0.0, 1.0, 1.0}) == doctest::Approx(1.0 / 3.0));
  CHECK(rt::iou(a, {0.0, 0.0, 0.5, 1.0}) == doctest::Approx(0.5));
  CHECK(rt::iou(a, {0.0, 0.0, 0.0, 1.0}) == 0.0);
  CHECK(rt::iou(a, {0.0, 0.0, -0.5, 1.0}) == 0.0);
  CHECK(rt::iou({0.0, 0.0, -1.0, -1.0}, {0.0, 0.0, -1.0, -1.0}) == 0.0);
}

TEST_CASE("a perfect hypothesis scores perfectly") {
  auto model = rt::default_trajectory_model();
  rt::SceneConfig sc;
  sc.seed = 90;
  auto scene = rt::sample_sequence(model, sc);
  auto gt = rt::tracks_to_boxes(scene.gt_tracks);
  REQUIRE(!gt.empty());
  auto r = rt::evaluate(gt, gt);
  CHECK(r.mota == doctest::Approx(1.0));
  CHECK(r.motp == doctest::Approx(1.0));
  CHECK(r.recall == doctest::Approx(1.0));
  CHECK(r.precision == doctest::Approx(1.0));
  CHECK(r.fp == 0);
  CHECK(r.fn == 0);
  CHECK(r.id_switches == 0);
  CHECK(r.fragmentations == 0);
  CHECK(r.mostly_tracked == static_cast<int>(scene.gt_tracks.size()));
  CHECK(r.mostly_lost == 0);
  CHECK(r.total_gt == static_cast<long>(gt.size()));
  CHECK(r.matches == r.total_gt);
}

TEST_CASE("eight of ten covered in one frame") {
  rt::ResultsTable gt, hyp;
  for (int i = 0; i < 10; ++i) {
    rt::TargetState box = {0.1 * i - 0.5, 0.0, 0.05, 0.05};
    gt.push_back({0, i + 1, box});
    if (i < 8) hyp.push_back({0, 100 + i, box});
  }
  auto r = rt::evaluate(gt, hyp);
  CHECK(r.fn == 2);
  CHECK(r.fp == 0);
  CHECK(r.id_switches == 0);
  CHECK(r.mota == doctest::Approx(0.8));
  CHECK(r.recall == doctest::Approx(0.8));
  CHECK(r.precision == doctest::Approx(1.0));
  CHECK(r.mostly_tracked == 8);
  CHECK(r.mostly_lost == 2);
  CHECK(r.motp == doctest::Approx(1.0));
}

TEST_CASE("an id swap costs two switches") {
  rt::ResultsTable gt, hyp;
  rt::TargetState b1 = {0.1, 0.1, 0.1, 0.1};
  rt::TargetState b2 = {-0.3, -0.2, 0.1, 0.1};
  for (int f = 0; f < 10; ++f) {
    gt.push_back({f, 1, b1});
    gt.push_back({f, 2, b2});
    int h1 = f < 5 ? 101 : 102;
    int h2 = f < 5 ? 102 : 101;
    hyp.push_back({f, h1, b1});
    hyp.push_back({f, h2, b2});
  }
  auto r = rt::evaluate(gt, hyp);
  CHECK(r.id_switches == 2);
  CHECK(r.fragmentations == 2);  // an id change is also a continuity break
  CHECK(r.fn == 0);
  CHECK(r.fp == 0);
  CHECK(r.mota == doctest::Approx(1.0 - 2.0 / 20.0));
  CHECK(r.mostly_tracked == 2);
}

TEST_CASE("a coverage gap fragments without switching") {
  rt::ResultsTable gt, hyp;
  rt::TargetState box = {0.0, 0.0, 0.1, 0.1};
  for (int f = 0; f < 10; ++f) {
    gt.push_back({f, 1, box});
    if (f <= 3 || f >= 6) hyp.push_back({f, 55, box});
  }
  auto r = rt::evaluate(gt, hyp);
  CHECK(r.fn == 2);
  CHECK(r.fp == 0);
  CHECK(r.id_switches == 0);  // the returning id equals the last matched id
  CHECK(r.fragmentations == 1);
  CHECK(r.mota == doctest::Approx(0.8));
  CHECK(r.mostly_tracked == 0);  // coverage exactly 0.8 is not strictly above
  CHECK(r.mostly_lost == 0);
}

TEST_CASE("a stray hypothesis box is one false positive") {
  rt::ResultsTable gt, hyp;
  rt::TargetState box = {0.0, 0.0, 0.1, 0.1};
  for (int f = 0; f < 10; ++f) {
    gt.push_back({f, 1, box});
    hyp.push_back({f, 9, box});
  }
  hyp.push_back({4, 10, {0.4, 0.4, 0.05, 0.05}});
  auto r = rt::evaluate(gt, hyp);
  CHECK(r.fp == 1);
  CHECK(r.fn == 0);
  CHECK(r.id_switches == 0);
  CHECK(r.mota == doctest::Approx(1.0 - 1.0 / 10.0));
  CHECK(r.precision == doctest::Approx(10.0 / 11.0));
}

TEST_CASE("the match threshold separates loose overlaps") {
  rt::ResultsTable gt = {{0, 1, {0.0, 0.0, 0.1, 0.1}}};
  rt::ResultsTable hyp = {{0, 2, {0.06, 0.0, 0.1, 0.1}}};  // IoU 0.25
  auto strict = rt::evaluate(gt, hyp, 0.5);
  CHECK(strict.fn == 1);
  CHECK(strict.fp == 1);
  CHECK(strict.matches == 0);
  auto loose = rt::evaluate(gt, hyp, 0.2);
  CHECK(loose.fn == 0);
  CHECK(loose.fp == 0);
  CHECK(loose.matches == 1);
  CHECK(loose.motp == doctest::Approx(0.25));
}

TEST_CASE("motp averages the matched overlap") {
  rt::ResultsTable gt, hyp;
  for (int f = 0; f < 5; ++f) {
    gt.push_back({f, 1, {0.0, 0.0, 0.2, 0.2}});
    hyp.push_back({f, 7, {0.05, 0.0, 0.2, 0.2}});  // IoU 0.6
  }
  auto r = rt::evaluate(gt, hyp);
  CHECK(r.matches == 5);
  CHECK(r.motp == doctest::Approx(0.6));
  CHECK(r.mota == doctest::Approx(1.0));
}

TEST_CASE("duplicate ids within a frame are rejected") {
  rt::ResultsTable ok = {{0, 1, {0.0, 0.0, 0.1, 0.1}}, {1, 1, {0.0, 0.0, 0.1, 0.1}}};
  rt::ResultsTable dup = {{0, 1, {0.0, 0.0, 0.1, 0.1}}, {0, 1, {0.3, 0.3, 0.1, 0.1}}};
  CHECK_NOTHROW(rt::evaluate(ok, ok));
  CHECK_THROWS_AS(rt::evaluate(dup, ok), std::invalid_argument);
  CHECK_THROWS_AS(rt::evaluate(ok, dup), std::invalid_argument);
}

TEST_CASE("empty inputs behave sanely") {
  rt::ResultsTable gt = {{0, 1, {0.0, 0.0, 0.1, 0.1}}};
  auto no_hyp = rt::evaluate(gt, {});
  CHECK(no_hyp.fn == 1);
  CHECK(no_hyp.mota == doctest::Approx(0.0));
  CHECK(no_hyp.precision == 0.0);
  auto no_gt = rt::evaluate({}, gt);
  CHECK(no_gt.fp == 1);
  CHECK(no_gt.recall == 0.0);
  CHECK(no_gt.total_gt == 0);
}

TEST_CASE("scores are invariant under hypothesis relabeling") {
  auto model = rt::default_trajectory_model();
  rt::SceneConfig sc;
  rt::KalmanConfig kcfg;
  rt::HeuristicConfig h;
  rt::Rng rng(91);
  for (int s = 0; s < 10; ++s) {
    sc.seed = rt::Rng::split(91, s);
    auto scene = rt::sample_sequence(model, sc);
    auto gt = rt::tracks_to_boxes(scene.gt_tracks);
    auto hyp = rt::run_kalman_ha2(scene.frames, kcfg, h);
    if (hyp.empty()) continue;

    std::vector<int> ids;
    for (const auto& b : hyp) ids.push_back(b.id);
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    std::vector<int> shuffled = ids;
    for (std::size_t i = shuffled.size(); i > 1; --i)
      std::swap(shuffled[i - 1], shuffled[rng.uniform_int(0, static_cast<long>(i) - 1)]);
    std::map<int, int> relabel;
    for (std::size_t i = 0; i < ids.size(); ++i) relabel[ids[i]] = 1000 + shuffled[i];
    auto renamed = hyp;
    for (auto& b : renamed) b.id = relabel[b.id];

    auto r1 = rt::evaluate(gt, hyp);
    auto r2 = rt::evaluate(gt, renamed);
    CHECK(r1.mota == r2.mota);
    CHECK(r1.motp == r2.motp);
    CHECK(r1.fp == r2.fp);
    CHECK(r1.fn == r2.fn);
    CHECK(r1.id_switches == r2.id_switches);
    CHECK(r1.fragmentations == r2.fragmentations);
    CHECK(r1.mostly_tracked == r2.mostly_tracked);
    CHECK(r1.mostly_lost == r2.mostly_lost);
    CHECK(r1.recall == r2.recall);
    CHECK(r1.precision == r2.precision);
  }
}

TEST_CASE("mota decomposes into its error terms") {
  auto model = rt::default_trajectory_model();
  rt::SceneConfig sc;
  rt::KalmanConfig kcfg;
  for (int s = 0; s < 5; ++s) {
    sc.seed = rt::Rng::split(92, s);
    auto scene = rt::sample_sequence(model, sc);
    auto gt = rt::tracks_to_boxes(scene.gt_tracks);
    auto r = rt::evaluate(gt, rt::run_kalman_ha(scene.frames, kcfg));
    REQUIRE(r.total_gt > 0);
    double expect = 1.0 - static_cast<double>(r.fn + r.fp + r.id_switches) / r.total_gt;
    CHECK(r.mota == doctest::Approx(expect).epsilon(1e-12));
    CHECK(r.recall == doctest::Approx(static_cast<double>(r.matches) / r.total_gt).epsilon(1e-12));
  }
}
