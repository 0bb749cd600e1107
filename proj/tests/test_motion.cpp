#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"
#include "rectrack/error.hpp"
#include "rectrack/gradcheck.hpp"
#include "rectrack/motion.hpp"

namespace rt = rectrack;

namespace {

// Six frames, capacity three. Track 1 lives [0,3] with its frame-2 detection
// dropped; track 2 lives [2,5]; clutter appears at frames 1 and 5.
rt::SceneSequence two_track_scene() {
  rt::SceneSequence scene;
  rt::GtTrack t1;
  t1.id = 1;
  t1.birth = 0;
  t1.death = 3;
  for (int f = 0; f <= 3; ++f) t1.states.push_back({0.1 + 0.02 * f, 0.0, 0.1, 0.2});
  rt::GtTrack t2;
  t2.id = 2;
  t2.birth = 2;
  t2.death = 5;
  for (int f = 2; f <= 5; ++f) t2.states.push_back({-0.3, 0.25 - 0.01 * (f - 2), 0.08, 0.15});
  scene.gt_tracks = {t1, t2};

  scene.frames.assign(6, rt::MeasurementFrame(3));
  auto put = [&](int f, int slot, const rt::TargetState& z, int src) {
    scene.frames[f].slots[slot] = z;
    scene.frames[f].occupied[slot] = 1;
    scene.frames[f].source[slot] = src;
  };
  put(0, 0, t1.state_at(0), 1);
  put(1, 0, {0.4, 0.4, 0.05, 0.05}, rt::kClutter);
  put(1, 1, t1.state_at(1), 1);
  put(2, 0, t2.state_at(2), 2);  // track 1 dropped this frame
  put(3, 0, t1.state_at(3), 1);
  put(3, 1, t2.state_at(3), 2);
  put(4, 2, t2.state_at(4), 2);
  put(5, 0, {-0.4, -0.4, 0.1, 0.1}, rt::kClutter);
  put(5, 1, t2.state_at(5), 2);
  return scene;
}

int hot_index(const rt::Vec& a) {
  for (std::size_t j = 0; j < a.size(); ++j)
    if (a[j] == 1.0) return static_cast<int>(j);
  return -1;
}

}  // namespace

TEST_CASE("bce closed forms") {
  CHECK(rt::bce_term(1.0 - 1e-7, 1.0) == doctest::Approx(0.0).epsilon(1e-6));
  CHECK(rt::bce_term(0.5, 1.0) == doctest::Approx(std::log(2.0)));
  CHECK(rt::bce_term(0.5, 0.0) == doctest::Approx(std::log(2.0)));
  CHECK(rt::bce_term(0.9, 0.0) == doctest::Approx(-std::log(0.1)));
  // Clamp keeps the endpoints finite.
  CHECK(std::isfinite(rt::bce_term(0.0, 1.0)));
  CHECK(std::isfinite(rt::bce_term(1.0, 0.0)));
  CHECK(rt::bce_term(0.3, 1.0) >= 0.0);
}

TEST_CASE("motion loss is near zero for a perfect window") {
  std::vector<rt::TargetState> gt = {{0.1, 0.2, 0.1, 0.2}, {0.12, 0.2, 0.1, 0.2}};
  std::vector<double> e = {1.0, 1.0}, gte = {1.0, 1.0}, ediff = {0.0, 0.0};
  rt::LossWeights w;
  double loss = rt::motion_loss(gt, gt, e, ediff, gt, gte, w);
  CHECK(loss == doctest::Approx(0.0).epsilon(1e-6));
}

TEST_CASE("motion loss prediction term arithmetic") {
  // One frame, prediction off by 1 in all four dims: lambda/(D) * 4 = 1.
  std::vector<rt::TargetState> gt = {{0.0, 0.0, 0.0, 0.0}};
  std::vector<rt::TargetState> pred = {{1.0, 1.0, 1.0, 1.0}};
  std::vector<double> e = {1.0}, gte = {1.0}, ediff = {0.0};
  rt::LossWeights w{1.0, 0.0, 0.0, 0.0};
  rt::MotionLossTerms terms;
  double loss = rt::motion_loss(pred, gt, e, ediff, gt, gte, w, &terms);
  CHECK(loss == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(terms.prediction == doctest::Approx(1.0));
  CHECK(terms.update == doctest::Approx(0.0));
}

TEST_CASE("motion loss existence term is plain bce") {
  std::vector<rt::TargetState> gt = {{0, 0, 0, 0}};
  std::vector<double> e = {0.5}, gte = {1.0}, ediff = {0.0};
  rt::LossWeights w{0.0, 0.0, 1.0, 0.0};
  double loss = rt::motion_loss(gt, gt, e, ediff, gt, gte, w);
  CHECK(loss == doctest::Approx(std::log(2.0)).epsilon(1e-9));
}

TEST_CASE("smoothness term averages the existence jumps") {
  std::vector<rt::TargetState> gt = {{0, 0, 0, 0}, {0, 0, 0, 0}};
  std::vector<double> e = {1.0, 1.0}, gte = {1.0, 1.0};
  std::vector<double> ediff = {0.0, 0.2};
  rt::LossWeights w{0.0, 0.0, 0.0, 1.0};
  CHECK(rt::motion_loss(gt, gt, e, ediff, gt, gte, w) == doctest::Approx(0.1));
  std::vector<double> flat = {0.0, 0.0};
  CHECK(rt::motion_loss(gt, gt, e, flat, gt, gte, w) == 0.0);
}

TEST_CASE("location terms skip frames whose target does not exist") {
  std::vector<rt::TargetState> gt = {{0.1, 0.1, 0.1, 0.1}, {0, 0, 0, 0}};
  std::vector<rt::TargetState> pred = {{0.1, 0.1, 0.1, 0.1}, {9.0, 9.0, 9.0, 9.0}};
  std::vector<double> e = {1.0, 0.0}, gte = {1.0, 0.0}, ediff = {0.0, 1.0};
  rt::LossWeights w{1.0, 1.0, 0.0, 0.0};
  CHECK(rt::motion_loss(pred, pred, e, ediff, gt, gte, w) == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("motion loss grows with each weight") {
  std::vector<rt::TargetState> gt = {{0, 0, 0, 0}};
  std::vector<rt::TargetState> pred = {{0.5, 0, 0, 0}};
  std::vector<double> e = {0.7}, gte = {1.0}, ediff = {0.3};
  rt::LossWeights base{1, 1, 1, 0.1};
  double b = rt::motion_loss(pred, pred, e, ediff, gt, gte, base);
  for (int k = 0; k < 4; ++k) {
    rt::LossWeights more = base;
    (k == 0 ? more.lambda : k == 1 ? more.kappa : k == 2 ? more.nu : more.xi) += 0.5;
    CHECK(rt::motion_loss(pred, pred, e, ediff, gt, gte, more) > b);
  }
}

TEST_CASE("motion loss rejects non-finite input") {
  std::vector<rt::TargetState> gt = {{0, 0, 0, 0}};
  std::vector<rt::TargetState> bad = {{std::numeric_limits<double>::quiet_NaN(), 0, 0, 0}};
  std::vector<double> e = {0.5}, gte = {1.0}, ediff = {0.0};
  rt::LossWeights w;
  CHECK_THROWS_AS(rt::motion_loss(bad, gt, e, ediff, gt, gte, w), rt::NumericError);
}

TEST_CASE("weighted input reduces to the prediction on a miss") {
  rt::MeasurementFrame frame(2);
  frame.slots[0] = {0.3, 0.3, 0.1, 0.1};
  frame.occupied[0] = 1;
  rt::Vec x_star = {0.1, 0.2, 0.05, 0.08};
  rt::Vec miss_row = {0.0, 0.0, 1.0};
  auto v = rt::weighted_input(frame, miss_row, x_star);
  for (int d = 0; d < 4; ++d) CHECK(v[d] == doctest::Approx(x_star[d]));

  rt::Vec hit_row = {1.0, 0.0, 0.0};
  auto z = rt::weighted_input(frame, hit_row, x_star);
  CHECK(z[0] == doctest::Approx(0.3));
  CHECK(z[2] == doctest::Approx(0.1));
}

TEST_CASE("weighted input is the exact convex combination") {
  rt::MeasurementFrame frame(2);
  frame.slots[0] = {0.3, 0.0, 0.1, 0.1};
  frame.slots[1] = {-0.3, 0.6, 0.2, 0.2};
  frame.occupied[0] = frame.occupied[1] = 1;
  rt::Vec x_star = {0.0, 0.3, 0.15, 0.15};
  rt::Vec row = {1.0 / 3, 1.0 / 3, 1.0 / 3};
  auto v = rt::weighted_input(frame, row, x_star);
  auto a0 = frame.slots[0].to_array();
  auto a1 = frame.slots[1].to_array();
  for (int d = 0; d < 4; ++d)
    CHECK(v[d] == doctest::Approx((a0[d] + a1[d] + x_star[d]) / 3.0).epsilon(1e-12));
}

TEST_CASE("weighted input drops mass on empty slots and renormalizes") {
  rt::MeasurementFrame frame(2);
  frame.slots[0] = {0.4, 0.0, 0.1, 0.1};
  frame.occupied[0] = 1;  // slot 1 empty
  rt::Vec x_star = {0.0, 0.0, 0.1, 0.1};
  rt::Vec row = {0.25, 0.5, 0.25};  // half the mass on the empty slot
  rt::Vec a_eff;
  auto v = rt::weighted_input(frame, row, x_star, &a_eff);
  CHECK(a_eff[0] == doctest::Approx(0.5));
  CHECK(a_eff[1] == doctest::Approx(0.0));
  CHECK(a_eff[2] == doctest::Approx(0.5));
  CHECK(v[0] == doctest::Approx(0.2));

  // Everything on empty slots degenerates to all-miss.
  rt::Vec empty_row = {0.0, 1.0, 0.0};
  auto w = rt::weighted_input(frame, empty_row, x_star, &a_eff);
  CHECK(a_eff[2] == doctest::Approx(1.0));
  for (int d = 0; d < 4; ++d) CHECK(w[d] == doctest::Approx(x_star[d]));
}

TEST_CASE("weighted input validates the row sum") {
  rt::MeasurementFrame frame(1);
  rt::Vec x_star = {0, 0, 0, 0};
  rt::Vec bad = {0.6, 0.6};
  CHECK_THROWS_AS(rt::weighted_input(frame, bad, x_star), std::invalid_argument);
}

TEST_CASE("zero-weight net predicts the origin and half existence") {
  rt::MotionNet net(10, 6);
  rt::Vec x = {0.2, -0.1, 0.1, 0.2};
  rt::Vec h(10, 0.0);
  rt::Vec x_star, h_next;
  rt::motion_predict(net, x, h, x_star, h_next);
  for (double v : x_star) CHECK(v == 0.0);
  for (double v : h_next) CHECK(v == 0.0);

  auto [e, ediff] = rt::motion_existence(net, h_next, 0.5);
  CHECK(e == doctest::Approx(0.5));
  CHECK(ediff == doctest::Approx(0.0));
  auto [e2, ediff2] = rt::motion_existence(net, h_next, 0.2);
  CHECK(e2 == doctest::Approx(0.5));
  CHECK(ediff2 == doctest::Approx(0.3));
  CHECK_THROWS_AS(rt::motion_existence(net, h_next, 1.4), std::invalid_argument);
}

TEST_CASE("prediction is deterministic and bounded") {
  rt::MotionNet net(12, 8);
  rt::Rng rng(3);
  net.init(rng);
  rt::Vec x = {0.1, 0.1, 0.1, 0.2};
  rt::Vec h(12);
  for (double& v : h) v = rng.uniform(-0.5, 0.5);
  rt::Vec xs1, hn1, xs2, hn2;
  rt::motion_predict(net, x, h, xs1, hn1);
  rt::motion_predict(net, x, h, xs2, hn2);
  CHECK(xs1 == xs2);
  CHECK(hn1 == hn2);
  for (double v : hn1) {
    CHECK(v > -1.0);
    CHECK(v < 1.0);
  }
  auto [e, ediff] = rt::motion_existence(net, hn1, 0.5, 0.3);
  CHECK(e > 0.0);
  CHECK(e < 1.0);
}

TEST_CASE("track windows carry provenance labels and lifecycle existence") {
  auto scene = two_track_scene();
  auto inst = rt::make_motion_instances(scene, 2);
  REQUIRE(inst.size() == 2);

  const auto& w1 = inst[0];  // track 1: frames 1..5
  REQUIRE(w1.steps() == 5);
  CHECK(w1.x0 == rt::Vec{0.1, 0.0, 0.1, 0.2});  // its birth detection
  CHECK(hot_index(w1.a_rows[0]) == 1);           // frame 1 detection sits in slot 1
  CHECK(hot_index(w1.a_rows[1]) == 3);           // dropped: miss column (capacity 3)
  CHECK(hot_index(w1.a_rows[2]) == 0);
  CHECK(hot_index(w1.a_rows[3]) == 3);  // dead
  CHECK(hot_index(w1.a_rows[4]) == 3);
  CHECK(w1.gt_existence == std::vector<double>{1, 1, 1, 0, 0});
  CHECK(w1.gt_states[0].x == doctest::Approx(0.12));
  CHECK(w1.gt_states[3].x == 0.0);  // zero padding past death

  const auto& w2 = inst[1];  // track 2: frames 3..5
  REQUIRE(w2.steps() == 3);
  CHECK(hot_index(w2.a_rows[0]) == 1);
  CHECK(hot_index(w2.a_rows[1]) == 2);
  CHECK(hot_index(w2.a_rows[2]) == 1);
  CHECK(w2.gt_existence == std::vector<double>{1, 1, 1});
}

TEST_CASE("clutter windows are all-miss with zero existence") {
  auto scene = two_track_scene();
  auto neg = rt::make_clutter_instances(scene, 3);
  REQUIRE(neg.size() == 1);  // frame-5 clutter has no following frame
  const auto& w = neg[0];
  CHECK(w.x0 == rt::Vec{0.4, 0.4, 0.05, 0.05});
  REQUIRE(w.steps() == 3);  // frames 2..4
  for (int t = 0; t < w.steps(); ++t) {
    CHECK(hot_index(w.a_rows[t]) == 3);
    CHECK(w.gt_existence[t] == 0.0);
  }
  CHECK(rt::make_clutter_instances(scene, 3, 0).empty());
}

TEST_CASE("window gradients pass the finite-difference check") {
  auto scene = two_track_scene();
  auto inst = rt::make_motion_instances(scene, 2);
  rt::MotionNet net(6, 5);
  rt::Rng rng(17);
  net.init(rng);
  auto params = net.params();
  rt::zero_grads(params);
  rt::LossWeights w{1.0, 1.0, 1.0, 0.1};
  rt::motion_backward(net, inst[0], w);
  auto report = rt::check_gradients(params, [&] { return rt::motion_forward(net, inst[0], w); });
  CHECK(report.ok());
  CHECK(report.checked > 100);
}

TEST_CASE("forward and backward agree on the loss value") {
  auto scene = two_track_scene();
  auto inst = rt::make_motion_instances(scene, 2);
  rt::MotionNet net(8, 6);
  rt::Rng rng(18);
  net.init(rng);
  rt::LossWeights w;
  rt::MotionLossTerms ft, bt;
  double f = rt::motion_forward(net, inst[1], w, nullptr, &ft);
  double b = rt::motion_backward(net, inst[1], w, &bt);
  CHECK(f == doctest::Approx(b).epsilon(1e-12));
  CHECK(ft.total(w) == doctest::Approx(f).epsilon(1e-12));
  CHECK(bt.prediction == doctest::Approx(ft.prediction));
}

TEST_CASE("training lowers the window loss") {
  auto scene = two_track_scene();
  auto data = rt::make_motion_instances(scene, 2);
  rt::MotionNet net(8, 6);
  rt::Rng init_rng(19);
  net.init(init_rng);
  rt::LossWeights w;
  double before = 0.0;
  for (const auto& inst : data) before += rt::motion_forward(net, inst, w);

  rt::TrainConfig tc;
  tc.max_iterations = 400;
  tc.lr0 = 0.003;
  rt::Rng train_rng(20);
  std::vector<rt::TrainLogRow> log;
  auto result = rt::train_motion(net, data, w, tc, train_rng, &log, 100);
  CHECK(result.iterations == 400);
  CHECK(!log.empty());
  CHECK(log.back().iteration <= 400);

  double after = 0.0;
  for (const auto& inst : data) after += rt::motion_forward(net, inst, w);
  CHECK(after < before);
}

TEST_CASE("restricting trainable parameters freezes the rest") {
  auto scene = two_track_scene();
  auto data = rt::make_motion_instances(scene, 2);
  rt::MotionNet net(8, 6);
  rt::Rng init_rng(21);
  net.init(init_rng);
  auto core_before = net.core.weights.value.data;
  auto pred_before = net.pred_head.w.value.data;
  auto exist_before = net.exist_head.w.value.data;

  rt::TrainConfig tc;
  tc.max_iterations = 100;
  tc.lr0 = 0.005;
  rt::Rng train_rng(22);
  std::array<rt::Param*, 1> head = {&net.exist_head.w};
  rt::train_motion(net, data, rt::LossWeights{}, tc, train_rng, nullptr, 200, head);

  CHECK(net.core.weights.value.data == core_before);
  CHECK(net.pred_head.w.value.data == pred_before);
  CHECK(net.exist_head.w.value.data != exist_before);
}
