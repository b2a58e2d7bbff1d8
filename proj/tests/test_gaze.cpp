#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "vrdoc/gaze.hpp"

using namespace vrdoc;

namespace {

constexpr double kDt = 1.0 / 120.0;

GazeSample at(double t, Vec3 dir, bool valid = true) {
  GazeSample s;
  s.t = t;
  s.ray = {{0, 1.6, 0}, normalized(dir)};
  s.valid = valid;
  return s;
}

Vec3 rotated_about_y(double deg) {
  const double a = deg_to_rad(deg);
  return {std::sin(a), 0.0, -std::cos(a)};
}

}  // namespace

TEST(Classify, IdenticalRaysAreFixation) {
  PipelineState st;
  PipelineConfig cfg;
  step_pipeline(st, at(0, {0, 0, -1}), cfg);
  EXPECT_EQ(classify(st, at(kDt, {0, 0, -1}), cfg), Phase::Fixation);
}

TEST(Classify, TwoDegreeJumpIsSaccade) {
  // 2 degrees in 1/120 s is 240 deg/s, above the 30 deg/s threshold
  PipelineState st;
  PipelineConfig cfg;
  step_pipeline(st, at(0, rotated_about_y(0)), cfg);
  const GazeSample next = at(kDt, rotated_about_y(2.0));
  EXPECT_NEAR(angular_velocity(st, next), 240.0, 1e-6);
  EXPECT_EQ(classify(st, next, cfg), Phase::Saccade);
}

TEST(Classify, InvalidSampleResetsWindow) {
  PipelineState st;
  PipelineConfig cfg;
  for (int i = 0; i < 10; ++i) step_pipeline(st, at(i * kDt, {0, 0, -1}), cfg);
  const auto& est = step_pipeline(st, at(10 * kDt, {}, false), cfg);
  EXPECT_EQ(est.phase, Phase::Invalid);
  EXPECT_TRUE(est.window.empty());
  const auto& next = step_pipeline(st, at(11 * kDt, {0, 0, -1}), cfg);
  EXPECT_EQ(next.phase, Phase::Fixation);
  EXPECT_DOUBLE_EQ(next.fixation_start_t, 11 * kDt);
  EXPECT_EQ(next.window.size(), 1u);
}

TEST(Classify, NonMonotoneTimestampRejected) {
  PipelineState st;
  PipelineConfig cfg;
  step_pipeline(st, at(1.0, {0, 0, -1}), cfg);
  EXPECT_THROW(step_pipeline(st, at(1.0, {0, 0, -1}), cfg), StreamOrderError);
  EXPECT_THROW(step_pipeline(st, at(0.5, {0, 0, -1}), cfg), StreamOrderError);
}

TEST(Smooth, IdenticalDirections) {
  std::vector<WindowSample> w{{0.0, {0, 0, -1}}, {0.1, {0, 0, -1}}, {0.2, {0, 0, -1}}};
  const Vec3 s = smooth(w, 0.5);
  EXPECT_NEAR(norm(s - Vec3{0, 0, -1}), 0.0, 1e-15);
}

TEST(Smooth, EqualWeightsAreSymmetric) {
  std::vector<WindowSample> w{{0.0, {1, 0, 0}}, {0.0, {0, 1, 0}}};
  const Vec3 s = smooth(w, 1.0);
  EXPECT_NEAR(s.x, std::sqrt(0.5), 1e-12);
  EXPECT_NEAR(s.y, std::sqrt(0.5), 1e-12);
  EXPECT_NEAR(s.z, 0.0, 1e-12);
}

TEST(Smooth, FiveSampleWindowMatchesFrozenOracle) {
  const std::vector<double> ts{0.0, 0.05, 0.1, 0.15, 0.2};
  const std::vector<Vec3> ds{normalized({0.01, 0.0, -1.0}), normalized({0.0, 0.02, -1.0}), normalized({-0.01, 0.0, -1.0}),
                             normalized({0.0, -0.01, -1.0}), normalized({0.02, 0.01, -1.0})};
  std::vector<WindowSample> w;
  for (std::size_t i = 0; i < ts.size(); ++i) w.push_back({ts[i], ds[i]});
  const Vec3 s = smooth(w, 0.5);
  // frozen from a 50-digit evaluation
  EXPECT_NEAR(s.x, 0.004147549391164613847, 1e-9);
  EXPECT_NEAR(s.y, 0.003931249010057416422, 1e-9);
  EXPECT_NEAR(s.z, -0.9999836714243231945, 1e-9);
  const auto o = oracle::weighted_mean(ts, ds, 0.5L);
  EXPECT_NEAR(s.x, static_cast<double>(o[0]), 1e-12);
  EXPECT_NEAR(s.y, static_cast<double>(o[1]), 1e-12);
  EXPECT_NEAR(s.z, static_cast<double>(o[2]), 1e-12);
}

TEST(Smooth, EmptyWindowIsContractViolation) {
  EXPECT_THROW(smooth(std::vector<WindowSample>{}, 0.5), ContractViolation);
}

TEST(Smooth, UnitLambdaIsArithmeticMean) {
  std::mt19937_64 g(3);
  std::normal_distribution<double> n(0.0, 0.02);
  for (int k = 0; k < 500; ++k) {
    std::vector<WindowSample> w;
    Vec3 sum;
    for (int i = 0; i < 30; ++i) {
      const Vec3 d = normalized({n(g), n(g), -1});
      w.push_back({i * kDt, d});
      sum += d;
    }
    const Vec3 mean = normalized(sum);
    const Vec3 s = smooth(w, 1.0);
    EXPECT_NEAR(norm(s - mean), 0.0, 1e-9);
  }
}

TEST(StepPipeline, NoiseFreeEstimatesEqualRawDirections) {
  PipelineState st;
  PipelineConfig cfg;
  for (int i = 0; i < 240; ++i) {
    const Vec3 d = rotated_about_y(i < 120 ? 0.0 : 5.0);
    const auto& e = step_pipeline(st, at(i * kDt, d), cfg);
    EXPECT_NEAR(norm(e.point - d), 0.0, 1e-12) << i;
  }
}

TEST(StepPipeline, InjectedJumpGivesExactlyOneSaccade) {
  // 2.5 degrees in one sample is 300 deg/s
  PipelineState st;
  PipelineConfig cfg;
  std::vector<Phase> phases;
  for (int i = 0; i < 120; ++i) {
    phases.push_back(step_pipeline(st, at(i * kDt, rotated_about_y(i < 60 ? 0.0 : 2.5)), cfg).phase);
  }
  for (int i = 0; i < 120; ++i) EXPECT_EQ(phases[i], i == 60 ? Phase::Saccade : Phase::Fixation) << i;
}

TEST(StepPipeline, WindowCapped) {
  PipelineState st;
  PipelineConfig cfg;
  for (int i = 0; i < 600; ++i) {
    const auto& e = step_pipeline(st, at(i * kDt, {0, 0, -1}), cfg);
    ASSERT_FALSE(e.window.empty());
    EXPECT_LE(e.t - e.window.front(), cfg.fixation_window_s + 1e-12);
    EXPECT_LE(e.fixation_start_t, e.window.back());
  }
  EXPECT_GE(st.window.size(), 25u);
}

TEST(StepPipeline, DeterministicReplay) {
  auto log = [] {
    std::mt19937_64 g(21);
    std::normal_distribution<double> n(0.0, 0.004);
    PipelineState st;
    PipelineConfig cfg;
    std::ostringstream os;
    os.precision(17);
    for (int i = 0; i < 2000; ++i) {
      const bool valid = (i % 400) > 10;
      const auto& e = step_pipeline(st, at(i * kDt, {n(g) + (i / 300) * 0.05, n(g), -1}, valid), cfg);
      os << e.t << ' ' << static_cast<int>(e.phase) << ' ' << e.point.x << ' ' << e.point.y << ' ' << e.point.z << ' '
         << e.window.size() << '\n';
    }
    return os.str();
  };
  EXPECT_EQ(log(), log());
}

TEST(StepPipeline, NeverFixationAboveThreshold) {
  std::mt19937_64 g(22);
  std::uniform_real_distribution<double> jump(0.0, 1.0);
  PipelineState st;
  PipelineConfig cfg;
  Vec3 d{0, 0, -1};
  std::optional<Vec3> prev_valid;
  for (int i = 0; i < 20000; ++i) {
    const double a = jump(g) < 0.05 ? 3.0 : 0.1 * jump(g);
    d = normalized(d + Vec3{a * 0.0175 * (jump(g) - 0.5), a * 0.0175 * (jump(g) - 0.5), 0});
    const bool valid = jump(g) > 0.01;
    const GazeSample s = at(i * kDt, d, valid);
    const auto& e = step_pipeline(st, s, cfg);
    if (valid && prev_valid && angular_distance(*prev_valid, d) / kDt > cfg.saccade_velocity_deg_s) {
      EXPECT_NE(e.phase, Phase::Fixation) << i;
    }
    if (valid) prev_valid = d;
  }
}

TEST(StepPipeline, SmoothingNeverWorseThanWorstSample) {
  std::mt19937_64 g(23);
  const double sigma = deg_to_rad(1.1);
  std::normal_distribution<double> n(0.0, sigma);
  for (int k = 0; k < 2000; ++k) {
    const Vec3 mean = normalized({0.1 * n(g), 0.1 * n(g), -1});
    std::vector<WindowSample> w;
    double worst = 0.0;
    for (int i = 0; i < 30; ++i) {
      const Vec3 d = normalized(Orientation::look_rotation(mean).rotate(normalized({std::tan(n(g)), std::tan(n(g)), -1})));
      worst = std::max(worst, angular_distance(d, mean));
      w.push_back({i * kDt, d});
    }
    EXPECT_LE(angular_distance(smooth(w, 0.5), mean), worst + 1e-12);
  }
}

TEST(HeadPose, FallsBackToGazeDirection) {
  GazeSample s = at(0, {1, 0, -1});
  const Pose p = head_pose(s);
  EXPECT_NEAR(norm(p.orientation.forward() - normalized({1, 0, -1})), 0.0, 1e-12);
  s.head_orientation = Orientation::identity();
  EXPECT_EQ(head_pose(s).orientation, Orientation::identity());
}
