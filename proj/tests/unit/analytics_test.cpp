#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "skytrack/analytics.hpp"
#include "skytrack/error.hpp"

namespace skytrack {
namespace {

TEST(FpsMeter, ThreeHundredFramesAtThirtyHz) {
  FpsMeter m;
  double t = 0.0;
  for (int i = 0; i < 300; ++i) {
    m.record(t, t + 1.0 / 30.0);
    t += 1.0 / 30.0;
  }
  EXPECT_EQ(m.frames(), 300);
  EXPECT_NEAR(m.fps(), 30.0, 1e-6);
}

TEST(FpsMeter, UndefinedWithoutFrames) {
  FpsMeter m;
  EXPECT_FALSE(m.ready());
  EXPECT_THROW(m.fps(), NotReady);
  m.record(1.0, 1.0);
  EXPECT_THROW(m.fps(), NotReady);
}

TEST(FpsMeter, ClockError) {
  FpsMeter m;
  EXPECT_THROW(m.record(2.0, 1.0), OrderingError);
  EXPECT_EQ(m.frames(), 0);
}

TEST(FpsMeter, OrderOfRecordsDoesNotMatter) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> d(0.001, 0.2);
  std::vector<double> spans(500);
  for (auto& s : spans) s = d(rng);
  FpsMeter forward, shuffled;
  for (double s : spans) forward.record(10.0, 10.0 + s);
  std::shuffle(spans.begin(), spans.end(), rng);
  for (double s : spans) shuffled.record(10.0, 10.0 + s);
  EXPECT_EQ(forward.fps(), shuffled.fps());
}

FpsMeter meter_at(double fps) {
  FpsMeter m;
  m.record(0.0, 1.0 / fps);
  return m;
}

TEST(SamplingInterval, Examples) {
  EXPECT_EQ(sampling_interval(meter_at(30), {1.0}), 30);
  EXPECT_EQ(sampling_interval(meter_at(30), {0.5}), 15);
  EXPECT_EQ(sampling_interval(meter_at(0.4), {1.0}), 1);
  EXPECT_THROW(sampling_interval(FpsMeter{}, {1.0}), NotReady);
}

TEST(Kinematics, PixelStep) {
  EXPECT_EQ(pixel_step({0, 0, 2, 2}, {0, 0, 2, 2}), 0.0);
  EXPECT_DOUBLE_EQ(pixel_step({-1, -1, 1, 1}, {2, 3, 4, 5}), 5.0);
  EXPECT_DOUBLE_EQ(pixel_step({9.5, 1, 11.5, 3}, {12.5, 1, 14.5, 3}), 3.0);
}

TEST(Kinematics, RealDistance) {
  const ScaleModel scale{0.0, 0.1};
  const std::vector<double> steps(30, 5.0);
  EXPECT_NEAR(real_distance(steps, 30, scale), 15.0, 1e-12);
  EXPECT_EQ(real_distance(std::vector<double>(30, 0.0), 30, scale), 0.0);
  EXPECT_THROW(real_distance(std::vector<double>(29, 5.0), 30, scale), NotReady);
  // Only the most recent window counts.
  std::vector<double> longer(10, 100.0);
  longer.insert(longer.end(), 30, 5.0);
  EXPECT_NEAR(real_distance(longer, 30, scale), 15.0, 1e-12);
}

TEST(Kinematics, SpeedAndAcceleration) {
  EXPECT_DOUBLE_EQ(speed(15, {1.0}), 15);
  EXPECT_EQ(speed(0, {1.0}), 0);
  EXPECT_DOUBLE_EQ(speed(10, {0.5}), 20);
  EXPECT_EQ(acceleration(12, 12, {1.0}), 0);
  EXPECT_DOUBLE_EQ(acceleration(18, 15, {1.0}), 3);
  EXPECT_DOUBLE_EQ(acceleration(15, 20, {0.5}), -10);
}

TEST(Kinematics, Heading) {
  EXPECT_DOUBLE_EQ(*heading(1, 0), 0);
  EXPECT_DOUBLE_EQ(*heading(0, 1), 90);
  EXPECT_DOUBLE_EQ(*heading(3, 3), 45);
  EXPECT_DOUBLE_EQ(*heading(-1, 0), 180);
  EXPECT_FALSE(heading(0, 0).has_value());
}

TEST(Direction, Bins) {
  EXPECT_EQ(classify_direction(90, 0, 0.2), Direction::Stationary);
  EXPECT_EQ(classify_direction(90, 5, 0.2), Direction::N);
  EXPECT_EQ(classify_direction(-100, 5, 0.2), Direction::S);
  EXPECT_EQ(classify_direction(180, 5, 0.2), Direction::W);
  EXPECT_EQ(classify_direction(-179.9, 5, 0.2), Direction::W);
  // Lower edges belong to the bin, upper edges to the next one.
  EXPECT_EQ(classify_direction(-22.5, 5, 0.2), Direction::E);
  EXPECT_EQ(classify_direction(22.5, 5, 0.2), Direction::NE);
  EXPECT_EQ(classify_direction(157.5, 5, 0.2), Direction::W);
  EXPECT_EQ(classify_direction(-157.5, 5, 0.2), Direction::SW);
}

TEST(Direction, EveryHeadingLandsInTheNearestBin) {
  for (int tenth = -1799; tenth <= 1800; ++tenth) {
    const double h = tenth / 10.0;
    const Direction d = classify_direction(h, 1.0, 0.2);
    ASSERT_NE(d, Direction::Stationary);
    double off = std::fmod(h - direction_center_deg(d) + 540.0, 360.0) - 180.0;
    ASSERT_GE(off, -22.5) << h;
    ASSERT_LT(off, 22.5) << h;
  }
}

TEST(Direction, Names) {
  for (int i = 0; i < kDirectionCount; ++i) {
    const auto d = static_cast<Direction>(i);
    EXPECT_EQ(parse_direction(to_string(d)), d);
  }
  EXPECT_FALSE(parse_direction("up").has_value());
  EXPECT_TRUE(is_cardinal(Direction::N));
  EXPECT_FALSE(is_cardinal(Direction::NE));
  EXPECT_FALSE(is_cardinal(Direction::Stationary));
}

// Endpoints in pixels at 1 m/px; image y grows downward, so north is -y.
WindowEndpoints window(Point start, Point end, Direction a, Direction b, std::optional<double> hd = {}) {
  return {start, end, a, b, hd};
}

const ScaleModel kUnit{0.0, 1.0};

TEST(LaneChangeRule, ZeroDisplacement) {
  const LaneChangeParams p;
  EXPECT_EQ(detect_lane_change(window({5, 5}, {5, 5}, Direction::N, Direction::N), p, kUnit), LaneChange::None);
  EXPECT_EQ(detect_lane_change(window({5, 5}, {5, 5}, Direction::Stationary, Direction::Stationary), p, kUnit),
            LaneChange::None);
}

TEST(LaneChangeRule, NorthboundOneLaneLeft) {
  const LaneChangeParams p;  // 2 m
  EXPECT_EQ(detect_lane_change(window({0, 0}, {-3.5, -10}, Direction::N, Direction::N), p, kUnit),
            LaneChange::Left);
  EXPECT_EQ(detect_lane_change(window({0, 0}, {3.5, -10}, Direction::N, Direction::N), p, kUnit),
            LaneChange::Right);
}

TEST(LaneChangeRule, StraightTravelIsNotALaneChange) {
  const LaneChangeParams p;
  EXPECT_EQ(detect_lane_change(window({0, 0}, {0, -10}, Direction::N, Direction::N), p, kUnit), LaneChange::None);
  EXPECT_EQ(detect_lane_change(window({0, 0}, {0.9, -10}, Direction::N, Direction::N), p, kUnit),
            LaneChange::None);
}

TEST(LaneChangeRule, DistanceOnlyModeSkipsTheLateralTest) {
  LaneChangeParams p;
  p.literal = true;
  EXPECT_EQ(detect_lane_change(window({0, 0}, {0.9, -10}, Direction::N, Direction::N), p, kUnit),
            LaneChange::Right);
  EXPECT_EQ(detect_lane_change(window({0, 0}, {-0.1, -1}, Direction::N, Direction::N), p, kUnit),
            LaneChange::None);
}

TEST(LaneChangeRule, CardinalChangeIsATurn) {
  const LaneChangeParams p;
  EXPECT_EQ(detect_lane_change(window({0, 0}, {8, -8}, Direction::N, Direction::E), p, kUnit), LaneChange::Turn);
  // Below the distance threshold nothing fires, turn or not.
  EXPECT_EQ(detect_lane_change(window({0, 0}, {1, -1}, Direction::N, Direction::E), p, kUnit), LaneChange::None);
}

TEST(LaneChangeRule, DiagonalChangeFallsBackToTheLateralSign) {
  const LaneChangeParams p;
  // Northbound reference, drifting west: left even though dir_end is NW.
  EXPECT_EQ(detect_lane_change(window({0, 0}, {-4, -8}, Direction::N, Direction::NW, 90.0), p, kUnit),
            LaneChange::Left);
}

TEST(LaneChangeRule, EastboundSides) {
  const LaneChangeParams p;
  // Heading east, north of the path is the driver's left.
  EXPECT_EQ(detect_lane_change(window({0, 0}, {10, -3.5}, Direction::E, Direction::E), p, kUnit),
            LaneChange::Left);
  EXPECT_EQ(detect_lane_change(window({0, 0}, {10, 3.5}, Direction::E, Direction::E), p, kUnit),
            LaneChange::Right);
}

TEST(LaneChangeRule, ScaleConvertsPixelsToMeters) {
  const LaneChangeParams p;
  const ScaleModel coarse{0.0, 0.1};
  // 35 px at 0.1 m/px is 3.5 m sideways.
  EXPECT_EQ(detect_lane_change(window({0, 0}, {-35, -100}, Direction::N, Direction::N), p, coarse),
            LaneChange::Left);
  // 10 px total is only 1 m.
  EXPECT_EQ(detect_lane_change(window({0, 0}, {-6, -8}, Direction::N, Direction::N), p, coarse), LaneChange::None);
}

TEST(LaneChangeRule, Names) {
  for (auto c : {LaneChange::None, LaneChange::Left, LaneChange::Right, LaneChange::Turn}) {
    EXPECT_EQ(parse_lane_change(to_string(c)), c);
  }
  EXPECT_FALSE(parse_lane_change("u-turn").has_value());
}

std::vector<TrackOutput> one_track(std::int64_t id, double cx, double cy) {
  return {{id, {cx - 5, cy - 10, cx + 5, cy + 10}, TrackStatus::Tracked}};
}

TEST(MicroEstimator, ConstantVelocityTrack) {
  MicroEstimator est;
  const ScaleModel scale{0.0, 0.1};
  const int sfps = 30;
  std::vector<MicroRecord> all;
  for (int f = 0; f < 120; ++f) {
    for (auto& r : est.update(f, one_track(7, 100.0 + 5.0 * f, 500.0), sfps, scale)) all.push_back(r);
  }
  ASSERT_FALSE(all.empty());
  EXPECT_GE(all.front().frame, sfps);  // needs a full window first
  for (const auto& r : all) {
    EXPECT_EQ(r.track_id, 7);
    EXPECT_NEAR(r.speed_mps, 15.0, 1e-9);
    EXPECT_EQ(r.direction, Direction::E);
    ASSERT_TRUE(r.heading_deg.has_value());
    EXPECT_NEAR(*r.heading_deg, 0.0, 1e-9);
    EXPECT_EQ(r.lane_change, LaneChange::None);
    if (r.acceleration_mps2) {
      EXPECT_NEAR(*r.acceleration_mps2, 0.0, 1e-9);
    }
  }
  EXPECT_TRUE(std::any_of(all.begin(), all.end(), [](const MicroRecord& r) { return r.acceleration_mps2; }));
}

TEST(MicroEstimator, StationaryTrackHasNoHeading) {
  MicroEstimator est;
  const ScaleModel scale{0.0, 0.1};
  std::vector<MicroRecord> all;
  for (int f = 0; f < 40; ++f) {
    for (auto& r : est.update(f, one_track(1, 300, 300), 10, scale)) all.push_back(r);
  }
  ASSERT_FALSE(all.empty());
  for (const auto& r : all) {
    EXPECT_EQ(r.direction, Direction::Stationary);
    EXPECT_FALSE(r.heading_deg.has_value());
    EXPECT_EQ(r.speed_mps, 0.0);
  }
}

TEST(MicroEstimator, ZeroIntervalOnlyAccumulates) {
  MicroEstimator est;
  const ScaleModel scale{0.0, 0.1};
  for (int f = 0; f < 40; ++f) EXPECT_TRUE(est.update(f, one_track(1, 10.0 * f, 300), 0, scale).empty());
  EXPECT_FALSE(est.update(40, one_track(1, 400, 300), 10, scale).empty());
}

TEST(MicroEstimator, SingleLaneChangeIsReportedOnce) {
  // Northbound at 10 px/frame (1 m/frame at 0.1 m/px); shifts 35 px west
  // between frames 60 and 75, then continues straight.
  MicroEstimator est;
  const ScaleModel scale{0.0, 0.1};
  std::vector<MicroRecord> events;
  for (int f = 0; f < 200; ++f) {
    const double shift = f < 60 ? 0.0 : f < 75 ? -35.0 * (f - 60) / 15.0 : -35.0;
    for (auto& r : est.update(f, one_track(3, 900.0 + shift, 2500.0 - 10.0 * f), 10, scale)) {
      if (r.lane_change != LaneChange::None) events.push_back(r);
    }
  }
  ASSERT_EQ(events.size(), 1u);
  EXPECT_EQ(events[0].lane_change, LaneChange::Left);
  EXPECT_GT(events[0].frame, 60);
}

}  // namespace
}  // namespace skytrack
