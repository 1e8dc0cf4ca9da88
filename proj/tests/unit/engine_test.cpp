#include <gtest/gtest.h>

#include <algorithm>

#include "skytrack/engine.hpp"
#include "skytrack/synth.hpp"
#include "support.hpp"

namespace skytrack {
namespace {

DetectionFrame empty_frame(std::int64_t i, double fps = 30.0) { return {i, static_cast<double>(i) / fps, {}}; }

TEST(Engine, GeometryFromConfig) {
  EngineConfig cfg;
  cfg.view = {1024, 768};
  const Engine e(cfg);
  EXPECT_EQ(e.drawing_area(), (DrawingArea{0, 96, 1024, 576}));
  // Scale is taken over the video's own pixels, independent of the view.
  EXPECT_NEAR(e.scale().meters_per_pixel, 176.94505291118875 / 1920.0, 1e-12);
  EXPECT_FALSE(e.lane_regions().has_value());
}

TEST(Engine, EmptyFramesProduceNothingButTheClock) {
  Engine e(EngineConfig{});
  for (std::int64_t i = 0; i < 90; ++i) {
    const FrameResult r = e.process(empty_frame(i));
    EXPECT_TRUE(r.tracks.empty());
    EXPECT_TRUE(r.micro.empty());
    EXPECT_TRUE(r.draw.empty());
  }
  ASSERT_TRUE(e.sampling_interval().has_value());
  EXPECT_EQ(*e.sampling_interval(), 30);
}

TEST(Engine, MacroSnapshotsOnIntervalBoundaries) {
  Engine e(EngineConfig{});
  std::vector<std::int64_t> at;
  for (std::int64_t i = 0; i < 100; ++i) {
    const FrameResult r = e.process(empty_frame(i));
    if (r.macro) at.push_back(r.frame);
  }
  ASSERT_GE(at.size(), 2u);
  for (std::size_t k = 1; k < at.size(); ++k) EXPECT_EQ(at[k] - at[k - 1], 30);
}

TEST(Engine, ZeroNoiseSpeedMatchesTruth) {
  Scenario sc = preset("straight-e");
  const SynthOutput s = generate(sc);
  const auto results = testing::run_engine(testing::config_for(sc), s.detections);
  int n = 0;
  for (const auto& r : results) {
    for (const auto& m : r.micro) {
      ++n;
      EXPECT_NEAR(m.speed_mps, 10.0, 1e-6) << "frame " << m.frame;
      EXPECT_EQ(m.direction, Direction::E);
      EXPECT_EQ(m.lane_change, LaneChange::None);
    }
  }
  EXPECT_GT(n, 60);
}

TEST(Engine, LanesCountTracks) {
  EngineConfig cfg;
  cfg.lane_center = BoxCorners{400, 300, 1520, 780};
  Engine e(cfg);
  ASSERT_TRUE(e.lane_regions().has_value());
  DetectionFrame f{0, 0.0, {{{600, 100, 20, 40}, 0.9, "car"}}};
  for (std::int64_t i = 0; i < 61; ++i) {
    f.frame = i;
    f.timestamp = i / 30.0;
    const FrameResult r = e.process(f);
    if (r.macro) {
      EXPECT_EQ(r.macro->total_vehicles, 1);
      EXPECT_EQ(r.macro->lane_counts[0], 1);
    }
  }
}

TEST(Engine, DrawCommandsFollowTracks) {
  EngineConfig cfg;
  cfg.view = {960, 540};
  Engine e(cfg);
  const FrameResult r = e.process({0, 0.0, {{{100, 100, 40, 20}, 0.9, "car"}}});
  ASSERT_EQ(r.tracks.size(), 1u);
  ASSERT_EQ(r.draw.size(), 1u);
  EXPECT_NEAR(r.draw[0].corners[0].x, 50, 1e-9);
  EXPECT_NEAR(r.draw[0].corners[0].y, 50, 1e-9);
  EXPECT_EQ(r.draw[0].track_id, r.tracks[0].id);
}

}  // namespace
}  // namespace skytrack
