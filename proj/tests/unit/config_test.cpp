#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "skytrack/config.hpp"
#include "skytrack/error.hpp"
#include "support.hpp"

namespace skytrack {
namespace {

TEST(Config, EmptyObjectGivesDefaults) {
  const EngineConfig cfg = parse_engine_config("{}");
  EXPECT_DOUBLE_EQ(cfg.camera.altitude_m, 100.0);
  EXPECT_DOUBLE_EQ(cfg.camera.lens_angle_deg, 83.0);
  EXPECT_DOUBLE_EQ(cfg.tracker.iou_threshold, 0.3);
  EXPECT_DOUBLE_EQ(cfg.analytics.sampling.time_ratio, 1.0);
  EXPECT_DOUBLE_EQ(cfg.analytics.lane_change.threshold_m, 2.0);
  EXPECT_FALSE(cfg.analytics.lane_change.literal);
  EXPECT_FALSE(cfg.lane_center.has_value());
  EXPECT_EQ(cfg.capacity, 1u);
}

TEST(Config, ReadsEverySection) {
  const EngineConfig cfg = parse_engine_config(R"({
    "camera": {"fov_deg": 90, "altitude_m": 50},
    "video": {"width": 1280, "height": 720},
    "view": {"width": 640, "height": 480},
    "tracker": {"iou_threshold": 0.4, "max_age": 5, "min_hits": 2, "noise": {"measurement_center_var": 4}},
    "sampling": {"time_ratio": 0.5},
    "analytics": {"lane_change_threshold_m": 3, "distance_only": true, "stationary_eps_mps": 0.5},
    "lanes": {"center": [300, 200, 900, 500]},
    "pipeline": {"capacity": 2}
  })");
  EXPECT_DOUBLE_EQ(cfg.camera.altitude_m, 50);
  EXPECT_EQ(cfg.video, (ViewSize{1280, 720}));
  EXPECT_EQ(cfg.view, (ViewSize{640, 480}));
  EXPECT_EQ(cfg.tracker.max_age, 5);
  EXPECT_EQ(cfg.tracker.min_hits, 2);
  EXPECT_DOUBLE_EQ(cfg.tracker.noise.measurement_center_var, 4);
  EXPECT_DOUBLE_EQ(cfg.analytics.sampling.time_ratio, 0.5);
  EXPECT_TRUE(cfg.analytics.lane_change.literal);
  ASSERT_TRUE(cfg.lane_center.has_value());
  EXPECT_EQ(*cfg.lane_center, (BoxCorners{300, 200, 900, 500}));
  EXPECT_EQ(cfg.capacity, 2u);
}

TEST(Config, StrictKeysAndTypes) {
  EXPECT_THROW(parse_engine_config(R"({"camera": {"fov": 90}})"), ParseError);
  EXPECT_THROW(parse_engine_config(R"({"trackers": {}})"), ParseError);
  EXPECT_THROW(parse_engine_config(R"({"tracker": {"max_age": "5"}})"), ParseError);
  EXPECT_THROW(parse_engine_config(R"({"tracker": {"max_age": 2.5}})"), ParseError);
  EXPECT_THROW(parse_engine_config("[1, 2]"), ParseError);
  EXPECT_THROW(parse_engine_config("{"), ParseError);
}

TEST(Config, RangeChecks) {
  EXPECT_THROW(parse_engine_config(R"({"tracker": {"iou_threshold": 1.5}})"), InvalidArgument);
  EXPECT_THROW(parse_engine_config(R"({"sampling": {"time_ratio": 0}})"), InvalidArgument);
  EXPECT_THROW(parse_engine_config(R"({"pipeline": {"capacity": 0}})"), InvalidArgument);
  EXPECT_THROW(parse_engine_config(R"({"lanes": {"center": [0, 0, 100, 100]}})"), InvalidArgument);
}

TEST(Config, JsonRoundTrip) {
  EngineConfig cfg;
  cfg.camera = {80, 70};
  cfg.tracker.max_age = 7;
  cfg.analytics.lane_change.literal = true;
  cfg.lane_center = BoxCorners{500, 300, 1400, 800};
  const EngineConfig back = parse_engine_config(engine_config_to_json(cfg));
  EXPECT_EQ(engine_config_to_json(back), engine_config_to_json(cfg));
  EXPECT_EQ(back.tracker.max_age, 7);
  EXPECT_TRUE(back.analytics.lane_change.literal);
}

TEST(Config, MissingFileNamesThePath) {
  const auto path = testing::scratch_dir("config") / "absent.json";
  try {
    load_engine_config(path);
    FAIL() << "expected an I/O error";
  } catch (const IoError& e) {
    EXPECT_NE(std::string(e.what()).find("absent.json"), std::string::npos);
  }
}

TEST(Config, LoadsFromFile) {
  const auto path = testing::scratch_dir("config_ok") / "c.json";
  std::ofstream(path) << R"({"tracker": {"max_age": 9}})";
  EXPECT_EQ(load_engine_config(path).tracker.max_age, 9);
}

}  // namespace
}  // namespace skytrack
