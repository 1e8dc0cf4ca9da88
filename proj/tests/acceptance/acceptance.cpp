// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any selected criterion fails.
//
//   skytrack_acceptance            run all
//   skytrack_acceptance --only 4   run one

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "skytrack/eval.hpp"
#include "skytrack/geometry.hpp"
#include "skytrack/hungarian.hpp"
#include "skytrack/pipeline.hpp"
#include "skytrack/synth.hpp"
#include "skytrack_cli/cli.hpp"
#include "support.hpp"

namespace {

using namespace skytrack;
using skytrack::testing::config_for;
using skytrack::testing::run_engine;

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int number;
  const char* title;
  double budget_s;  // wall-clock limit; 0 for none
  std::function<Outcome()> check;
};

bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

// ---- 1 ------------------------------------------------------------------------

Outcome metrics_from_counts() {
  const Prf m = prf({2956, 52, 406});
  const bool ok = near(m.precision, 98.27, 0.01) && near(m.recall, 87.93, 0.01) && near(m.f1, 92.85, 0.01);
  return {ok, fmt::format("P={:.4f} R={:.4f} F1={:.4f}, want 98.27/87.93/92.85 within 0.01", m.precision,
                          m.recall, m.f1)};
}

// ---- 2 ------------------------------------------------------------------------

// Frames at which a truth vehicle's matched track id changes, as "frame:truth_id".
std::string switch_frames(std::span<const FrameBoxes> truth, std::span<const FrameBoxes> pred) {
  std::map<std::int64_t, const FrameBoxes*> by_frame;
  for (const auto& p : pred) by_frame[p.frame] = &p;
  std::map<std::int64_t, std::int64_t> last;
  std::string out;
  for (const auto& t : truth) {
    auto it = by_frame.find(t.frame);
    if (it == by_frame.end()) continue;
    for (const auto& [tid, pid] : match_frame(t.boxes, it->second->boxes).pairs) {
      auto [prev, fresh] = last.try_emplace(tid, pid);
      if (!fresh && prev->second != pid) out += fmt::format(" @{}:{}", t.frame, tid);
      prev->second = pid;
    }
  }
  return out;
}

Outcome end_to_end_quality() {
  std::string detail;
  bool ok = true;
  for (const char* name : {"two-crossing-vehicles", "occlusion-gap"}) {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
      Scenario s = preset(name);
      s.noise.position_sigma_px = 2.0;
      s.noise.miss_probability = 0.05;
      s.noise.seed = seed;
      const SynthOutput gen = generate(s);
      EngineConfig cfg = config_for(s);
      cfg.tracker.max_age = 5;  // the occlusion gap is 3 frames
      const auto results = run_engine(cfg, gen.detections);
      const auto truth = frames_from_truth(gen.truth);
      const auto pred = skytrack::testing::frames_from_results(results);
      const EvalReport r = evaluate(truth, pred);
      const bool run_ok = r.metrics && r.metrics->precision >= 95.0 && r.metrics->recall >= 85.0 &&
                          (std::strcmp(name, "occlusion-gap") != 0 || r.id_switches == 0);
      ok = ok && run_ok;
      detail += fmt::format("{}#{} P={:.2f} R={:.2f} sw={}{}; ", name, seed, r.metrics ? r.metrics->precision : 0.0,
                            r.metrics ? r.metrics->recall : 0.0, r.id_switches, switch_frames(truth, pred));
    }
  }
  return {ok, detail};
}

// ---- 3 ------------------------------------------------------------------------

Outcome realtime_drop_policy() {
  Scenario s = preset("two-crossing-vehicles");
  s.duration_s = 5.0;
  const SynthOutput gen = generate(s);
  const EngineConfig cfg = config_for(s);

  auto replay = [&](double cost_s) {
    Engine engine(cfg);
    PipelineOptions o;
    o.replay = ReplayMode::Realtime;
    o.clock = ClockMode::Virtual;
    o.capacity = 1;
    o.stage_cost = [cost_s](const FrameEnvelope&) { return cost_s; };
    return run_pipeline(envelope_source(std::span<const DetectionFrame>(gen.detections)),
                        [&](const FrameEnvelope& e) { return engine.process(e.payload); }, {}, o);
  };

  const double period = 1.0 / s.fps;
  const PipelineStats light = replay(0.020);
  const PipelineStats heavy = replay(0.050);
  const bool light_ok = light.dropped == 0 && near(light.current_fps, 30.0, 1.0);
  const bool heavy_ok = near(heavy.current_fps, 20.0, 2.0) && heavy.max_latency_s <= 0.050 + period + 1e-9 &&
                        heavy.processed + heavy.dropped == heavy.received;
  return {light_ok && heavy_ok,
          fmt::format("20ms: drops={} rate={:.2f}/s; 50ms: rate={:.2f}/s drops={} max latency={:.4f}s (bound {:.4f}s)",
                      light.dropped, light.current_fps, heavy.current_fps, heavy.dropped, heavy.max_latency_s,
                      0.050 + period)};
}

// ---- 4 ------------------------------------------------------------------------

Outcome kinematics() {
  bool ok = true;
  std::string detail;
  for (int d = 0; d < 8; ++d) {
    const Direction dir = static_cast<Direction>(d);
    std::string name = "straight-" + std::string(to_string(dir));
    std::transform(name.begin(), name.end(), name.begin(), [](unsigned char c) { return std::tolower(c); });
    const Scenario s = preset(name);
    const SynthOutput gen = generate(s);
    const auto results = run_engine(config_for(s), gen.detections);

    double worst_speed = 0.0;
    double worst_accel = 0.0;
    int records = 0;
    int wrong_bins = 0;
    for (const auto& r : results) {
      for (const auto& m : r.micro) {
        ++records;
        worst_speed = std::max(worst_speed, std::abs(m.speed_mps - 10.0) / 10.0);
        if (m.acceleration_mps2) worst_accel = std::max(worst_accel, std::abs(*m.acceleration_mps2));
        if (m.direction != dir) ++wrong_bins;
      }
    }
    const bool dir_ok = records > 0 && worst_speed <= 0.02 && worst_accel < 1e-6 && wrong_bins == 0;
    ok = ok && dir_ok;
    detail += fmt::format("{}: n={} dv={:.2e} |a|={:.1e} bad_bins={}; ", to_string(dir), records, worst_speed,
                          worst_accel, wrong_bins);
  }
  return {ok, detail};
}

// ---- 5 ------------------------------------------------------------------------

double brute_force_min(const CostMatrix& c) {
  const CostMatrix m = c.rows() <= c.cols() ? c : CostMatrix(c.transpose());
  std::vector<int> cols(static_cast<std::size_t>(m.cols()));
  std::iota(cols.begin(), cols.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double sum = 0.0;
    for (Eigen::Index r = 0; r < m.rows(); ++r) sum += m(r, cols[static_cast<std::size_t>(r)]);
    best = std::min(best, sum);
  } while (std::next_permutation(cols.begin(), cols.end()));
  return best;
}

Outcome hungarian_optimality() {
  std::mt19937 rng(20240611);
  std::uniform_int_distribution<int> dim(1, 6);
  std::uniform_int_distribution<int> value(0, 99);
  int agree = 0;
  const int trials = 1000;
  for (int t = 0; t < trials; ++t) {
    CostMatrix c(dim(rng), dim(rng));
    for (Eigen::Index i = 0; i < c.rows(); ++i)
      for (Eigen::Index j = 0; j < c.cols(); ++j) c(i, j) = value(rng);
    const auto pairs = hungarian_min_cost(c);
    const bool full = static_cast<Eigen::Index>(pairs.size()) == std::min(c.rows(), c.cols());
    if (full && assignment_cost(c, pairs) == brute_force_min(c)) ++agree;
  }
  return {agree == trials, fmt::format("{}/{} matrices match the brute-force optimum", agree, trials)};
}

// ---- 6 ------------------------------------------------------------------------

Outcome geometry_vectors() {
  int failures = 0;
  std::string detail;
  auto fail = [&](const std::string& msg) {
    ++failures;
    detail += msg;
  };
  auto expect_area = [&](ViewSize video, ViewSize view, DrawingArea want) {
    const DrawingArea got = compute_drawing_area(video, view);
    if (!(got == want)) {
      fail(fmt::format("area {}x{} in {}x{} gave {}x{}@({},{}); ", video.width, video.height, view.width,
                            view.height, got.width, got.height, got.dx, got.dy));
    }
  };
  expect_area({1920, 1080}, {1024, 768}, {0, 96, 1024, 576});
  expect_area({1080, 1920}, {1024, 768}, {296, 0, 432, 768});
  expect_area({1000, 1000}, {1000, 1000}, {0, 0, 1000, 1000});

  // Independent value of 200 tan(41.5 deg), evaluated in arbitrary precision.
  constexpr double kWidth83 = 176.94505291118875;
  const double w90 = ground_width({100.0, 90.0});
  const double w83 = ground_width({100.0, 83.0});
  const double w_tiny = ground_width({1e-12, 83.0});
  if (w90 != 200.0) fail(fmt::format("90deg width {}; ", w90));
  if (!near(w83, kWidth83, 1e-9) || !near(w83, 176.93, 0.02)) fail(fmt::format("83deg width {}; ", w83));
  if (!(w_tiny > 0.0 && w_tiny < 1e-11)) fail(fmt::format("near-zero altitude width {}; ", w_tiny));

  const double s200 = pixel_scale(200.0, {0, 0, 1000, 1}).meters_per_pixel;
  const double s1 = pixel_scale(1.0, {0, 0, 1, 1}).meters_per_pixel;
  const double s83 = pixel_scale(w83, {0, 0, 1024, 1}).meters_per_pixel;
  if (s200 != 0.2) fail(fmt::format("200/1000 gave {}; ", s200));
  if (s1 != 1.0) fail(fmt::format("1/1 gave {}; ", s1));
  if (!near(s83, 0.1728, 5e-5)) fail(fmt::format("83deg over 1024 gave {}; ", s83));

  if (failures == 0) detail = fmt::format("3 drawing areas, widths 200 / {:.8f} m, scales 0.2 / 1 / {:.6f}", w83, s83);
  return {failures == 0, detail};
}

// ---- 7 ------------------------------------------------------------------------

Outcome lane_change() {
  const Scenario s = preset("lane-change-left");
  const SynthOutput gen = generate(s);
  const auto results = run_engine(config_for(s), gen.detections);
  const auto truth = frames_from_truth(gen.truth);
  const auto pred = skytrack::testing::frames_from_results(results);
  const auto ids = skytrack::testing::dominant_ids(truth, pred);

  std::map<std::int64_t, std::vector<std::pair<std::int64_t, LaneChange>>> events;
  for (const auto& r : results) {
    for (const auto& m : r.micro) {
      if (m.lane_change != LaneChange::None) events[m.track_id].emplace_back(m.frame, m.lane_change);
    }
  }
  const std::int64_t changer = ids.count(1) ? ids.at(1) : -1;
  bool ok = changer > 0 && events[changer].size() == 1 && events[changer][0].second == LaneChange::Left;
  std::string detail = fmt::format("lane-changing vehicle is track {}: ", changer);
  for (const auto& [id, ev] : events) {
    if (id != changer && !ev.empty()) ok = false;
    for (const auto& [frame, kind] : ev) detail += fmt::format("track {} {} @frame {}; ", id, to_string(kind), frame);
  }
  if (events.empty()) detail += "no events";
  return {ok, detail};
}

// ---- 8 ------------------------------------------------------------------------

Outcome determinism() {
  namespace fs = std::filesystem;
  const fs::path dir = skytrack::testing::scratch_dir("acceptance_determinism");
  std::istringstream no_input;
  std::ostringstream sink;
  auto cli = [&](std::vector<std::string> args) { return cli::run(args, no_input, sink, sink); };

  bool ok = cli({"synth", "--preset", "left-turn", "--sigma", "2", "--miss", "0.05", "--fp-rate", "0.2", "--seed",
                 "11", "--out-dir", (dir / "scenario").string()}) == 0;
  const std::string det = (dir / "scenario" / "detections.jsonl").string();
  std::string detail;
  for (const auto& extra : std::vector<std::vector<std::string>>{{}, {"--realtime", "--simulate-cost-ms", "50"}}) {
    for (const char* run : {"a", "b"}) {
      std::vector<std::string> args{"track", "--detections", det, "--out-dir", (dir / run).string()};
      args.insert(args.end(), extra.begin(), extra.end());
      ok = ok && cli(args) == 0;
    }
    int identical = 0;
    for (const char* file : {"tracks.csv", "micro.csv", "macro.csv", "draw.jsonl", "stats.json"}) {
      const std::string a = skytrack::testing::read_file(dir / "a" / file);
      const std::string b = skytrack::testing::read_file(dir / "b" / file);
      if (!a.empty() && a == b) ++identical;
    }
    ok = ok && identical == 5;
    detail += fmt::format("{}: {}/5 files identical; ", extra.empty() ? "as-fast-as-possible" : "realtime 50ms",
                          identical);
  }
  fs::remove_all(dir);
  return {ok, detail};
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<Criterion> criteria{
      {1, "precision/recall/F1 from counts 2956/52/406", 0.0, metrics_from_counts},
      {2, "end-to-end quality on noisy synthetic traffic", 10.0, end_to_end_quality},
      {3, "realtime replay drop policy at 30 fps", 5.0, realtime_drop_policy},
      {4, "constant-velocity kinematics in 8 directions", 5.0, kinematics},
      {5, "Hungarian optimality vs brute force", 10.0, hungarian_optimality},
      {6, "drawing area and ground scale vectors", 0.0, geometry_vectors},
      {7, "single left lane change detected", 5.0, lane_change},
      {8, "byte-identical track outputs across runs", 0.0, determinism},
  };

  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) only = std::atoi(argv[++i]);
  }

  int failed = 0;
  int ran = 0;
  for (const auto& c : criteria) {
    if (only != 0 && c.number != only) continue;
    ++ran;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o = {false, fmt::format("threw: {}", e.what())};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.budget_s > 0.0 && secs > c.budget_s) {
      o.pass = false;
      o.detail += fmt::format(" over time budget {:.0f}s", c.budget_s);
    }
    if (!o.pass) ++failed;
    std::printf("%s criterion %d %s (%.3fs): %s\n", o.pass ? "PASS" : "FAIL", c.number, c.title, secs,
                o.detail.c_str());
  }
  if (ran == 0) {
    std::printf("FAIL no criterion selected\n");
    return 2;
  }
  return failed == 0 ? 0 : 1;
}
