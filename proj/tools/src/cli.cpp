#include "skytrack_cli/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "skytrack/config.hpp"
#include "skytrack/engine.hpp"
#include "skytrack/error.hpp"
#include "skytrack/eval.hpp"
#include "skytrack/io.hpp"
#include "skytrack/pipeline.hpp"
#include "skytrack/synth.hpp"

namespace skytrack::cli {

namespace {

namespace fs = std::filesystem;

enum class LogLevel { Error, Warn, Info, Debug };

// SKYTRACK_LOG=error|warn|info|debug, default warn.
class Log {
 public:
  explicit Log(std::ostream& err) : err_(err) {
    if (const char* env = std::getenv("SKYTRACK_LOG")) {
      const std::string v = env;
      if (v == "error") level_ = LogLevel::Error;
      else if (v == "info") level_ = LogLevel::Info;
      else if (v == "debug") level_ = LogLevel::Debug;
    }
  }

  template <class... Args>
  void info(fmt::format_string<Args...> f, Args&&... args) {
    if (level_ >= LogLevel::Info) err_ << "info: " << fmt::format(f, std::forward<Args>(args)...) << '\n';
  }
  template <class... Args>
  void debug(fmt::format_string<Args...> f, Args&&... args) {
    if (level_ >= LogLevel::Debug) err_ << "debug: " << fmt::format(f, std::forward<Args>(args)...) << '\n';
  }
  void error(const std::string& msg) { err_ << "error: " << msg << '\n'; }

 private:
  std::ostream& err_;
  LogLevel level_ = LogLevel::Warn;
};

int exit_code_for(ErrorKind k) {
  switch (k) {
    case ErrorKind::InvalidArgument:
    case ErrorKind::Parse:
    case ErrorKind::Ordering:
    case ErrorKind::Alignment:
    case ErrorKind::Io:
      return kInput;
    case ErrorKind::NotReady:
    case ErrorKind::Undefined:
    case ErrorKind::Runtime:
      return kRuntime;
  }
  return kRuntime;
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw IoError(fmt::format("cannot write {}", p.string()));
  return f;
}

std::ifstream open_in(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  if (!f) throw IoError(fmt::format("cannot open {}", p.string()));
  return f;
}

void ensure_dir(const fs::path& p) {
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec || !fs::is_directory(p)) throw IoError(fmt::format("cannot create output directory {}", p.string()));
}

// ---- track ------------------------------------------------------------------

struct TrackArgs {
  std::string config;
  std::string detections;
  std::string out_dir;
  std::optional<double> iou_threshold;
  std::optional<double> time_ratio;
  std::optional<std::size_t> capacity;
  std::optional<int> max_age;
  std::optional<int> min_hits;
  std::optional<double> lane_change_threshold;
  bool realtime = false;
  bool wall_clock = false;
  double cost_ms = 0.0;
};

int cmd_track(const TrackArgs& a, std::istream& in, std::ostream& out, Log& log) {
  EngineConfig cfg = a.config.empty() ? EngineConfig{} : load_engine_config(a.config);
  if (a.iou_threshold) cfg.tracker.iou_threshold = *a.iou_threshold;
  if (a.time_ratio) cfg.analytics.sampling.time_ratio = *a.time_ratio;
  if (a.capacity) cfg.capacity = *a.capacity;
  if (a.max_age) cfg.tracker.max_age = *a.max_age;
  if (a.min_hits) cfg.tracker.min_hits = *a.min_hits;
  if (a.lane_change_threshold) cfg.analytics.lane_change.threshold_m = *a.lane_change_threshold;
  validate(cfg);
  if (!(a.cost_ms >= 0.0)) throw InvalidArgument("--simulate-cost-ms must be >= 0");

  std::vector<DetectionFrame> frames;
  if (a.detections == "-") {
    frames = read_detection_stream(in);
  } else {
    frames = read_detection_file(a.detections);
  }
  log.info("read {} frames", frames.size());

  const fs::path dir = a.out_dir;
  ensure_dir(dir);
  std::ofstream tracks = open_out(dir / "tracks.csv");
  std::ofstream micro = open_out(dir / "micro.csv");
  std::ofstream macro = open_out(dir / "macro.csv");
  std::ofstream draw = open_out(dir / "draw.jsonl");
  write_tracks_header(tracks);
  write_micro_header(micro);
  macro << macro_header() << '\n';

  Engine engine(cfg);
  const double cost_s = a.cost_ms / 1000.0;
  const bool wall = a.wall_clock;
  Stage stage = [&](const FrameEnvelope& env) {
    if (wall && cost_s > 0.0) std::this_thread::sleep_for(std::chrono::duration<double>(cost_s));
    return engine.process(env.payload);
  };
  std::vector<Sink> sinks{[&](const FrameResult& r) {
    write_track_rows(tracks, r.frame, r.timestamp, r.tracks);
    for (const auto& m : r.micro) write_micro_row(micro, m);
    if (r.macro) write_macro_row(macro, *r.macro);
    for (const auto& d : r.draw) draw << format_draw_command(d) << '\n';
  }};

  PipelineOptions opts;
  opts.capacity = cfg.capacity;
  opts.replay = a.realtime ? ReplayMode::Realtime : ReplayMode::AsFastAsPossible;
  opts.clock = wall ? ClockMode::Wall : ClockMode::Virtual;
  if (!wall && cost_s > 0.0) opts.stage_cost = [cost_s](const FrameEnvelope&) { return cost_s; };

  const PipelineStats stats = run_pipeline(envelope_source(std::span<const DetectionFrame>(frames)), stage, sinks, opts);
  for (auto* f : {&tracks, &micro, &macro, &draw}) {
    f->flush();
    if (!*f) throw IoError("failed writing outputs");
  }

  nlohmann::ordered_json js;
  js["received"] = stats.received;
  js["processed"] = stats.processed;
  js["dropped"] = stats.dropped;
  js["max_occupancy"] = stats.max_occupancy;
  js["elapsed_s"] = stats.elapsed_s;
  js["processing_fps"] = stats.current_fps;
  js["mean_latency_s"] = stats.mean_latency_s;
  js["max_latency_s"] = stats.max_latency_s;
  js["meter_fps"] = engine.meter().ready() ? nlohmann::ordered_json(engine.meter().fps()) : nlohmann::ordered_json(nullptr);
  js["sampling_interval"] =
      engine.sampling_interval() ? nlohmann::ordered_json(*engine.sampling_interval()) : nlohmann::ordered_json(nullptr);
  js["meters_per_pixel"] = engine.scale().meters_per_pixel;
  js["replay"] = a.realtime ? "realtime" : "as-fast-as-possible";
  js["clock"] = wall ? "wall" : "virtual";
  std::ofstream stats_file = open_out(dir / "stats.json");
  stats_file << js.dump(2) << '\n';

  out << fmt::format("processed {} of {} frames, dropped {}\n", stats.processed, stats.received, stats.dropped);
  return kOk;
}

// ---- synth ------------------------------------------------------------------

struct SynthArgs {
  std::string preset;
  std::string scenario;
  std::string out_dir;
  std::optional<std::int64_t> seed;
  std::optional<double> sigma;
  std::optional<double> miss;
  std::optional<double> fp_rate;
  bool list = false;
};

int cmd_synth(const SynthArgs& a, std::ostream& out, Log& log) {
  if (a.list) {
    for (const auto& n : preset_names()) out << n << '\n';
    return kOk;
  }
  if (a.preset.empty() == a.scenario.empty()) throw InvalidArgument("give exactly one of --preset or --scenario");
  if (a.out_dir.empty()) throw InvalidArgument("--out-dir is required");
  Scenario s;
  if (!a.preset.empty()) {
    s = preset(a.preset);
  } else {
    std::ifstream f = open_in(a.scenario);
    std::stringstream buf;
    buf << f.rdbuf();
    s = parse_scenario(buf.str());
  }
  if (a.seed) {
    if (*a.seed < 0) throw InvalidArgument("--seed must be non-negative");
    s.noise.seed = static_cast<std::uint64_t>(*a.seed);
  }
  if (a.sigma) s.noise.position_sigma_px = *a.sigma;
  if (a.miss) s.noise.miss_probability = *a.miss;
  if (a.fp_rate) s.noise.false_positive_rate = *a.fp_rate;

  const SynthOutput gen = generate(s);
  const fs::path dir = a.out_dir;
  ensure_dir(dir);
  std::ofstream det = open_out(dir / "detections.jsonl");
  write_detection_stream(det, gen.detections);
  std::ofstream truth = open_out(dir / "truth.csv");
  write_truth_csv(truth, gen.truth);
  std::ofstream sc = open_out(dir / "scenario.json");
  sc << scenario_to_json(s) << '\n';
  log.info("scenario {} seed {}", s.name, s.noise.seed);
  out << fmt::format("{}: {} frames, {} vehicles, {} truth rows\n", s.name, gen.frame_count, s.vehicles.size(),
                     gen.truth.size());
  return kOk;
}

// ---- eval -------------------------------------------------------------------

struct EvalArgs {
  std::string truth;
  std::string pred;
  std::vector<std::int64_t> counts;
  double iou_min = 0.5;
  double bucket_s = 15.0;
};

int cmd_eval(const EvalArgs& a, std::ostream& out) {
  if (!a.counts.empty()) {
    if (a.counts.size() != 3) throw InvalidArgument("--counts takes tp fp fn");
    const ConfusionCounts c{a.counts[0], a.counts[1], a.counts[2]};
    out << format_prf(c, prf(c));
    return kOk;
  }
  if (a.truth.empty() || a.pred.empty()) throw InvalidArgument("--truth and --pred are required without --counts");
  if (!(a.iou_min > 0.0 && a.iou_min <= 1.0)) throw InvalidArgument("--iou-min must be in (0, 1]");

  std::ifstream tf = open_in(a.truth);
  const auto truth_rows = read_truth_csv(tf);
  std::vector<FrameBoxes> pred;
  if (fs::path(a.pred).extension() == ".jsonl") {
    pred = frames_from_detections(read_detection_file(a.pred));
  } else {
    std::ifstream pf = open_in(a.pred);
    std::string header;
    std::getline(pf, header);
    if (!header.empty() && header.back() == '\r') header.pop_back();
    pf.seekg(0);
    // A truth file is accepted as predictions too, so a truth set can be scored against another.
    pred = header == kTruthHeader ? frames_from_truth(read_truth_csv(pf)) : frames_from_tracks(read_tracks_csv(pf));
  }
  const auto truth = frames_from_truth(truth_rows);
  const EvalReport r = evaluate(truth, pred, {a.iou_min, a.bucket_s});
  out << format_report(r);
  if (!r.metrics) prf(r.total);  // surfaces the undefined-metric error
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  Log log(err);
  CLI::App app{"Aerial traffic tracking and analytics", "skytrack"};
  app.require_subcommand(1);

  TrackArgs ta;
  auto* track = app.add_subcommand("track", "Track detections and write analytics");
  track->add_option("--config", ta.config, "Engine config JSON");
  track->add_option("--detections", ta.detections, "Detections JSONL, '-' for stdin")->required();
  track->add_option("--out-dir", ta.out_dir, "Output directory")->required();
  track->add_option("--iou-threshold", ta.iou_threshold, "Association IoU threshold");
  track->add_option("--time-ratio", ta.time_ratio, "Seconds per sampling window");
  track->add_option("--capacity", ta.capacity, "Frame buffer depth");
  track->add_option("--max-age", ta.max_age, "Frames a track may coast");
  track->add_option("--min-hits", ta.min_hits, "Hits before a track is reported");
  track->add_option("--lane-change-threshold", ta.lane_change_threshold, "Lane-change distance in meters");
  track->add_flag("--realtime", ta.realtime, "Pace frames by source timestamps, dropping under overload");
  track->add_flag("--wall-clock", ta.wall_clock, "Run ingest and processing on real threads");
  track->add_option("--simulate-cost-ms", ta.cost_ms, "Injected per-frame processing cost");

  SynthArgs sa;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic scenario");
  synth->add_option("--preset", sa.preset, "Built-in scenario name");
  synth->add_option("--scenario", sa.scenario, "Scenario JSON file");
  synth->add_option("--out-dir", sa.out_dir, "Output directory");
  synth->add_option("--seed", sa.seed, "Noise seed");
  synth->add_option("--sigma", sa.sigma, "Detection jitter in pixels");
  synth->add_option("--miss", sa.miss, "Detection miss probability");
  synth->add_option("--fp-rate", sa.fp_rate, "False positives per frame");
  synth->add_flag("--list-presets", sa.list, "Print preset names");

  EvalArgs ea;
  auto* eval = app.add_subcommand("eval", "Score predictions against ground truth");
  eval->add_option("--truth", ea.truth, "Ground-truth CSV");
  eval->add_option("--pred", ea.pred, "tracks.csv, truth CSV or detections .jsonl");
  eval->add_option("--counts", ea.counts, "Score raw tp fp fn counts")->expected(3);
  eval->add_option("--iou-min", ea.iou_min, "Match threshold");
  eval->add_option("--bucket-s", ea.bucket_s, "Bucket length in seconds");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*track) return cmd_track(ta, in, out, log);
    if (*synth) return cmd_synth(sa, out, log);
    return cmd_eval(ea, out);
  } catch (const Error& e) {
    log.error(e.what());
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    log.error(e.what());
    return kRuntime;
  }
}

}  // namespace skytrack::cli
