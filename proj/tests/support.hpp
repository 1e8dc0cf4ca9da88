#pragma once

// Shared helpers for the unit and acceptance suites.

#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "skytrack/config.hpp"
#include "skytrack/engine.hpp"
#include "skytrack/eval.hpp"
#include "skytrack/synth.hpp"

namespace skytrack::testing {

inline EngineConfig config_for(const Scenario& s) {
  EngineConfig cfg;
  cfg.camera = s.camera;
  cfg.video = s.image;
  cfg.view = s.image;
  return cfg;
}

inline std::vector<FrameResult> run_engine(const EngineConfig& cfg, std::span<const DetectionFrame> frames) {
  Engine engine(cfg);
  std::vector<FrameResult> out;
  out.reserve(frames.size());
  for (const auto& f : frames) out.push_back(engine.process(f));
  return out;
}

inline std::vector<FrameBoxes> frames_from_results(std::span<const FrameResult> results) {
  std::vector<FrameBoxes> out;
  for (const auto& r : results) {
    FrameBoxes fb{r.frame, r.timestamp, {}};
    for (const auto& t : r.tracks) fb.boxes.push_back({t.id, corners_to_xywh(t.box)});
    out.push_back(std::move(fb));
  }
  return out;
}

/// Predicted id most often matched to each truth id.
inline std::map<std::int64_t, std::int64_t> dominant_ids(std::span<const FrameBoxes> truth,
                                                         std::span<const FrameBoxes> pred) {
  std::map<std::int64_t, std::map<std::int64_t, int>> votes;
  std::map<std::int64_t, const FrameBoxes*> by_frame;
  for (const auto& p : pred) by_frame[p.frame] = &p;
  for (const auto& t : truth) {
    auto it = by_frame.find(t.frame);
    if (it == by_frame.end()) continue;
    for (const auto& [tid, pid] : match_frame(t.boxes, it->second->boxes).pairs) ++votes[tid][pid];
  }
  std::map<std::int64_t, std::int64_t> out;
  for (const auto& [tid, counts] : votes) {
    int best = -1;
    for (const auto& [pid, n] : counts) {
      if (n > best) {
        best = n;
        out[tid] = pid;
      }
    }
  }
  return out;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("skytrack_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace skytrack::testing
