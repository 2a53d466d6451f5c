#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "gsb/engine.hpp"
#include "gsb/serialization.hpp"

namespace gsb {

inline constexpr int kLogSchemaVersion = 1;

// Line-delimited JSON records. Every line carries "type" and "episode_id":
//   start    {participant_id, round_id, cfg_digest, cfg, schema, timestamp}
//   decision {cfg_digest, seq, decision, generation, ensemble_digest, timestamp}
//   final    {cfg_digest, score, percent_of_optimal, optimal_score, reached_sand, trajectory, timestamp}
class EpisodeLogWriter {
 public:
  explicit EpisodeLogWriter(const std::filesystem::path& file);

  void start(const std::string& episode_id, const std::string& participant_id, const std::string& round_id,
             const EpisodeConfig& cfg);
  void decision(const std::string& episode_id, const std::string& cfg_digest, int seq, const Decision& d,
                const Ensemble& post_decision);
  void final(const std::string& episode_id, const std::string& cfg_digest, const EpisodeState& finished);

  const std::filesystem::path& path() const { return path_; }

 private:
  void write(const json& record);

  std::filesystem::path path_;
  std::ofstream out_;
  std::mutex mutex_;
};

struct LoggedDecision {
  int seq = 0;
  Decision decision;
  int generation = 0;
  std::string ensemble_digest;
};

struct LoggedFinal {
  double score = 0.0;
  double percent_of_optimal = 0.0;
  double optimal_score = 0.0;
  bool reached_sand = false;
  std::vector<Point> trajectory;
};

struct EpisodeLog {
  std::string episode_id;
  std::string participant_id;
  std::string round_id;
  std::string cfg_digest;
  EpisodeConfig config;
  std::vector<LoggedDecision> decisions;
  std::optional<LoggedFinal> final;
};

// Groups records by episode in order of first appearance. Throws ValidationError on
// malformed lines or unsupported schema versions.
std::vector<EpisodeLog> read_episode_log(const std::filesystem::path& file);

std::int64_t unix_millis();

}  // namespace gsb
