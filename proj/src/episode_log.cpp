#include "gsb/episode_log.hpp"

#include <chrono>
#include <map>

#include "gsb/errors.hpp"

namespace gsb {

std::int64_t unix_millis() {
  using namespace std::chrono;
  return duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count();
}

EpisodeLogWriter::EpisodeLogWriter(const std::filesystem::path& file) : path_(file) {
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
  out_.open(file, std::ios::app);
  if (!out_) throw ConfigError("cannot open episode log " + file.string());
}

void EpisodeLogWriter::write(const json& record) {
  std::lock_guard lock(mutex_);
  out_ << record.dump() << '\n';
  out_.flush();
  if (!out_) throw std::runtime_error("failed writing episode log " + path_.string());
}

void EpisodeLogWriter::start(const std::string& episode_id, const std::string& participant_id,
                             const std::string& round_id, const EpisodeConfig& cfg) {
  write({{"type", "start"},
         {"schema", kLogSchemaVersion},
         {"episode_id", episode_id},
         {"participant_id", participant_id},
         {"round_id", round_id},
         {"cfg_digest", config_digest(cfg)},
         {"cfg", cfg},
         {"timestamp", unix_millis()}});
}

void EpisodeLogWriter::decision(const std::string& episode_id, const std::string& cfg_digest, int seq,
                                const Decision& d, const Ensemble& post_decision) {
  write({{"type", "decision"},
         {"episode_id", episode_id},
         {"cfg_digest", cfg_digest},
         {"seq", seq},
         {"decision", decision_json(d)},
         {"generation", post_decision.generation},
         {"ensemble_digest", ensemble_digest(post_decision)},
         {"timestamp", unix_millis()}});
}

void EpisodeLogWriter::final(const std::string& episode_id, const std::string& cfg_digest,
                             const EpisodeState& finished) {
  if (!finished.final_result) throw StateError("episode has no final result to log");
  const auto& r = *finished.final_result;
  write({{"type", "final"},
         {"episode_id", episode_id},
         {"cfg_digest", cfg_digest},
         {"score", r.score},
         {"percent_of_optimal", r.percent_of_optimal},
         {"optimal_score", r.optimal_score},
         {"reached_sand", r.reached_sand},
         {"trajectory", points_json(finished.drilled.points)},
         {"timestamp", unix_millis()}});
}

std::vector<EpisodeLog> read_episode_log(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ValidationError("cannot open log " + file.string());
  std::vector<EpisodeLog> logs;
  std::map<std::string, std::size_t> index;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = file.filename().string() + ":" + std::to_string(line_no);
    try {
      const json rec = json::parse(line);
      const auto type = rec.at("type").get<std::string>();
      const auto id = rec.at("episode_id").get<std::string>();
      if (type == "start") {
        const int schema = rec.value("schema", 0);
        if (schema != kLogSchemaVersion)
          throw ValidationError(where + ": unsupported log schema " + std::to_string(schema));
        if (index.count(id)) throw ValidationError(where + ": duplicate start for episode " + id);
        EpisodeLog log;
        log.episode_id = id;
        log.participant_id = rec.at("participant_id").get<std::string>();
        log.round_id = rec.at("round_id").get<std::string>();
        log.cfg_digest = rec.at("cfg_digest").get<std::string>();
        log.config = rec.at("cfg").get<EpisodeConfig>();
        index[id] = logs.size();
        logs.push_back(std::move(log));
        continue;
      }
      const auto it = index.find(id);
      if (it == index.end()) throw ValidationError(where + ": record for unknown episode " + id);
      auto& log = logs[it->second];
      if (type == "decision") {
        log.decisions.push_back({rec.at("seq").get<int>(), decision_from_json(rec.at("decision")),
                                 rec.at("generation").get<int>(), rec.at("ensemble_digest").get<std::string>()});
      } else if (type == "final") {
        LoggedFinal f;
        f.score = rec.at("score").get<double>();
        f.percent_of_optimal = rec.at("percent_of_optimal").get<double>();
        f.optimal_score = rec.at("optimal_score").get<double>();
        f.reached_sand = rec.at("reached_sand").get<bool>();
        f.trajectory = points_from_json(rec.at("trajectory"));
        log.final = std::move(f);
      } else {
        throw ValidationError(where + ": unknown record type '" + type + "'");
      }
    } catch (const json::exception& e) {
      throw ValidationError(where + ": " + e.what());
    }
  }
  return logs;
}

}  // namespace gsb
