#pragma once

#include <atomic>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "gsb/agents.hpp"
#include "gsb/engine.hpp"
#include "gsb/serialization.hpp"

namespace httplib {
class Server;
}

namespace gsb {

struct RoundSpec {
  std::string round_id;
  EpisodeConfig config;
};

// {"defaults": {episode config}, "rounds": [{"round_id": "r1", "truth_seed": 11, "config": {overrides}}]}
// Every round starts from "defaults", so rounds share the prior (and its seed) unless overridden.
std::vector<RoundSpec> parse_round_specs(const json& doc);
std::vector<RoundSpec> load_round_file(const std::filesystem::path& file);

// Static decision geometry a client needs to plan legal trajectories.
json geometry_json(const Engine& engine);

struct ServiceReply {
  int status = 200;
  json body;
};

// Transport-independent game service. Requests on one session are serialized;
// distinct sessions proceed concurrently.
class GameService {
 public:
  GameService(std::vector<RoundSpec> rounds, std::filesystem::path log_dir);
  ~GameService();
  GameService(const GameService&) = delete;
  GameService& operator=(const GameService&) = delete;

  ServiceReply health() const;
  ServiceReply list_rounds() const;
  ServiceReply create_session(const std::string& round_id, const json& request);
  // Scores a trajectory on the current ensemble without touching the session.
  ServiceReply evaluate(const std::string& session_id, const json& request);
  // The decision and, when the episode ends, the final record reach the log before the reply is built.
  ServiceReply commit(const std::string& session_id, const json& request);
  ServiceReply scoreboard(const std::string& round_id) const;

  // Routes "METHOD /path" with a raw body to the operations above.
  ServiceReply handle(const std::string& method, const std::string& path, const std::string& body);

  const std::filesystem::path& log_dir() const { return log_dir_; }

 private:
  struct Round;
  struct Session;

  Round* find_round(const std::string& round_id) const;
  std::shared_ptr<Session> find_session(const std::string& session_id) const;
  std::string new_session_id();

  std::filesystem::path log_dir_;
  std::vector<std::unique_ptr<Round>> rounds_;
  mutable std::shared_mutex sessions_mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::atomic<std::uint64_t> session_counter_{0};
  std::uint64_t token_salt_;
};

// HTTP front end over GameService; optionally serves a static directory at "/".
class HttpServer {
 public:
  explicit HttpServer(GameService& service, std::optional<std::filesystem::path> static_dir = std::nullopt);
  ~HttpServer();

  // Binds host:port (port 0 picks a free port). Returns the bound port or -1.
  int bind(const std::string& host, int port);
  // Blocks until stop().
  bool listen();
  void stop();
  bool running() const;

 private:
  GameService& service_;
  std::unique_ptr<httplib::Server> server_;
};

// "host:port" or ":port" or "port".
std::pair<std::string, int> parse_listen_address(const std::string& text);

// Bot side of the wire protocol: mirrors the engine's decision context from responses.
class RemoteSession {
 public:
  RemoteSession(const std::string& host, int port, const std::string& round_id, const std::string& participant_id);
  ~RemoteSession();

  const std::string& session_id() const { return session_id_; }
  const Ensemble& ensemble() const { return ensemble_; }
  DecisionContext decision_context() const;
  std::vector<Point> drilled() const { return drilled_; }
  bool finished() const { return finished_; }
  const json& final_result() const { return final_; }

  json evaluate(const std::vector<Point>& trajectory);
  void commit(const Decision& decision);

 private:
  json post(const std::string& path, const json& body);
  void absorb_state(const json& state);

  struct Connection;
  std::unique_ptr<Connection> conn_;
  std::string session_id_;
  Ensemble ensemble_;
  std::vector<double> abscissas_;
  YLattice lattice_;
  double dogleg_limit_ = 0.0;
  std::vector<Point> drilled_;
  double current_dip_ = 0.0;
  int decisions_taken_ = 0;
  bool finished_ = false;
  json final_;
};

struct RemoteRun {
  std::vector<Decision> decisions;
  json final_result;
};

RemoteRun play_remote(const std::string& host, int port, const std::string& round_id,
                      const std::string& participant_id, Agent& agent);

}  // namespace gsb
