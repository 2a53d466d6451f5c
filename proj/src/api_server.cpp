#include "gsb/api_server.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include <httplib.h>

#include "gsb/episode_log.hpp"
#include "gsb/errors.hpp"

namespace gsb {

std::vector<RoundSpec> parse_round_specs(const json& doc) {
  if (!doc.is_object() || !doc.contains("rounds") || !doc["rounds"].is_array())
    throw ConfigError("round file must be an object with a \"rounds\" array");
  const json defaults = doc.value("defaults", json::object());
  std::vector<RoundSpec> specs;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < doc["rounds"].size(); ++i) {
    const auto& r = doc["rounds"][i];
    if (!r.is_object() || !r.contains("round_id") || !r["round_id"].is_string())
      throw ConfigError("round " + std::to_string(i) + " needs a string round_id");
    RoundSpec spec;
    spec.round_id = r["round_id"].get<std::string>();
    if (spec.round_id.empty() || spec.round_id.find('/') != std::string::npos)
      throw ConfigError("round_id '" + spec.round_id + "' must be non-empty and contain no '/'");
    if (!seen.insert(spec.round_id).second) throw ConfigError("duplicate round_id '" + spec.round_id + "'");
    try {
      spec.config = EpisodeConfig::defaults();
      from_json(defaults, spec.config);
      if (r.contains("config")) from_json(r["config"], spec.config);
      if (r.contains("truth_seed")) spec.config.truth_seed = r["truth_seed"].get<std::uint64_t>();
    } catch (const json::exception& e) {
      throw ConfigError("round '" + spec.round_id + "': " + e.what());
    }
    spec.config.validate();
    specs.push_back(std::move(spec));
  }
  if (specs.empty()) throw ConfigError("round file defines no rounds");
  return specs;
}

std::vector<RoundSpec> load_round_file(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot read round file " + file.string());
  try {
    return parse_round_specs(json::parse(in));
  } catch (const json::parse_error& e) {
    throw ConfigError("round file " + file.string() + " is not valid JSON: " + e.what());
  }
}

struct GameService::Round {
  RoundSpec spec;
  Engine engine;
  EpisodeState initial;
  std::string digest;
  std::unique_ptr<EpisodeLogWriter> log;

  struct Finisher {
    std::string participant_id;
    std::string session_id;
    double score;
    double percent;
  };
  mutable std::mutex mutex;
  std::vector<Finisher> finishers;  // finish order
  std::map<std::string, std::string> open_sessions;  // participant -> session

  Round(RoundSpec s, const std::filesystem::path& dir)
      : spec(std::move(s)), engine(spec.config), initial(engine.new_episode()), digest(config_digest(spec.config)),
        log(std::make_unique<EpisodeLogWriter>(dir / (spec.round_id + ".jsonl"))) {}
};

struct GameService::Session {
  std::string session_id;
  std::string participant_id;
  Round* round = nullptr;
  std::int64_t created_at = 0;
  std::mutex mutex;
  EpisodeState state;
  int seq = 0;
};

json geometry_json(const Engine& engine) {
  const auto& cfg = engine.config();
  const auto& lat = engine.lattice();
  return json{{"abscissas", engine.abscissas()},
              {"lattice",
               {{"origin", lat.origin()},
                {"spacing", lat.spacing()},
                {"first", lat.first()},
                {"count", lat.count()},
                {"y_min", lat.y_min()},
                {"y_max", lat.y_max()}}},
              {"dogleg_limit", cfg.dogleg_limit},
              {"max_decisions", cfg.max_decisions},
              {"stand_length", cfg.stand_length},
              {"start", {{"x", cfg.start.x}, {"y", cfg.start.y}}},
              {"initial_dip", cfg.initial_dip}};
}

namespace {

ServiceReply error_reply(int status, const std::string& kind, const std::string& message, const json& extra = {}) {
  json err{{"kind", kind}, {"message", message}};
  if (extra.is_object())
    for (auto it = extra.begin(); it != extra.end(); ++it) err[it.key()] = it.value();
  return {status, json{{"error", std::move(err)}}};
}

struct NotFound : std::runtime_error {
  using std::runtime_error::runtime_error;
};

template <class F>
ServiceReply guarded(F&& f) {
  try {
    return f();
  } catch (const NotFound& e) {
    return error_reply(404, "not_found", e.what());
  } catch (const ConstraintViolation& e) {
    return error_reply(422, "constraint_violation", e.what(), json{{"bound", e.bound()}});
  } catch (const StateError& e) {
    return error_reply(409, "state_error", e.what());
  } catch (const ValidationError& e) {
    return error_reply(400, "validation_error", e.what());
  } catch (const DomainError& e) {
    return error_reply(400, "validation_error", e.what());
  } catch (const ConfigError& e) {
    return error_reply(400, "validation_error", e.what());
  } catch (const json::exception& e) {
    return error_reply(400, "validation_error", e.what());
  } catch (const std::exception& e) {
    return error_reply(500, "internal", e.what());
  }
}

json state_json(const EpisodeState& s) {
  return json{{"drilled", points_json(s.drilled.points)},
              {"current_dip", s.current_dip},
              {"decisions_taken", s.decisions_taken},
              {"finished", s.finished},
              {"generation", s.ensemble.generation},
              {"update_status", s.last_update == UpdateStatus::applied ? "applied" : "skipped_degenerate"}};
}

std::vector<Point> checked_plan(const json& request, const EpisodeState& state, const Engine& engine) {
  if (!request.is_object()) throw ValidationError("evaluate request must be a JSON object");
  if (!request.contains("trajectory")) return state.drilled.points;
  auto points = points_from_json(request.at("trajectory"));
  const auto& xs = engine.abscissas();
  if (points.empty()) throw ValidationError("trajectory must contain at least the start point");
  if (points.size() > xs.size())
    throw ValidationError("trajectory has " + std::to_string(points.size()) + " points; at most " +
                          std::to_string(xs.size()) + " decision abscissas exist");
  const auto& drilled = state.drilled.points;
  for (std::size_t i = 0; i < points.size(); ++i) {
    auto& p = points[i];
    if (!std::isfinite(p.x) || !std::isfinite(p.y))
      throw ValidationError("trajectory point " + std::to_string(i) + " is not finite");
    if (std::abs(p.x - xs[i]) > 1e-6)
      throw ValidationError("trajectory point " + std::to_string(i) + " has x = " + std::to_string(p.x) +
                            "; expected decision abscissa " + std::to_string(xs[i]));
    p.x = xs[i];
    if (i < drilled.size() && std::abs(p.y - drilled[i].y) > 1e-9)
      throw ValidationError("trajectory point " + std::to_string(i) + " departs from the drilled path");
  }
  if (points.size() < drilled.size())
    throw ValidationError("trajectory must include the full drilled path (" + std::to_string(drilled.size()) +
                          " points)");
  return points;
}

}  // namespace

GameService::GameService(std::vector<RoundSpec> rounds, std::filesystem::path log_dir)
    : log_dir_(std::move(log_dir)), token_salt_(std::random_device{}()) {
  std::set<std::string> seen;
  for (auto& spec : rounds) {
    if (!seen.insert(spec.round_id).second) throw ConfigError("duplicate round_id '" + spec.round_id + "'");
    rounds_.push_back(std::make_unique<Round>(std::move(spec), log_dir_));
  }
}

GameService::~GameService() = default;

GameService::Round* GameService::find_round(const std::string& round_id) const {
  for (const auto& r : rounds_)
    if (r->spec.round_id == round_id) return r.get();
  throw NotFound("unknown round '" + round_id + "'");
}

std::shared_ptr<GameService::Session> GameService::find_session(const std::string& session_id) const {
  std::shared_lock lock(sessions_mutex_);
  const auto it = sessions_.find(session_id);
  if (it == sessions_.end()) throw NotFound("unknown session '" + session_id + "'");
  return it->second;
}

std::string GameService::new_session_id() {
  const auto n = session_counter_.fetch_add(1);
  return "s" + fnv1a_hex(std::to_string(token_salt_) + ":" + std::to_string(n));
}

ServiceReply GameService::health() const { return {200, json{{"status", "ok"}, {"rounds", rounds_.size()}}}; }

ServiceReply GameService::list_rounds() const {
  json list = json::array();
  for (const auto& r : rounds_) {
    std::lock_guard lock(r->mutex);
    list.push_back({{"round_id", r->spec.round_id},
                    {"cfg_digest", r->digest},
                    {"ensemble_size", r->spec.config.ensemble_size},
                    {"max_decisions", r->spec.config.max_decisions},
                    {"finishers", r->finishers.size()}});
  }
  return {200, json{{"rounds", std::move(list)}}};
}

ServiceReply GameService::create_session(const std::string& round_id, const json& request) {
  return guarded([&] {
    Round* round = find_round(round_id);
    if (!request.is_object() || !request.contains("participant_id") || !request["participant_id"].is_string() ||
        request["participant_id"].get<std::string>().empty())
      throw ValidationError("request needs a non-empty string participant_id");
    auto session = std::make_shared<Session>();
    session->participant_id = request["participant_id"].get<std::string>();
    session->round = round;
    session->created_at = unix_millis();
    session->state = round->initial;
    {
      std::lock_guard lock(round->mutex);
      if (round->open_sessions.count(session->participant_id))
        return error_reply(409, "conflict",
                           "participant '" + session->participant_id + "' already has an open session in round '" +
                               round_id + "'");
      session->session_id = new_session_id();
      round->open_sessions[session->participant_id] = session->session_id;
    }
    round->log->start(session->session_id, session->participant_id, round_id, round->spec.config);
    {
      std::unique_lock lock(sessions_mutex_);
      sessions_[session->session_id] = session;
    }
    return ServiceReply{201, json{{"session_id", session->session_id},
                                  {"round_id", round_id},
                                  {"participant_id", session->participant_id},
                                  {"created_at", session->created_at},
                                  {"geometry", geometry_json(round->engine)},
                                  {"state", state_json(session->state)},
                                  {"realizations", ensemble_payload(session->state.ensemble)}}};
  });
}

ServiceReply GameService::evaluate(const std::string& session_id, const json& request) {
  return guarded([&] {
    auto session = find_session(session_id);
    std::lock_guard lock(session->mutex);
    if (session->state.finished) throw StateError("session '" + session_id + "' is finished");
    const auto& engine = session->round->engine;
    Trajectory plan{checked_plan(request, session->state, engine), false};
    const auto dist = evaluate_on_ensemble(plan, session->state.ensemble, engine.config().scoring);
    json scores = json::array();
    for (const auto& e : dist.entries) scores.push_back({{"score", e.score}, {"realization", e.realization}});
    return ServiceReply{200, json{{"generation", session->state.ensemble.generation},
                                  {"scores", std::move(scores)},
                                  {"percentiles", dist.percentiles}}};
  });
}

ServiceReply GameService::commit(const std::string& session_id, const json& request) {
  return guarded([&] {
    auto session = find_session(session_id);
    std::lock_guard lock(session->mutex);
    if (session->state.finished) throw StateError("session '" + session_id + "' is finished");
    Round& round = *session->round;
    const Decision decision = decision_from_json(request);
    EpisodeState next = round.engine.commit(session->state, decision);
    round.log->decision(session_id, round.digest, session->seq, decision, next.ensemble);
    json body{{"generation", next.ensemble.generation}, {"state", state_json(next)}, {"finished", next.finished}};
    if (next.finished) {
      round.log->final(session_id, round.digest, next);
      const auto& result = *next.final_result;
      int rank = 1;
      std::size_t finishers = 0;
      {
        std::lock_guard rlock(round.mutex);
        for (const auto& f : round.finishers)
          if (f.percent >= result.percent_of_optimal) ++rank;
        round.finishers.push_back({session->participant_id, session_id, result.score, result.percent_of_optimal});
        finishers = round.finishers.size();
        round.open_sessions.erase(session->participant_id);
      }
      body["score"] = result.score;
      body["percent"] = result.percent_of_optimal;
      body["rank"] = rank;
      body["finishers"] = finishers;
      body["optimal_score"] = result.optimal_score;
      body["reached_sand"] = result.reached_sand;
      body["truth"] = realization_json(next.truth);
    } else {
      body["realizations"] = ensemble_payload(next.ensemble);
    }
    ++session->seq;
    session->state = std::move(next);
    return ServiceReply{200, std::move(body)};
  });
}

ServiceReply GameService::scoreboard(const std::string& round_id) const {
  return guarded([&] {
    const Round* round = find_round(round_id);
    std::vector<Round::Finisher> order;
    {
      std::lock_guard lock(round->mutex);
      order = round->finishers;
    }
    std::stable_sort(order.begin(), order.end(),
                     [](const auto& a, const auto& b) { return a.percent > b.percent; });
    json rows = json::array();
    for (std::size_t i = 0; i < order.size(); ++i)
      rows.push_back({{"rank", i + 1},
                      {"participant_id", order[i].participant_id},
                      {"session_id", order[i].session_id},
                      {"score", order[i].score},
                      {"percent_of_optimal", order[i].percent}});
    return ServiceReply{200, json{{"round_id", round_id}, {"finishers", std::move(rows)}}};
  });
}

ServiceReply GameService::handle(const std::string& method, const std::string& path, const std::string& body) {
  std::vector<std::string> parts;
  std::stringstream ss(path);
  for (std::string part; std::getline(ss, part, '/');)
    if (!part.empty()) parts.push_back(part);

  json request = json::object();
  if (method == "POST" && body.find_first_not_of(" \t\r\n") != std::string::npos) {
    try {
      request = json::parse(body);
    } catch (const json::parse_error& e) {
      return error_reply(400, "validation_error", std::string("request body is not valid JSON: ") + e.what());
    }
  }

  if (method == "GET" && parts.size() == 1 && parts[0] == "health") return health();
  if (method == "GET" && parts.size() == 1 && parts[0] == "rounds") return list_rounds();
  if (parts.size() == 3 && parts[0] == "rounds" && parts[2] == "sessions" && method == "POST")
    return create_session(parts[1], request);
  if (parts.size() == 3 && parts[0] == "rounds" && parts[2] == "scoreboard" && method == "GET")
    return scoreboard(parts[1]);
  if (parts.size() == 3 && parts[0] == "sessions" && method == "POST") {
    if (parts[2] == "evaluate") return evaluate(parts[1], request);
    if (parts[2] == "commit") return commit(parts[1], request);
  }
  return error_reply(404, "not_found", "no route for " + method + " " + path);
}

HttpServer::HttpServer(GameService& service, std::optional<std::filesystem::path> static_dir)
    : service_(service), server_(std::make_unique<httplib::Server>()) {
  if (static_dir) server_->set_mount_point("/", static_dir->string());
  auto dispatch = [this](const httplib::Request& req, httplib::Response& res) {
    const auto reply = service_.handle(req.method, req.path, req.body);
    res.status = reply.status;
    res.set_content(reply.body.dump(), "application/json");
  };
  server_->Get(".*", dispatch);
  server_->Post(".*", dispatch);
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  if (port == 0) return server_->bind_to_any_port(host);
  return server_->bind_to_port(host, port) ? port : -1;
}

bool HttpServer::listen() { return server_->listen_after_bind(); }

void HttpServer::stop() {
  if (server_) server_->stop();
}

bool HttpServer::running() const { return server_->is_running(); }

std::pair<std::string, int> parse_listen_address(const std::string& text) {
  std::string host = "127.0.0.1";
  std::string port_text = text;
  if (const auto colon = text.rfind(':'); colon != std::string::npos) {
    if (colon > 0) host = text.substr(0, colon);
    port_text = text.substr(colon + 1);
  }
  try {
    std::size_t used = 0;
    const int port = std::stoi(port_text, &used);
    if (used != port_text.size() || port < 0 || port > 65535) throw std::out_of_range("port");
    return {host, port};
  } catch (const std::logic_error&) {
    throw ConfigError("invalid listen address '" + text + "' (expected host:port)");
  }
}

struct RemoteSession::Connection {
  httplib::Client client;
  Connection(const std::string& host, int port) : client(host, port) {
    client.set_read_timeout(600, 0);
    client.set_write_timeout(60, 0);
  }
};

RemoteSession::RemoteSession(const std::string& host, int port, const std::string& round_id,
                             const std::string& participant_id)
    : conn_(std::make_unique<Connection>(host, port)) {
  const json reply = post("/rounds/" + round_id + "/sessions", json{{"participant_id", participant_id}});
  session_id_ = reply.at("session_id").get<std::string>();
  const auto& geo = reply.at("geometry");
  abscissas_ = geo.at("abscissas").get<std::vector<double>>();
  const auto& lat = geo.at("lattice");
  lattice_ = YLattice(lat.at("origin").get<double>(), lat.at("spacing").get<double>(), lat.at("first").get<int>(),
                      lat.at("count").get<int>());
  dogleg_limit_ = geo.at("dogleg_limit").get<double>();
  ensemble_ = ensemble_from_payload(reply.at("realizations"));
  absorb_state(reply.at("state"));
}

RemoteSession::~RemoteSession() = default;

json RemoteSession::post(const std::string& path, const json& body) {
  auto res = conn_->client.Post(path, body.dump(), "application/json");
  if (!res) throw std::runtime_error("request to " + path + " failed: " + httplib::to_string(res.error()));
  json reply = json::parse(res->body);
  if (res->status >= 300) {
    const auto& err = reply.value("error", json::object());
    const std::string message = err.value("message", res->body);
    if (res->status == 422) throw ConstraintViolation(err.value("bound", ""), message);
    if (res->status == 409) throw StateError(message);
    if (res->status == 400) throw ValidationError(message);
    throw std::runtime_error("HTTP " + std::to_string(res->status) + ": " + message);
  }
  return reply;
}

void RemoteSession::absorb_state(const json& state) {
  drilled_ = points_from_json(state.at("drilled"));
  current_dip_ = state.at("current_dip").get<double>();
  decisions_taken_ = state.at("decisions_taken").get<int>();
  finished_ = state.at("finished").get<bool>();
}

DecisionContext RemoteSession::decision_context() const {
  DecisionContext ctx;
  ctx.abscissas.assign(abscissas_.begin() + decisions_taken_, abscissas_.end());
  ctx.lattice = lattice_;
  ctx.dogleg_limit = dogleg_limit_;
  const auto node = lattice_.index_of(drilled_.back().y);
  if (!node) throw StateError("bit depth is not on the depth lattice");
  ctx.bit_node = *node;
  ctx.incoming_dip = current_dip_;
  return ctx;
}

json RemoteSession::evaluate(const std::vector<Point>& trajectory) {
  return post("/sessions/" + session_id_ + "/evaluate", json{{"trajectory", points_json(trajectory)}});
}

void RemoteSession::commit(const Decision& decision) {
  const json reply = post("/sessions/" + session_id_ + "/commit", decision_json(decision));
  absorb_state(reply.at("state"));
  if (finished_) {
    final_ = reply;
  } else {
    ensemble_ = ensemble_from_payload(reply.at("realizations"));
  }
}

RemoteRun play_remote(const std::string& host, int port, const std::string& round_id,
                      const std::string& participant_id, Agent& agent) {
  RemoteSession session(host, port, round_id, participant_id);
  RemoteRun run;
  while (!session.finished()) {
    const Decision d = agent.choose(session.ensemble(), session.decision_context());
    session.commit(d);
    run.decisions.push_back(d);
  }
  run.final_result = session.final_result();
  return run;
}

}  // namespace gsb
