// gsb: serve rounds, run agent campaigns, rank results, replay logs.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "gsb/agents.hpp"
#include "gsb/analysis.hpp"
#include "gsb/api_server.hpp"
#include "gsb/episode_log.hpp"
#include "gsb/errors.hpp"
#include "gsb/serialization.hpp"

namespace fs = std::filesystem;
using namespace gsb;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitIntegrity = 1;
constexpr int kExitUsage = 2;

HttpServer* g_server = nullptr;

void on_signal(int) {
  if (g_server) g_server->stop();
}

EpisodeConfig load_episode_config(const std::string& path) {
  EpisodeConfig cfg = EpisodeConfig::defaults();
  if (path.empty()) return cfg;
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  try {
    from_json(json::parse(in), cfg);
  } catch (const json::exception& e) {
    throw ConfigError("config file " + path + ": " + e.what());
  }
  cfg.validate();
  return cfg;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string part; std::getline(ss, part, sep);)
    if (!part.empty()) out.push_back(part);
  return out;
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  return percentile_of_sorted(v, 0.5);
}

struct ServeOptions {
  std::string config;
  std::string listen = "127.0.0.1:8080";
  std::string out = "logs";
  std::string static_dir;
};

int run_serve(const ServeOptions& o) {
  if (o.config.empty()) throw ConfigError("serve needs --config <round file>");
  auto rounds = load_round_file(o.config);
  GameService service(std::move(rounds), o.out);
  std::optional<fs::path> static_dir;
  if (!o.static_dir.empty()) static_dir = o.static_dir;
  HttpServer server(service, static_dir);
  const auto [host, port] = parse_listen_address(o.listen);
  const int bound = server.bind(host, port);
  if (bound < 0) {
    std::cerr << "gsb serve: cannot bind " << o.listen << '\n';
    return kExitUsage;
  }
  g_server = &server;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  std::cout << "listening on " << host << ':' << bound << std::endl;
  server.listen();
  g_server = nullptr;
  return kExitOk;
}

struct CampaignOptions {
  std::string config;
  int episodes = 10;
  std::string agents = "dss,greedy,random";
  std::uint64_t seed = 1;
  unsigned workers = 1;
  std::string out = "campaign";
};

struct EpisodeOutcome {
  FinalResult result;
  std::vector<double> decision_seconds;
};

int run_campaign(const CampaignOptions& o) {
  if (o.episodes < 1) throw ConfigError("--episodes must be at least 1");
  if (o.workers < 1) throw ConfigError("--workers must be at least 1");
  const EpisodeConfig base = load_episode_config(o.config);
  const auto agents = split(o.agents, ',');
  if (agents.empty()) throw ConfigError("--agent lists no agents");
  for (const auto& a : agents) make_agent(a, base, 0);
  fs::create_directories(o.out);
  const fs::path scratch = fs::path(o.out) / ".episodes";
  fs::create_directories(scratch);

  std::vector<Engine> engines;
  engines.reserve(static_cast<std::size_t>(o.episodes));
  for (int i = 0; i < o.episodes; ++i) {
    EpisodeConfig cfg = base;
    cfg.truth_seed = o.seed + static_cast<std::uint64_t>(i);
    engines.emplace_back(cfg);
  }
  const unsigned agent_threads = o.workers > 1 ? 1u : 0u;

  json summary = json::array();
  std::printf("%-8s %8s %10s %10s %10s %8s %12s %12s\n", "agent", "episodes", "mean_pct", "median_pct", "mean_score",
              "sand_pct", "mean_dec_s", "max_dec_s");
  for (const auto& kind : agents) {
    std::vector<EpisodeOutcome> outcomes(static_cast<std::size_t>(o.episodes));
    std::atomic<int> next{0};
    std::mutex error_mutex;
    std::exception_ptr error;
    auto work = [&] {
      for (int i = next++; i < o.episodes; i = next++) {
        try {
          char id[32];
          std::snprintf(id, sizeof id, "ep-%04d", i);
          const fs::path file = scratch / (kind + "-" + id + ".jsonl");
          fs::remove(file);
          EpisodeLogWriter log(file);
          auto agent = make_agent(kind, base, o.seed + static_cast<std::uint64_t>(i), agent_threads);
          auto run = run_episode(engines[static_cast<std::size_t>(i)], *agent, &log,
                                 {kind + "-" + id, kind, id});
          outcomes[static_cast<std::size_t>(i)] = {*run.final_state.final_result, run.decision_seconds};
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    };
    std::vector<std::jthread> pool;
    for (unsigned w = 1; w < o.workers; ++w) pool.emplace_back(work);
    work();
    pool.clear();
    if (error) std::rethrow_exception(error);

    {
      std::ofstream merged(fs::path(o.out) / (kind + ".jsonl"), std::ios::trunc);
      for (int i = 0; i < o.episodes; ++i) {
        char id[32];
        std::snprintf(id, sizeof id, "ep-%04d", i);
        const fs::path file = scratch / (kind + "-" + id + ".jsonl");
        std::ifstream in(file);
        merged << in.rdbuf();
        in.close();
        fs::remove(file);
      }
    }

    std::vector<double> pct, scores, dec;
    int sand = 0;
    for (const auto& e : outcomes) {
      pct.push_back(e.result.percent_of_optimal);
      scores.push_back(e.result.score);
      sand += e.result.reached_sand;
      dec.insert(dec.end(), e.decision_seconds.begin(), e.decision_seconds.end());
    }
    const auto mean = [](const std::vector<double>& v) {
      return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    };
    const double max_dec = dec.empty() ? 0.0 : *std::max_element(dec.begin(), dec.end());
    const double sand_pct = 100.0 * sand / o.episodes;
    std::printf("%-8s %8d %10.2f %10.2f %10.2f %8.1f %12.4f %12.4f\n", kind.c_str(), o.episodes, mean(pct),
                median(pct), mean(scores), sand_pct, mean(dec), max_dec);
    summary.push_back({{"agent", kind},
                       {"episodes", o.episodes},
                       {"mean_percent", mean(pct)},
                       {"median_percent", median(pct)},
                       {"mean_score", mean(scores)},
                       {"reached_sand_percent", sand_pct},
                       {"percents", pct}});
  }
  fs::remove_all(scratch);
  std::ofstream(fs::path(o.out) / "summary.json") << json{{"seed", o.seed}, {"agents", summary}}.dump(2) << '\n';
  return kExitOk;
}

int run_rank(const std::string& dir, const std::string& out) {
  const ResultSet set = collect_results(dir);
  for (const auto& w : set.warnings) std::cerr << "warning: " << w << '\n';
  const auto q = qualify(set.participants, set.round_ids);
  const auto ranking = simple_ranking(q.qualified, set.round_ids);
  json doc{{"rounds", set.round_ids}, {"simple", json::array()}, {"excluded", json::array()}};
  std::printf("%-6s %-8s %-24s %12s\n", "rank", "label", "participant", "mean_pct");
  for (const auto& r : ranking.rows) {
    std::printf("%-6d %-8s %-24s %12.2f%s\n", r.rank, r.label.c_str(), r.participant_id.c_str(), r.mean_percent,
                r.tied ? " (tie)" : "");
    doc["simple"].push_back({{"rank", r.rank},
                             {"label", r.label},
                             {"participant_id", r.participant_id},
                             {"mean_percent", r.mean_percent},
                             {"tied", r.tied}});
  }
  for (const auto& e : q.excluded) {
    std::printf("excluded %s: %s\n", e.participant_id.c_str(), e.reason.c_str());
    doc["excluded"].push_back({{"participant_id", e.participant_id}, {"reason", e.reason}});
  }

  // Comparative ranking and consistency apply to three-round experiments with one repeated round.
  if (set.round_ids.size() == 3 && !q.qualified.empty()) {
    const auto& ids = set.round_ids;
    for (int single = 0; single < 3; ++single) {
      const std::string a = ids[(single + 1) % 3];
      const std::string b = ids[(single + 2) % 3];
      if (set.round_digests.at(a) != set.round_digests.at(b)) continue;
      const std::array<std::string, 2> pair = a < b ? std::array{a, b} : std::array{b, a};
      const auto rows = comparative_ranking(q.qualified, ids[single], pair, set.round_digests);
      const double penalty = missing_point_penalty(set.round_configs.at(a).lattice());
      std::printf("\n%-4s %-24s %8s %8s %8s %6s %s\n", "pos", "participant", "rank_1", "rank*_a", "rank*_b", "w-l",
                  "consistency");
      doc["comparative"] = json::array();
      for (const auto& r : rows) {
        const auto it = std::find_if(q.qualified.begin(), q.qualified.end(),
                                     [&](const auto& p) { return p.participant_id == r.participant_id; });
        const auto& rounds = it->rounds;
        const auto& t1 = rounds.at(ids[single]).trajectory;
        const auto& t2 = rounds.at(pair[0]).trajectory;
        const auto& t3 = rounds.at(pair[1]).trajectory;
        const PairDistances d{trajectory_distance(t1, t2, penalty), trajectory_distance(t1, t3, penalty),
                              trajectory_distance(t2, t3, penalty)};
        const auto cls = classify_consistency(d);
        std::printf("%-4d %-24s %8.1f %8.1f %8.1f %6d %s\n", r.position, r.participant_id.c_str(), r.single_rank,
                    r.rank_star[0], r.rank_star[1], r.pairwise_wins - r.pairwise_losses, to_string(cls).c_str());
        doc["comparative"].push_back({{"position", r.position},
                                      {"participant_id", r.participant_id},
                                      {"single_rank", r.single_rank},
                                      {"rank_star", r.rank_star},
                                      {"pairwise_wins", r.pairwise_wins},
                                      {"pairwise_losses", r.pairwise_losses},
                                      {"distances", {d.d12, d.d13, d.d23}},
                                      {"consistency", to_string(cls)}});
      }
      break;
    }
  }
  if (!out.empty()) std::ofstream(out) << doc.dump(2) << '\n';
  return kExitOk;
}

int run_replay(const std::string& file, const std::string& out) {
  const auto episodes = playback(file);
  for (const auto& e : episodes) {
    if (e.final)
      std::printf("%s %s %s steps=%zu score=%.4f percent=%.2f ok\n", e.episode_id.c_str(), e.participant_id.c_str(),
                  e.round_id.c_str(), e.steps, e.final->score, e.final->percent_of_optimal);
    else
      std::printf("%s %s %s steps=%zu incomplete\n", e.episode_id.c_str(), e.participant_id.c_str(),
                  e.round_id.c_str(), e.steps);
  }
  std::printf("%zu episodes replayed, 0 mismatches\n", episodes.size());
  if (!out.empty()) {
    std::ofstream csv(out);
    write_overlay_csv(csv, episodes);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Geosteering benchmark: serve rounds, run campaigns, rank and replay episode logs"};
  app.require_subcommand(1);

  ServeOptions serve;
  auto* serve_cmd = app.add_subcommand("serve", "Serve rounds over HTTP");
  serve_cmd->add_option("--config", serve.config, "Round file (JSON)")->envname("GSB_CONFIG");
  serve_cmd->add_option("--listen", serve.listen, "host:port")->envname("GSB_LISTEN");
  serve_cmd->add_option("--out", serve.out, "Episode log directory")->envname("GSB_OUT");
  serve_cmd->add_option("--static", serve.static_dir, "Directory served at /")->envname("GSB_STATIC");

  CampaignOptions campaign;
  auto* campaign_cmd = app.add_subcommand("campaign", "Run seeded episodes for one or more agents");
  campaign_cmd->add_option("--config", campaign.config, "Episode config overrides (JSON)")->envname("GSB_CONFIG");
  campaign_cmd->add_option("--episodes", campaign.episodes, "Episodes per agent")->envname("GSB_EPISODES");
  campaign_cmd->add_option("--agent", campaign.agents, "Comma list of dss, greedy, random")->envname("GSB_AGENT");
  campaign_cmd->add_option("--seed", campaign.seed, "Truth seed of the first episode")->envname("GSB_SEED");
  campaign_cmd->add_option("--workers", campaign.workers, "Concurrent episodes")->envname("GSB_WORKERS");
  campaign_cmd->add_option("--out", campaign.out, "Output directory for logs and summary")->envname("GSB_OUT");

  std::string rank_dir, rank_out;
  auto* rank_cmd = app.add_subcommand("rank", "Rank participants from a directory of episode logs");
  rank_cmd->add_option("logdir", rank_dir, "Directory of *.jsonl logs")->required();
  rank_cmd->add_option("--out", rank_out, "Write a JSON summary here")->envname("GSB_OUT");

  std::string replay_file, replay_out;
  auto* replay_cmd = app.add_subcommand("replay", "Replay a log through the engine and verify every score");
  replay_cmd->add_option("logfile", replay_file, "Episode log (*.jsonl)")->required();
  replay_cmd->add_option("--out", replay_out, "Write trajectory overlay CSV here")->envname("GSB_OUT");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*serve_cmd) return run_serve(serve);
    if (*campaign_cmd) return run_campaign(campaign);
    if (*rank_cmd) return run_rank(rank_dir, rank_out);
    if (*replay_cmd) return run_replay(replay_file, replay_out);
  } catch (const IntegrityError& e) {
    std::cerr << "integrity failure: " << e.what() << '\n';
    return kExitIntegrity;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ValidationError& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIntegrity;
  }
  return kExitUsage;
}
