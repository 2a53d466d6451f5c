#include "gsb/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>

#include "gsb/errors.hpp"
#include "gsb/serialization.hpp"

namespace gsb {

Qualification qualify(const std::vector<ParticipantResult>& results, const std::vector<std::string>& round_ids) {
  Qualification q;
  for (const auto& p : results) {
    if (p.manually_excluded) {
      q.excluded.push_back({p.participant_id, "manually excluded"});
      continue;
    }
    std::string missing;
    bool sand = false;
    for (const auto& r : round_ids) {
      const auto it = p.rounds.find(r);
      if (it == p.rounds.end()) {
        missing = r;
        break;
      }
      sand = sand || it->second.reached_sand;
    }
    if (!missing.empty())
      q.excluded.push_back({p.participant_id, "no result for round " + missing});
    else if (!sand)
      q.excluded.push_back({p.participant_id, "reached no sand in any round"});
    else
      q.qualified.push_back(p);
  }
  return q;
}

SimpleRanking simple_ranking(const std::vector<ParticipantResult>& results, const std::vector<std::string>& round_ids,
                             const std::string& label_prefix) {
  SimpleRanking out;
  if (round_ids.empty()) throw ValidationError("simple ranking needs at least one round");
  std::vector<SimpleRankRow> rows;
  for (const auto& p : results) {
    double sum = 0.0;
    std::string missing;
    for (const auto& r : round_ids) {
      const auto it = p.rounds.find(r);
      if (it == p.rounds.end()) {
        missing = r;
        break;
      }
      sum += it->second.percent;
    }
    if (!missing.empty()) {
      out.excluded.push_back({p.participant_id, "no result for round " + missing});
      continue;
    }
    SimpleRankRow row;
    row.participant_id = p.participant_id;
    row.mean_percent = sum / static_cast<double>(round_ids.size());
    rows.push_back(std::move(row));
  }
  std::stable_sort(rows.begin(), rows.end(),
                   [](const auto& a, const auto& b) { return a.mean_percent > b.mean_percent; });
  const int width = rows.size() >= 100 ? 3 : 2;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    rows[i].rank = static_cast<int>(i) + 1;
    char buf[16];
    std::snprintf(buf, sizeof buf, "%0*d", width, rows[i].rank);
    rows[i].label = label_prefix + buf;
    rows[i].tied = (i > 0 && rows[i - 1].mean_percent == rows[i].mean_percent) ||
                   (i + 1 < rows.size() && rows[i + 1].mean_percent == rows[i].mean_percent);
  }
  out.rows = std::move(rows);
  return out;
}

std::vector<double> descending_ranks(const std::vector<double>& values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
  std::vector<double> ranks(values.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    const double shared = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = shared;
    i = j + 1;
  }
  return ranks;
}

std::vector<ComparativeRow> comparative_ranking(const std::vector<ParticipantResult>& results,
                                                const std::string& single_round,
                                                const std::array<std::string, 2>& identical_rounds,
                                                const std::map<std::string, std::string>& round_digests) {
  const auto digest = [&](const std::string& r) {
    const auto it = round_digests.find(r);
    if (it == round_digests.end()) throw ValidationError("no configuration known for round '" + r + "'");
    return it->second;
  };
  if (identical_rounds[0] == identical_rounds[1])
    throw ValidationError("identical rounds must be two distinct rounds");
  if (digest(identical_rounds[0]) != digest(identical_rounds[1]))
    throw ValidationError("rounds '" + identical_rounds[0] + "' and '" + identical_rounds[1] +
                          "' do not share a configuration");
  digest(single_round);

  const std::size_t n = results.size();
  std::vector<double> single(n);
  std::vector<double> pooled(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& rounds = results[i].rounds;
    const auto get = [&](const std::string& r) {
      const auto it = rounds.find(r);
      if (it == rounds.end())
        throw ValidationError("participant '" + results[i].participant_id + "' has no result for round " + r);
      return it->second.percent;
    };
    single[i] = get(single_round);
    pooled[2 * i] = get(identical_rounds[0]);
    pooled[2 * i + 1] = get(identical_rounds[1]);
  }
  const auto single_ranks = descending_ranks(single);
  const auto pooled_ranks = descending_ranks(pooled);
  std::vector<ComparativeRow> rows(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto& row = rows[i];
    row.participant_id = results[i].participant_id;
    row.single_rank = single_ranks[i];
    row.rank_star = {pooled_ranks[2 * i] / 2.0, pooled_ranks[2 * i + 1] / 2.0};
    row.round_ranks = {row.single_rank, row.rank_star[0], row.rank_star[1]};
  }
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      if (a == b) continue;
      int better = 0;
      for (int r = 0; r < 3; ++r) better += rows[a].round_ranks[r] < rows[b].round_ranks[r];
      if (better >= 2) {
        ++rows[a].pairwise_wins;
        ++rows[b].pairwise_losses;
      }
    }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto mean_rank = [&](std::size_t i) {
    const auto& r = rows[i].round_ranks;
    return (r[0] + r[1] + r[2]) / 3.0;
  };
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const int sa = rows[a].pairwise_wins - rows[a].pairwise_losses;
    const int sb = rows[b].pairwise_wins - rows[b].pairwise_losses;
    if (sa != sb) return sa > sb;
    return mean_rank(a) < mean_rank(b);
  });
  std::vector<ComparativeRow> sorted;
  sorted.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    sorted.push_back(rows[order[i]]);
    sorted.back().position = static_cast<int>(i) + 1;
  }
  return sorted;
}

double trajectory_distance(const std::vector<Point>& a, const std::vector<Point>& b, double missing_penalty) {
  if (a.empty() || b.empty()) throw ValidationError("trajectories must contain at least the start point");
  const std::size_t shared = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < shared; ++i)
    if (std::abs(a[i].x - b[i].x) > 1e-6)
      throw ValidationError("trajectories disagree on decision abscissa " + std::to_string(i));
  const std::size_t longest = std::max(a.size(), b.size()) - 1;
  if (longest == 0) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 1; i < shared; ++i) sum += std::abs(a[i].y - b[i].y);
  sum += missing_penalty * static_cast<double>(std::max(a.size(), b.size()) - shared);
  return sum / static_cast<double>(longest);
}

double missing_point_penalty(const YLattice& lattice) { return lattice.span() / 2.0; }

std::string to_string(ConsistencyClass c) {
  switch (c) {
    case ConsistencyClass::absolutely_consistent:
      return "absolutely_consistent";
    case ConsistencyClass::consistent:
      return "consistent";
    case ConsistencyClass::relatively_consistent:
      return "relatively_consistent";
    case ConsistencyClass::other:
      return "other";
  }
  return "other";
}

double pair_distance_std(const PairDistances& d) {
  const double mean = (d.d12 + d.d13 + d.d23) / 3.0;
  const double var = ((d.d12 - mean) * (d.d12 - mean) + (d.d13 - mean) * (d.d13 - mean) +
                      (d.d23 - mean) * (d.d23 - mean)) /
                     3.0;
  return std::sqrt(var);
}

ConsistencyClass classify_consistency(const PairDistances& d, double std) {
  if (d.d23 == 0.0) return ConsistencyClass::absolutely_consistent;
  if (d.d23 < kConsistentThreshold) return ConsistencyClass::consistent;
  if (d.d23 <= std::min(d.d12, d.d13) - 2.0 * std) return ConsistencyClass::relatively_consistent;
  return ConsistencyClass::other;
}

ConsistencyClass classify_consistency(const PairDistances& d) { return classify_consistency(d, pair_distance_std(d)); }

double random_guess_baseline(double participants, int rounds) {
  if (participants < 0.0 || rounds < 0) throw ValidationError("participants and rounds must be non-negative");
  return participants * std::pow(0.5, rounds);
}

namespace {

[[noreturn]] void integrity(const std::string& source, const std::string& episode, const std::string& step,
                            const std::string& what) {
  throw IntegrityError(source + ": episode " + episode + ", " + step + ": " + what);
}

std::string num(double v) { return json(v).dump(); }

}  // namespace

std::vector<ReplayedEpisode> playback(const std::vector<EpisodeLog>& logs, const std::string& source) {
  std::vector<ReplayedEpisode> out;
  std::map<std::string, std::shared_ptr<Engine>> engines;
  for (const auto& log : logs) {
    ReplayedEpisode rep;
    rep.episode_id = log.episode_id;
    rep.participant_id = log.participant_id;
    rep.round_id = log.round_id;
    rep.cfg_digest = log.cfg_digest;
    if (config_digest(log.config) != log.cfg_digest)
      integrity(source, log.episode_id, "start", "configuration digest does not match the recorded configuration");
    auto& engine = engines[log.cfg_digest];
    if (!engine) {
      try {
        engine = std::make_shared<Engine>(log.config);
      } catch (const ConfigError& e) {
        integrity(source, log.episode_id, "start", std::string("invalid configuration: ") + e.what());
      }
    }
    EpisodeState state = engine->new_episode();
    for (std::size_t k = 0; k < log.decisions.size(); ++k) {
      const auto& d = log.decisions[k];
      const std::string step = "step " + std::to_string(k);
      if (d.seq != static_cast<int>(k)) integrity(source, log.episode_id, step, "sequence number " + std::to_string(d.seq));
      if (state.finished) integrity(source, log.episode_id, step, "decision recorded after the episode finished");
      try {
        state = engine->commit(state, d.decision);
      } catch (const ConstraintViolation& e) {
        integrity(source, log.episode_id, step, std::string("recorded decision is illegal: ") + e.what());
      }
      if (state.ensemble.generation != d.generation)
        integrity(source, log.episode_id, step,
                  "generation " + std::to_string(state.ensemble.generation) + " != logged " +
                      std::to_string(d.generation));
      if (ensemble_digest(state.ensemble) != d.ensemble_digest)
        integrity(source, log.episode_id, step, "ensemble digest differs from the logged one");
    }
    rep.steps = log.decisions.size();
    rep.trajectory = state.drilled.points;
    rep.optimal = engine->optimal_on_truth(state.truth).trajectory.points;
    if (log.final) {
      const std::string step = "final";
      if (!state.finished) integrity(source, log.episode_id, step, "final record for an unfinished episode");
      const auto& got = *state.final_result;
      const auto& want = *log.final;
      if (got.score != want.score)
        integrity(source, log.episode_id, step, "score " + num(got.score) + " != logged " + num(want.score));
      if (got.optimal_score != want.optimal_score)
        integrity(source, log.episode_id, step,
                  "optimal score " + num(got.optimal_score) + " != logged " + num(want.optimal_score));
      if (got.percent_of_optimal != want.percent_of_optimal)
        integrity(source, log.episode_id, step,
                  "percent " + num(got.percent_of_optimal) + " != logged " + num(want.percent_of_optimal));
      if (got.reached_sand != want.reached_sand)
        integrity(source, log.episode_id, step, "reached_sand differs from the logged value");
      if (state.drilled.points != want.trajectory)
        integrity(source, log.episode_id, step, "trajectory differs from the logged one");
      rep.complete = true;
      rep.final = got;
    }
    out.push_back(std::move(rep));
  }
  return out;
}

std::vector<ReplayedEpisode> playback(const std::filesystem::path& log_file) {
  return playback(read_episode_log(log_file), log_file.filename().string());
}

void write_overlay_csv(std::ostream& out, const std::vector<ReplayedEpisode>& episodes) {
  out << "episode_id,participant_id,round_id,series,index,x,y\n";
  const auto series = [&](const ReplayedEpisode& e, const char* name, const std::vector<Point>& pts) {
    for (std::size_t i = 0; i < pts.size(); ++i)
      out << e.episode_id << ',' << e.participant_id << ',' << e.round_id << ',' << name << ',' << i << ','
          << num(pts[i].x) << ',' << num(pts[i].y) << '\n';
  };
  for (const auto& e : episodes) {
    series(e, "drilled", e.trajectory);
    series(e, "optimal", e.optimal);
  }
}

ResultSet collect_results(const std::vector<EpisodeLog>& logs) {
  ResultSet set;
  std::map<std::string, std::size_t> index;
  for (const auto& log : logs) {
    if (auto it = set.round_digests.find(log.round_id); it == set.round_digests.end()) {
      set.round_digests[log.round_id] = log.cfg_digest;
      set.round_configs[log.round_id] = log.config;
      set.round_ids.push_back(log.round_id);
    } else if (it->second != log.cfg_digest) {
      throw ValidationError("round '" + log.round_id + "' appears with two different configurations");
    }
    if (!log.final) {
      set.warnings.push_back("episode " + log.episode_id + " (" + log.participant_id + ", " + log.round_id +
                             ") has no final record");
      continue;
    }
    auto [it, fresh] = index.try_emplace(log.participant_id, set.participants.size());
    if (fresh) set.participants.push_back({log.participant_id, {}, false});
    auto& p = set.participants[it->second];
    RoundResult r{log.final->score, log.final->percent_of_optimal, log.final->reached_sand, log.final->trajectory};
    if (!p.rounds.try_emplace(log.round_id, std::move(r)).second)
      set.warnings.push_back("participant " + log.participant_id + " finished round " + log.round_id +
                             " more than once; episode " + log.episode_id + " ignored");
  }
  return set;
}

ResultSet collect_results(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw ValidationError("not a directory: " + dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".jsonl") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  std::vector<EpisodeLog> logs;
  for (const auto& f : files) {
    auto part = read_episode_log(f);
    logs.insert(logs.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
  }
  return collect_results(logs);
}

}  // namespace gsb
