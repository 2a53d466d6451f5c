#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gsb/engine.hpp"
#include "gsb/episode_log.hpp"

namespace gsb {

struct RoundResult {
  double score = 0.0;
  double percent = 0.0;
  bool reached_sand = false;
  std::vector<Point> trajectory;
};

struct ParticipantResult {
  std::string participant_id;
  std::map<std::string, RoundResult> rounds;
  bool manually_excluded = false;  // e.g. flagged software issues
};

struct Exclusion {
  std::string participant_id;
  std::string reason;
};

struct Qualification {
  std::vector<ParticipantResult> qualified;
  std::vector<Exclusion> excluded;
};

// Qualified: results in every listed round and a sand reached in at least one of them.
Qualification qualify(const std::vector<ParticipantResult>& results, const std::vector<std::string>& round_ids);

struct SimpleRankRow {
  int rank = 0;
  std::string label;  // HP-01, HP-02, ...
  std::string participant_id;
  double mean_percent = 0.0;
  bool tied = false;  // shares its mean with a neighbour; order then follows input order
};

struct SimpleRanking {
  std::vector<SimpleRankRow> rows;
  std::vector<Exclusion> excluded;
};

// Descending mean percent over `round_ids`; participants missing a round are excluded.
SimpleRanking simple_ranking(const std::vector<ParticipantResult>& results, const std::vector<std::string>& round_ids,
                             const std::string& label_prefix = "HP-");

struct ComparativeRow {
  std::string participant_id;
  double single_rank = 0.0;                  // tie-averaged rank within the single round
  std::array<double, 2> rank_star{};         // pooled rank of each identical-round result, scaled to N
  std::array<double, 3> round_ranks{};       // single_rank, rank_star[0], rank_star[1]
  int pairwise_wins = 0;                     // opponents beaten in at least two of the three rounds
  int pairwise_losses = 0;
  int position = 0;                          // 1-based overall order
};

// Round-1 rank plus pooled rank* over the two identical rounds. Overall order: pairwise
// majority over the three rounds (wins minus losses), then mean of the three ranks, then input order.
// `round_digests` maps round id to config digest; the identical rounds must agree.
std::vector<ComparativeRow> comparative_ranking(const std::vector<ParticipantResult>& results,
                                                const std::string& single_round,
                                                const std::array<std::string, 2>& identical_rounds,
                                                const std::map<std::string, std::string>& round_digests);

// Rank of each value in descending order, 1-based, ties sharing the mean of their positions.
std::vector<double> descending_ranks(const std::vector<double>& values);

// Mean |dy| over shared decision points (the start is excluded); every decision point
// one trajectory has beyond the other adds `missing_penalty`. Normalized by the longer count.
double trajectory_distance(const std::vector<Point>& a, const std::vector<Point>& b, double missing_penalty);
// Penalty used with the episode lattice: half the lattice span.
double missing_point_penalty(const YLattice& lattice);

enum class ConsistencyClass { absolutely_consistent, consistent, relatively_consistent, other };
std::string to_string(ConsistencyClass c);

struct PairDistances {
  double d12 = 0.0;
  double d13 = 0.0;
  double d23 = 0.0;  // the identical pair
};

inline constexpr double kConsistentThreshold = 0.5;

// Population std over the three distances.
double pair_distance_std(const PairDistances& d);
ConsistencyClass classify_consistency(const PairDistances& d);
ConsistencyClass classify_consistency(const PairDistances& d, double std);

// Expected participants picking the right one of two layers in every round by chance.
double random_guess_baseline(double participants, int rounds);

struct ReplayedEpisode {
  std::string episode_id;
  std::string participant_id;
  std::string round_id;
  std::string cfg_digest;
  bool complete = false;  // final record present
  std::size_t steps = 0;
  std::optional<FinalResult> final;
  std::vector<Point> trajectory;
  std::vector<Point> optimal;
};

// Replays every logged decision through the engine and checks ensemble digests,
// generations and final results. Throws IntegrityError naming episode and step.
std::vector<ReplayedEpisode> playback(const std::filesystem::path& log_file);
std::vector<ReplayedEpisode> playback(const std::vector<EpisodeLog>& logs, const std::string& source = "log");

// Figure-style overlay series: episode,participant,round,series,index,x,y.
void write_overlay_csv(std::ostream& out, const std::vector<ReplayedEpisode>& episodes);

struct ResultSet {
  std::vector<ParticipantResult> participants;  // first-seen order
  std::vector<std::string> round_ids;           // first-seen order
  std::map<std::string, std::string> round_digests;
  std::map<std::string, EpisodeConfig> round_configs;
  std::vector<std::string> warnings;
};

// Final records of every *.jsonl file under `dir`, in file-name order. The first finished
// episode per participant and round counts; later ones are reported as warnings.
ResultSet collect_results(const std::filesystem::path& dir);
ResultSet collect_results(const std::vector<EpisodeLog>& logs);

}  // namespace gsb
