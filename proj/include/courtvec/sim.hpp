#pragma once

#include "courtvec/ingest.hpp"
#include "courtvec/model.hpp"
#include "courtvec/rng.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace courtvec {

enum class Side { a, b };

inline constexpr std::size_t kOvertimePossessions = 10;
inline constexpr std::size_t kMaxOvertimes = 100;

/// Outcome distributions for both directions of one matchup, as cumulative sums.
class MatchupSampler {
 public:
  MatchupSampler(const Distribution& a_offense, const Distribution& b_offense);
  static MatchupSampler from_model(const EmbeddingModel& model, const Lineup& a, const Lineup& b);

  int sample(Side offense, Engine& eng) const;

 private:
  std::array<double, kNumOutcomes> cdf_a_{};
  std::array<double, kNumOutcomes> cdf_b_{};
};

struct GameResult {
  int points_a = 0;
  int points_b = 0;
  std::size_t possessions_per_team = 0;  // including overtime
  std::size_t overtimes = 0;
  Side winner = Side::a;
};

/// Called for every sampled possession; lets tests audit scoring.
using PossessionObserver = std::function<void(Side offense, int outcome)>;

/// Regulation possessions for each team, then 10-possession overtimes until the tie breaks.
/// Throws degenerate_model after 100 tied overtimes.
GameResult simulate_game(const MatchupSampler& sampler, std::size_t possessions, Engine& eng,
                         const PossessionObserver& observe = {});
GameResult simulate_game(const EmbeddingModel& model, const Lineup& lineup_a, const Lineup& lineup_b,
                         std::size_t possessions, Engine& eng, const PossessionObserver& observe = {});

struct SeriesOptions {
  std::size_t sims = 1000;
  std::size_t possessions = 100;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
};

struct SeriesResult {
  std::size_t sims = 0;
  std::size_t games = 0;
  double team_a_series_win_fraction = 0.0;
  double team_b_series_win_fraction = 0.0;
  double mean_wins_a = 0.0;
  double mean_wins_b = 0.0;
  double mean_games_per_series = 0.0;
  double mean_margin = 0.0;  // team A points minus team B points, per played game
  double margin_std = 0.0;   // sample standard deviation over played games
  double game_win_fraction_a = 0.0;
  std::array<std::size_t, 4> series_length_counts{};  // series lasting 4, 5, 6, 7 games
};

/// Best-of-7 series. Game g of series s draws from the substream (seed, s, g), so results
/// are identical for any thread count.
SeriesResult simulate_series(const EmbeddingModel& model, const Lineup& lineup_a, const Lineup& lineup_b,
                             const SeriesOptions& options);
SeriesResult simulate_series(const MatchupSampler& sampler, const SeriesOptions& options);

/// Series-level record of one simulated best-of-7, exposed for invariant checks.
struct SeriesRecord {
  int wins_a = 0;
  int wins_b = 0;
  std::vector<GameResult> games;
};

SeriesRecord simulate_one_series(const MatchupSampler& sampler, std::size_t possessions, std::uint64_t seed,
                                 std::size_t series_index);

// ---- head-to-head reports ------------------------------------------------------

struct NamedLineup {
  std::string team;
  std::vector<std::string> players;  // names or numeric ids
};

struct HeadToHeadRow {
  std::string team_a;
  std::string team_b;
  Lineup lineup_a{};
  Lineup lineup_b{};
  SeriesResult result;

  /// "Team A vs Team B | 1.69 vs. 4 | -8.85 | 29.8%"
  std::string render() const;
};

/// Resolves names (or numeric ids) against the registry; unknown names are reported together.
Lineup resolve_lineup(const std::vector<std::string>& players, const PlayerRegistry& registry);

std::vector<HeadToHeadRow> head_to_head_table(const EmbeddingModel& model, const PlayerRegistry& registry,
                                              const std::vector<std::pair<NamedLineup, NamedLineup>>& matchups,
                                              const SeriesOptions& options);

}  // namespace courtvec
