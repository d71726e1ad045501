#pragma once

#include "courtvec/ingest.hpp"
#include "courtvec/model.hpp"

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <vector>

namespace courtvec {

/// An (offense, defense) pair of sorted lineups. Roles are ordered: swapping sides is a different key.
struct MatchupKey {
  Lineup offense{};
  Lineup defense{};

  static MatchupKey of(const Play& play);
  static MatchupKey of(const Lineup& offense, const Lineup& defense);

  friend auto operator<=>(const MatchupKey&, const MatchupKey&) = default;
};

struct EmpiricalDistribution {
  std::array<std::uint64_t, kNumOutcomes> counts{};
  std::uint64_t total = 0;

  Distribution p() const;
};

EmpiricalDistribution empirical_distribution(std::span<const Play> plays);
EmpiricalDistribution empirical_from_outcomes(std::span<const int> outcomes);

enum class LogBase { two, e };

/// Sum over p's support of p log(p/q). Throws support_error where p > 0 and q == 0.
double kl_divergence(std::span<const double> p, std::span<const double> q, LogBase base = LogBase::two);

/// Outcomes of each matchup, in the order the plays were supplied.
std::map<MatchupKey, std::vector<int>> group_by_matchup(std::span<const Play> plays);

struct MatchupKl {
  MatchupKey key;
  std::uint64_t plays = 0;
  double kl_bits = 0.0;
};

struct ValidationReport {
  std::vector<MatchupKl> matchups;  // ascending by key
  double mean = 0.0;
  double stddev = 0.0;  // sample (n-1); zero when a single matchup qualifies

  bool empty() const { return matchups.empty(); }
};

using Predictor = std::function<Distribution(const MatchupKey&)>;

/// K-L (bits) of each matchup with strictly more than `min_plays` plays against the predictor.
ValidationReport validate_with(const Predictor& predict, std::span<const Play> plays, std::size_t min_plays = 15);
ValidationReport validate_matchups(const EmbeddingModel& model, std::span<const Play> plays,
                                   std::size_t min_plays = 15);
/// Same grouping scored against the uniform 1/23 distribution.
ValidationReport uniform_baseline(std::span<const Play> plays, std::size_t min_plays = 15);

struct CurvePoint {
  std::size_t n = 0;
  double mean_kl_bits = 0.0;
};

/// Mean K-L (bits) of n-play subsamples against the model, for n = 1..max_n.
/// Each trial draws one matchup with at least max_n plays and a random ordering
/// of its plays; the n-play subsample is the first n plays of that ordering.
std::vector<CurvePoint> kl_vs_plays_curve(const EmbeddingModel& model, std::span<const Play> plays,
                                          std::size_t max_n, std::size_t trials, std::uint64_t seed);

}  // namespace courtvec
