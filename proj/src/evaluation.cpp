#include "courtvec/evaluation.hpp"

#include "courtvec/error.hpp"
#include "courtvec/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace courtvec {

MatchupKey MatchupKey::of(const Lineup& offense, const Lineup& defense) {
  MatchupKey k{offense, defense};
  std::sort(k.offense.begin(), k.offense.end());
  std::sort(k.defense.begin(), k.defense.end());
  return k;
}

MatchupKey MatchupKey::of(const Play& play) { return of(play.offense, play.defense); }

Distribution EmpiricalDistribution::p() const {
  Distribution out{};
  for (std::size_t k = 0; k < kNumOutcomes; ++k) {
    out[k] = static_cast<double>(counts[k]) / static_cast<double>(total);
  }
  return out;
}

EmpiricalDistribution empirical_from_outcomes(std::span<const int> outcomes) {
  if (outcomes.empty()) throw Error(ErrorKind::argument, "empirical distribution needs at least one play");
  EmpiricalDistribution e;
  for (int y : outcomes) {
    if (y < 0 || y >= static_cast<int>(kNumOutcomes)) throw Error(ErrorKind::outcome, "outcome outside 0..22");
    ++e.counts[static_cast<std::size_t>(y)];
  }
  e.total = outcomes.size();
  return e;
}

EmpiricalDistribution empirical_distribution(std::span<const Play> plays) {
  std::vector<int> ys;
  ys.reserve(plays.size());
  for (const auto& p : plays) ys.push_back(p.outcome);
  return empirical_from_outcomes(ys);
}

double kl_divergence(std::span<const double> p, std::span<const double> q, LogBase base) {
  if (p.size() != q.size()) throw Error(ErrorKind::argument, "distributions differ in length");
  double total = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (p[k] < 0.0 || q[k] < 0.0) throw Error(ErrorKind::value, "negative probability");
    if (p[k] == 0.0) continue;
    if (q[k] == 0.0) {
      throw Error(ErrorKind::support, "p has mass at index " + std::to_string(k) + " where q is zero");
    }
    const double ratio = p[k] / q[k];
    total += p[k] * (base == LogBase::two ? std::log2(ratio) : std::log(ratio));
  }
  return total;
}

std::map<MatchupKey, std::vector<int>> group_by_matchup(std::span<const Play> plays) {
  std::map<MatchupKey, std::vector<int>> groups;
  for (const auto& p : plays) groups[MatchupKey::of(p)].push_back(p.outcome);
  return groups;
}

ValidationReport validate_with(const Predictor& predict, std::span<const Play> plays, std::size_t min_plays) {
  ValidationReport report;
  for (const auto& [key, outcomes] : group_by_matchup(plays)) {
    if (outcomes.size() <= min_plays) continue;
    const auto emp = empirical_from_outcomes(outcomes).p();
    const auto q = predict(key);
    report.matchups.push_back(MatchupKl{key, outcomes.size(), kl_divergence(emp, q, LogBase::two)});
  }
  const auto n = report.matchups.size();
  if (n == 0) return report;
  double sum = 0.0;
  for (const auto& m : report.matchups) sum += m.kl_bits;
  report.mean = sum / static_cast<double>(n);
  if (n > 1) {
    double ss = 0.0;
    for (const auto& m : report.matchups) ss += (m.kl_bits - report.mean) * (m.kl_bits - report.mean);
    report.stddev = std::sqrt(ss / static_cast<double>(n - 1));
  }
  return report;
}

ValidationReport validate_matchups(const EmbeddingModel& model, std::span<const Play> plays, std::size_t min_plays) {
  return validate_with([&model](const MatchupKey& k) { return forward(model, k.offense, k.defense); },
                       plays, min_plays);
}

ValidationReport uniform_baseline(std::span<const Play> plays, std::size_t min_plays) {
  Distribution uniform;
  uniform.fill(1.0 / static_cast<double>(kNumOutcomes));
  return validate_with([&uniform](const MatchupKey&) { return uniform; }, plays, min_plays);
}

std::vector<CurvePoint> kl_vs_plays_curve(const EmbeddingModel& model, std::span<const Play> plays,
                                          std::size_t max_n, std::size_t trials, std::uint64_t seed) {
  if (max_n < 1) throw Error(ErrorKind::argument, "max_n must be >= 1");
  if (trials < 1) throw Error(ErrorKind::argument, "trials must be >= 1");

  const auto groups = group_by_matchup(plays);
  std::vector<std::pair<const std::vector<int>*, Distribution>> eligible;
  std::size_t largest = 0;
  for (const auto& [key, outcomes] : groups) {
    largest = std::max(largest, outcomes.size());
    if (outcomes.size() >= max_n) eligible.emplace_back(&outcomes, forward(model, key.offense, key.defense));
  }
  if (eligible.empty()) {
    throw Error(ErrorKind::argument, "max_n " + std::to_string(max_n) + " exceeds the largest matchup (" +
                                         std::to_string(largest) + " plays)");
  }

  std::vector<double> sums(max_n, 0.0);
  std::vector<int> pool;
  Distribution p{};
  for (std::size_t t = 0; t < trials; ++t) {
    auto eng = make_engine(derive_seed(seed, t));
    const auto& [outcomes, q] = eligible[uniform_index(eng, eligible.size())];
    pool = *outcomes;
    std::array<std::uint64_t, kNumOutcomes> counts{};
    for (std::size_t n = 1; n <= max_n; ++n) {
      // One more step of a partial Fisher-Yates shuffle extends the sample without replacement.
      const std::size_t pick = n - 1 + uniform_index(eng, pool.size() - (n - 1));
      std::swap(pool[n - 1], pool[pick]);
      ++counts[static_cast<std::size_t>(pool[n - 1])];
      for (std::size_t k = 0; k < kNumOutcomes; ++k) {
        p[k] = static_cast<double>(counts[k]) / static_cast<double>(n);
      }
      sums[n - 1] += kl_divergence(p, q, LogBase::two);
    }
  }

  std::vector<CurvePoint> curve;
  curve.reserve(max_n);
  for (std::size_t n = 1; n <= max_n; ++n) {
    curve.push_back(CurvePoint{n, sums[n - 1] / static_cast<double>(trials)});
  }
  return curve;
}

}  // namespace courtvec
