#include "courtvec/sim.hpp"

#include "courtvec/error.hpp"
#include "courtvec/text.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <thread>

namespace courtvec {

MatchupSampler::MatchupSampler(const Distribution& a_offense, const Distribution& b_offense) {
  double ta = 0.0;
  double tb = 0.0;
  for (std::size_t k = 0; k < kNumOutcomes; ++k) {
    if (!(a_offense[k] >= 0.0) || !(b_offense[k] >= 0.0)) {
      throw Error(ErrorKind::value, "outcome probabilities must be non-negative");
    }
    ta += a_offense[k];
    tb += b_offense[k];
    cdf_a_[k] = ta;
    cdf_b_[k] = tb;
  }
  if (!(ta > 0.0) || !(tb > 0.0)) throw Error(ErrorKind::value, "outcome distribution has no mass");
}

MatchupSampler MatchupSampler::from_model(const EmbeddingModel& model, const Lineup& a, const Lineup& b) {
  return MatchupSampler(forward(model, a, b), forward(model, b, a));
}

int MatchupSampler::sample(Side offense, Engine& eng) const {
  return sample_cdf(offense == Side::a ? cdf_a_ : cdf_b_, uniform01(eng));
}

GameResult simulate_game(const MatchupSampler& sampler, std::size_t possessions, Engine& eng,
                         const PossessionObserver& observe) {
  if (possessions < 1) throw Error(ErrorKind::argument, "a game needs at least one possession");
  GameResult g;
  auto play_block = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      const int ya = sampler.sample(Side::a, eng);
      g.points_a += outcome_points(ya);
      if (observe) observe(Side::a, ya);
      const int yb = sampler.sample(Side::b, eng);
      g.points_b += outcome_points(yb);
      if (observe) observe(Side::b, yb);
    }
    g.possessions_per_team += n;
  };
  play_block(possessions);
  while (g.points_a == g.points_b) {
    if (g.overtimes == kMaxOvertimes) {
      throw Error(ErrorKind::degenerate_model, "game still tied after " + std::to_string(kMaxOvertimes) +
                                                   " overtimes at " + std::to_string(g.points_a) +
                                                   " points; the outcome distributions cannot break ties");
    }
    ++g.overtimes;
    play_block(kOvertimePossessions);
  }
  g.winner = g.points_a > g.points_b ? Side::a : Side::b;
  return g;
}

GameResult simulate_game(const EmbeddingModel& model, const Lineup& lineup_a, const Lineup& lineup_b,
                         std::size_t possessions, Engine& eng, const PossessionObserver& observe) {
  return simulate_game(MatchupSampler::from_model(model, lineup_a, lineup_b), possessions, eng, observe);
}

SeriesRecord simulate_one_series(const MatchupSampler& sampler, std::size_t possessions, std::uint64_t seed,
                                 std::size_t series_index) {
  SeriesRecord rec;
  for (std::size_t game = 0; rec.wins_a < 4 && rec.wins_b < 4; ++game) {
    auto eng = make_engine(derive_seed(seed, series_index, game));
    rec.games.push_back(simulate_game(sampler, possessions, eng));
    (rec.games.back().winner == Side::a ? rec.wins_a : rec.wins_b) += 1;
  }
  return rec;
}

SeriesResult simulate_series(const MatchupSampler& sampler, const SeriesOptions& options) {
  if (options.sims < 1) throw Error(ErrorKind::argument, "sims must be >= 1");
  if (options.possessions < 1) throw Error(ErrorKind::argument, "possessions must be >= 1");

  std::vector<SeriesRecord> records(options.sims);
  const std::size_t workers = std::clamp<std::size_t>(options.threads, 1, options.sims);
  if (workers == 1) {
    for (std::size_t s = 0; s < options.sims; ++s) {
      records[s] = simulate_one_series(sampler, options.possessions, options.seed, s);
    }
  } else {
    std::vector<std::exception_ptr> errors(workers);
    {
      std::vector<std::jthread> pool;
      for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
          try {
            for (std::size_t s = w; s < options.sims; s += workers) {
              records[s] = simulate_one_series(sampler, options.possessions, options.seed, s);
            }
          } catch (...) {
            errors[w] = std::current_exception();
          }
        });
      }
    }
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  SeriesResult r;
  r.sims = options.sims;
  std::size_t series_a = 0;
  std::size_t wins_a = 0;
  std::size_t wins_b = 0;
  std::size_t games_a = 0;
  double margin_sum = 0.0;
  for (const auto& rec : records) {
    wins_a += static_cast<std::size_t>(rec.wins_a);
    wins_b += static_cast<std::size_t>(rec.wins_b);
    if (rec.wins_a == 4) ++series_a;
    ++r.series_length_counts[rec.games.size() - 4];
    for (const auto& g : rec.games) {
      ++r.games;
      if (g.winner == Side::a) ++games_a;
      margin_sum += g.points_a - g.points_b;
    }
  }
  const double sims = static_cast<double>(options.sims);
  const double games = static_cast<double>(r.games);
  r.team_a_series_win_fraction = static_cast<double>(series_a) / sims;
  r.team_b_series_win_fraction = static_cast<double>(options.sims - series_a) / sims;
  r.mean_wins_a = static_cast<double>(wins_a) / sims;
  r.mean_wins_b = static_cast<double>(wins_b) / sims;
  r.mean_games_per_series = games / sims;
  r.game_win_fraction_a = static_cast<double>(games_a) / games;
  r.mean_margin = margin_sum / games;
  if (r.games > 1) {
    double ss = 0.0;
    for (const auto& rec : records) {
      for (const auto& g : rec.games) {
        const double d = (g.points_a - g.points_b) - r.mean_margin;
        ss += d * d;
      }
    }
    r.margin_std = std::sqrt(ss / (games - 1.0));
  }
  return r;
}

SeriesResult simulate_series(const EmbeddingModel& model, const Lineup& lineup_a, const Lineup& lineup_b,
                             const SeriesOptions& options) {
  return simulate_series(MatchupSampler::from_model(model, lineup_a, lineup_b), options);
}

// ---- head-to-head reports ------------------------------------------------------

std::string HeadToHeadRow::render() const {
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%s vs %s | %.2f vs. %.2f | %+.2f | %.1f%%", team_a.c_str(), team_b.c_str(),
                result.mean_wins_a, result.mean_wins_b, result.mean_margin, 100.0 * result.game_win_fraction_a);
  return buf;
}

Lineup resolve_lineup(const std::vector<std::string>& players, const PlayerRegistry& registry) {
  std::vector<PlayerId> ids;
  std::vector<std::string> unknown;
  for (const auto& name : players) {
    if (auto id = registry.find_by_name(name)) {
      ids.push_back(*id);
    } else if (auto num = text::parse_int(name); num && *num >= 0 && registry.contains(static_cast<PlayerId>(*num))) {
      ids.push_back(static_cast<PlayerId>(*num));
    } else {
      unknown.push_back(name);
    }
  }
  if (!unknown.empty()) {
    std::string msg = "unknown players:";
    for (const auto& u : unknown) msg += " '" + u + "'";
    throw Error(ErrorKind::resolution, msg);
  }
  return checked_lineup(ids, registry);
}

std::vector<HeadToHeadRow> head_to_head_table(const EmbeddingModel& model, const PlayerRegistry& registry,
                                              const std::vector<std::pair<NamedLineup, NamedLineup>>& matchups,
                                              const SeriesOptions& options) {
  std::vector<HeadToHeadRow> rows;
  for (const auto& [a, b] : matchups) {
    HeadToHeadRow row;
    row.team_a = a.team;
    row.team_b = b.team;
    row.lineup_a = resolve_lineup(a.players, registry);
    row.lineup_b = resolve_lineup(b.players, registry);
    check_matchup(row.lineup_a, row.lineup_b);
    row.result = simulate_series(model, row.lineup_a, row.lineup_b, options);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace courtvec
