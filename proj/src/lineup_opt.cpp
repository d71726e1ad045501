#include "courtvec/lineup_opt.hpp"

#include "courtvec/error.hpp"

#include <algorithm>
#include <set>
#include <string>

namespace courtvec {

std::vector<FifthManRow> rank_fifth_man(const EmbeddingModel& model, const FifthManQuery& query) {
  if (query.candidates.empty()) throw Error(ErrorKind::argument, "candidate list is empty");

  std::set<PlayerId> placed(query.fixed_four.begin(), query.fixed_four.end());
  if (placed.size() != 4) throw Error(ErrorKind::lineup, "the fixed four players must be distinct");
  for (auto id : query.opponent) {
    if (!placed.insert(id).second) {
      throw Error(ErrorKind::lineup, "player " + std::to_string(id) + " is both fixed and on the opponent");
    }
  }
  if (placed.size() != 9) throw Error(ErrorKind::lineup, "opponent lineup repeats a player");
  for (auto id : placed) {
    if (id >= model.config.vocab) throw Error(ErrorKind::unknown_player, "unknown player id " + std::to_string(id));
  }
  std::set<PlayerId> seen;
  for (auto c : query.candidates) {
    if (placed.contains(c)) {
      throw Error(ErrorKind::lineup, "candidate " + std::to_string(c) + " is already on the floor");
    }
    if (c >= model.config.vocab) throw Error(ErrorKind::unknown_player, "unknown player id " + std::to_string(c));
    if (!seen.insert(c).second) throw Error(ErrorKind::argument, "candidate " + std::to_string(c) + " listed twice");
  }

  SeriesOptions opts{query.sims, query.possessions, query.seed, query.threads};
  std::vector<FifthManRow> rows;
  rows.reserve(query.candidates.size());
  for (auto c : query.candidates) {
    FifthManRow row;
    row.candidate = c;
    row.lineup = {query.fixed_four[0], query.fixed_four[1], query.fixed_four[2], query.fixed_four[3], c};
    std::sort(row.lineup.begin(), row.lineup.end());
    row.series = simulate_series(model, row.lineup, query.opponent, opts);
    row.win_fraction = row.series.game_win_fraction_a;
    row.mean_margin = row.series.mean_margin;
    row.margin_std = row.series.margin_std;
    rows.push_back(std::move(row));
  }
  std::sort(rows.begin(), rows.end(), [](const FifthManRow& a, const FifthManRow& b) {
    if (a.win_fraction != b.win_fraction) return a.win_fraction > b.win_fraction;
    if (a.mean_margin != b.mean_margin) return a.mean_margin > b.mean_margin;
    return a.candidate < b.candidate;
  });
  return rows;
}

}  // namespace courtvec
