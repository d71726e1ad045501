#include "courtvec/json_report.hpp"

namespace courtvec {

Json lineup_json(const Lineup& lineup) {
  Json out = Json::array();
  for (auto id : lineup) out.push_back(id);
  return out;
}

Json outcome_table() {
  Json out = Json::array();
  for (int k = 0; k < static_cast<int>(kNumOutcomes); ++k) {
    out.push_back({{"class", k}, {"label", outcome_label(k)}, {"points", outcome_points(k)}});
  }
  return out;
}

Json distribution_json(const Distribution& dist) {
  Json out = Json::array();
  for (int k = 0; k < static_cast<int>(kNumOutcomes); ++k) {
    out.push_back({{"class", k}, {"label", outcome_label(k)}, {"probability", dist[static_cast<std::size_t>(k)]}});
  }
  return out;
}

Json series_json(const SeriesResult& r) {
  return {
      {"sims", r.sims},
      {"games", r.games},
      {"team_a_series_win_fraction", r.team_a_series_win_fraction},
      {"team_b_series_win_fraction", r.team_b_series_win_fraction},
      {"mean_wins_a", r.mean_wins_a},
      {"mean_wins_b", r.mean_wins_b},
      {"mean_games_per_series", r.mean_games_per_series},
      {"game_win_fraction_a", r.game_win_fraction_a},
      {"mean_margin", r.mean_margin},
      {"margin_std", r.margin_std},
      {"margin_basis", "per played game"},
      {"series_length_counts",
       {{"4", r.series_length_counts[0]},
        {"5", r.series_length_counts[1]},
        {"6", r.series_length_counts[2]},
        {"7", r.series_length_counts[3]}}},
  };
}

Json fifth_man_json(const FifthManRow& row) {
  return {
      {"candidate", row.candidate},
      {"lineup", lineup_json(row.lineup)},
      {"win_fraction", row.win_fraction},
      {"mean_margin", row.mean_margin},
      {"margin_std", row.margin_std},
      {"series", series_json(row.series)},
  };
}

Json validation_json(const ValidationReport& report) {
  Json rows = Json::array();
  for (const auto& m : report.matchups) {
    rows.push_back({{"offense", lineup_json(m.key.offense)},
                    {"defense", lineup_json(m.key.defense)},
                    {"plays", m.plays},
                    {"kl_bits", m.kl_bits}});
  }
  return {{"matchups", std::move(rows)},
          {"count", report.matchups.size()},
          {"mean_kl_bits", report.empty() ? Json(nullptr) : Json(report.mean)},
          {"stddev_kl_bits", report.empty() ? Json(nullptr) : Json(report.stddev)}};
}

}  // namespace courtvec
