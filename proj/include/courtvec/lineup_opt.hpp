#pragma once

#include "courtvec/model.hpp"
#include "courtvec/sim.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace courtvec {

struct FifthManQuery {
  std::array<PlayerId, 4> fixed_four{};
  Lineup opponent{};
  std::vector<PlayerId> candidates;
  std::size_t sims = 1000;
  std::size_t possessions = 100;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
};

struct FifthManRow {
  PlayerId candidate = 0;
  Lineup lineup{};
  double win_fraction = 0.0;  // share of simulated games won
  double mean_margin = 0.0;
  double margin_std = 0.0;
  SeriesResult series;
};

/// Completes the lineup with each candidate and simulates it against the opponent.
/// Every candidate reuses the query seed, so comparisons share random numbers.
/// Rows are ordered by win fraction, then mean margin (both descending), then id.
std::vector<FifthManRow> rank_fifth_man(const EmbeddingModel& model, const FifthManQuery& query);

}  // namespace courtvec
