#pragma once

#include <array>
#include <cstddef>
#include <string_view>

namespace courtvec {

inline constexpr std::size_t kNumOutcomes = 23;
inline constexpr std::size_t kPlayersPerSide = 5;

using Distribution = std::array<double, kNumOutcomes>;

/// Human-readable label of each outcome class, indexed by class id.
std::string_view outcome_label(int cls);

/// Points scored by the offense for an outcome class. Throws on out-of-range.
int outcome_points(int cls);

bool is_made_field_goal(int cls);
bool is_made_three(int cls);
bool is_missed_field_goal(int cls);

}  // namespace courtvec
