#pragma once

// Exact best-of-7 length distribution by enumerating every win/loss sequence.

#include <array>
#include <cmath>

namespace oracle {

/// Probability that a series lasts 4, 5, 6, 7 games when team A wins each game with probability p.
inline std::array<double, 4> series_length_distribution(double p) {
  std::array<double, 4> out{};
  for (unsigned mask = 0; mask < (1u << 7); ++mask) {
    int a = 0, b = 0, games = 0;
    double prob = 1.0;
    for (int g = 0; g < 7 && a < 4 && b < 4; ++g) {
      const bool a_wins = (mask >> g) & 1u;
      prob *= a_wins ? p : 1.0 - p;
      (a_wins ? a : b) += 1;
      games = g + 1;
    }
    // Only count each truncated sequence once: the bits after the deciding game must be zero.
    if ((mask >> games) != 0) continue;
    out[static_cast<std::size_t>(games - 4)] += prob;
  }
  return out;
}

inline double expected_series_length(double p) {
  const auto d = series_length_distribution(p);
  return 4 * d[0] + 5 * d[1] + 6 * d[2] + 7 * d[3];
}

}  // namespace oracle
