#pragma once

// Brute-force and closed-form references for the embedding analyses.

#include "courtvec/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

namespace oracle {

/// Smallest within-cluster sum of squares over every assignment of rows to k labels.
inline double exhaustive_kmeans_wcss(const courtvec::Matrix& data, std::size_t k) {
  const std::size_t n = data.rows;
  std::vector<std::size_t> label(n, 0);
  double best = std::numeric_limits<double>::infinity();
  for (;;) {
    best = std::min(best, courtvec::assignment_wcss(data, label, k));
    std::size_t pos = 0;
    while (pos < n && ++label[pos] == k) label[pos++] = 0;
    if (pos == n) break;
  }
  return best;
}

/// Sum of squared distances to cluster means, written out independently of the library.
inline double direct_wcss(const courtvec::Matrix& data, const std::vector<std::size_t>& label, std::size_t k) {
  long double total = 0.0L;
  for (std::size_t c = 0; c < k; ++c) {
    std::vector<long double> mean(data.cols, 0.0L);
    std::size_t count = 0;
    for (std::size_t r = 0; r < data.rows; ++r) {
      if (label[r] != c) continue;
      ++count;
      for (std::size_t d = 0; d < data.cols; ++d) mean[d] += data(r, d);
    }
    if (count == 0) continue;
    for (auto& m : mean) m /= count;
    for (std::size_t r = 0; r < data.rows; ++r) {
      if (label[r] != c) continue;
      for (std::size_t d = 0; d < data.cols; ++d) total += (data(r, d) - mean[d]) * (data(r, d) - mean[d]);
    }
  }
  return static_cast<double>(total);
}

inline std::vector<std::pair<double, courtvec::PlayerId>> brute_neighbors(const courtvec::Matrix& e,
                                                                          courtvec::PlayerId who) {
  std::vector<std::pair<double, courtvec::PlayerId>> all;
  for (std::size_t r = 0; r < e.rows; ++r) {
    if (r == who) continue;
    double ss = 0.0;
    for (std::size_t d = 0; d < e.cols; ++d) ss += (e(r, d) - e(who, d)) * (e(r, d) - e(who, d));
    all.emplace_back(std::sqrt(ss), static_cast<courtvec::PlayerId>(r));
  }
  std::sort(all.begin(), all.end());
  return all;
}

struct DirectPearson {
  double r;
  double t;
};

/// Textbook sums formula in long double.
inline DirectPearson direct_pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const long double n = x.size();
  long double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += static_cast<long double>(x[i]) * x[i];
    syy += static_cast<long double>(y[i]) * y[i];
    sxy += static_cast<long double>(x[i]) * y[i];
  }
  const long double r = (n * sxy - sx * sy) / std::sqrt((n * sxx - sx * sx) * (n * syy - sy * sy));
  const long double t = r * std::sqrt((n - 2) / (1 - r * r));
  return {static_cast<double>(r), static_cast<double>(t)};
}

/// Eigenvalues of [[a, b], [b, d]] from the characteristic polynomial, larger first.
inline std::pair<double, double> eigen2x2(double a, double b, double d) {
  const long double mid = (static_cast<long double>(a) + d) / 2;
  const long double rad = std::sqrt((static_cast<long double>(a) - d) * (a - d) / 4 + static_cast<long double>(b) * b);
  return {static_cast<double>(mid + rad), static_cast<double>(mid - rad)};
}

}  // namespace oracle
