#include "courtvec/analysis.hpp"

#include "courtvec/error.hpp"
#include "courtvec/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace courtvec {

Matrix embedding_matrix(const EmbeddingModel& model) {
  Matrix m(model.config.vocab, model.config.embed_dim);
  m.values = model.params.embeddings;
  return m;
}

namespace {

void check_finite(const Matrix& m) {
  for (double x : m.values) {
    if (!std::isfinite(x)) throw Error(ErrorKind::value, "matrix has a non-finite entry");
  }
}

std::vector<double> column_means(const Matrix& m) {
  std::vector<double> means(m.cols, 0.0);
  for (std::size_t r = 0; r < m.rows; ++r) {
    for (std::size_t c = 0; c < m.cols; ++c) means[c] += m(r, c);
  }
  for (auto& x : means) x /= static_cast<double>(m.rows);
  return means;
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t d = 0; d < a.size(); ++d) {
    const double diff = a[d] - b[d];
    s += diff * diff;
  }
  return s;
}

}  // namespace

StandardizedEmbeddings standardize(const Matrix& embeddings) {
  if (embeddings.rows < 2) throw Error(ErrorKind::argument, "standardize needs at least 2 rows");
  check_finite(embeddings);
  StandardizedEmbeddings out;
  out.means = column_means(embeddings);
  out.stds.assign(embeddings.cols, 0.0);
  for (std::size_t r = 0; r < embeddings.rows; ++r) {
    for (std::size_t c = 0; c < embeddings.cols; ++c) {
      const double d = embeddings(r, c) - out.means[c];
      out.stds[c] += d * d;
    }
  }
  for (std::size_t c = 0; c < embeddings.cols; ++c) {
    out.stds[c] = std::sqrt(out.stds[c] / static_cast<double>(embeddings.rows));
    if (!(out.stds[c] > 1e-12 * std::max(1.0, std::abs(out.means[c])))) {
      throw Error(ErrorKind::degenerate_dimension, "column " + std::to_string(c) + " has zero variance");
    }
  }
  out.scores = Matrix(embeddings.rows, embeddings.cols);
  for (std::size_t r = 0; r < embeddings.rows; ++r) {
    for (std::size_t c = 0; c < embeddings.cols; ++c) {
      out.scores(r, c) = (embeddings(r, c) - out.means[c]) / out.stds[c];
    }
  }
  return out;
}

void symmetric_eigen(const Matrix& symmetric, std::vector<double>& eigenvalues, Matrix& eigenvectors) {
  const std::size_t n = symmetric.rows;
  if (symmetric.cols != n) throw Error(ErrorKind::argument, "eigen decomposition needs a square matrix");
  Matrix a = symmetric;
  Matrix v(n, n);
  for (std::size_t i = 0; i < n; ++i) v(i, i) = 1.0;

  double scale = 0.0;
  for (double x : a.values) scale = std::max(scale, std::abs(x));
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    }
    if (off <= std::pow(std::numeric_limits<double>::epsilon() * scale, 2)) break;

    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (a(p, q) == 0.0) continue;
        // Rotation angle that zeroes a(p, q).
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&a](std::size_t x, std::size_t y) { return a(x, x) > a(y, y); });
  eigenvalues.assign(n, 0.0);
  eigenvectors = Matrix(n, n);
  for (std::size_t r = 0; r < n; ++r) {
    eigenvalues[r] = a(order[r], order[r]);
    for (std::size_t k = 0; k < n; ++k) eigenvectors(r, k) = v(k, order[r]);
  }
}

PcaResult pca(const Matrix& data) {
  if (data.rows < 1 || data.cols < 1) throw Error(ErrorKind::argument, "pca needs a non-empty matrix");
  check_finite(data);
  const std::size_t d = data.cols;
  PcaResult out;
  out.means = column_means(data);

  Matrix centered = data;
  for (std::size_t r = 0; r < data.rows; ++r) {
    for (std::size_t c = 0; c < d; ++c) centered(r, c) -= out.means[c];
  }
  Matrix cov(d, d);
  for (std::size_t r = 0; r < data.rows; ++r) {
    const auto x = centered.row(r);
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = i; j < d; ++j) cov(i, j) += x[i] * x[j];
    }
  }
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i; j < d; ++j) {
      cov(i, j) /= static_cast<double>(data.rows);
      cov(j, i) = cov(i, j);
    }
  }

  symmetric_eigen(cov, out.explained_variance, out.components);
  for (std::size_t r = 0; r < d; ++r) {
    out.explained_variance[r] = std::max(0.0, out.explained_variance[r]);
    // Sign convention: the largest-magnitude coordinate of each axis is positive.
    std::size_t big = 0;
    for (std::size_t k = 1; k < d; ++k) {
      if (std::abs(out.components(r, k)) > std::abs(out.components(r, big))) big = k;
    }
    if (out.components(r, big) < 0) {
      for (std::size_t k = 0; k < d; ++k) out.components(r, k) = -out.components(r, k);
    }
  }

  out.projections = Matrix(data.rows, d);
  for (std::size_t r = 0; r < data.rows; ++r) {
    for (std::size_t a = 0; a < d; ++a) {
      double s = 0.0;
      for (std::size_t k = 0; k < d; ++k) s += centered(r, k) * out.components(a, k);
      out.projections(r, a) = s;
    }
  }
  return out;
}

Matrix reconstruct(const PcaResult& result) {
  const auto& proj = result.projections;
  Matrix out(proj.rows, result.components.cols);
  for (std::size_t r = 0; r < proj.rows; ++r) {
    for (std::size_t k = 0; k < out.cols; ++k) {
      double s = result.means[k];
      for (std::size_t a = 0; a < proj.cols; ++a) s += proj(r, a) * result.components(a, k);
      out(r, k) = s;
    }
  }
  return out;
}

// ---- k-means -------------------------------------------------------------------

double assignment_wcss(const Matrix& data, std::span<const std::size_t> assignment, std::size_t k) {
  Matrix sums(k, data.cols);
  std::vector<std::size_t> sizes(k, 0);
  for (std::size_t r = 0; r < data.rows; ++r) {
    ++sizes[assignment[r]];
    for (std::size_t c = 0; c < data.cols; ++c) sums(assignment[r], c) += data(r, c);
  }
  for (std::size_t j = 0; j < k; ++j) {
    for (std::size_t c = 0; c < data.cols; ++c) {
      if (sizes[j]) sums(j, c) /= static_cast<double>(sizes[j]);
    }
  }
  double total = 0.0;
  for (std::size_t r = 0; r < data.rows; ++r) total += squared_distance(data.row(r), sums.row(assignment[r]));
  return total;
}

namespace {

std::size_t nearest_centroid(std::span<const double> x, const Matrix& centroids, double* dist = nullptr) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < centroids.rows; ++j) {
    const double d = squared_distance(x, centroids.row(j));
    if (d < best_d) {
      best_d = d;
      best = j;
    }
  }
  if (dist) *dist = best_d;
  return best;
}

Matrix seed_plus_plus(const Matrix& data, std::size_t k, Engine& eng) {
  Matrix centroids(k, data.cols);
  std::vector<bool> chosen(data.rows, false);
  std::vector<double> d2(data.rows, std::numeric_limits<double>::infinity());
  std::size_t pick = uniform_index(eng, data.rows);
  for (std::size_t j = 0; j < k; ++j) {
    if (j > 0) {
      double total = 0.0;
      for (double x : d2) total += x;
      if (total > 0.0) {
        double target = uniform01(eng) * total;
        pick = data.rows - 1;
        for (std::size_t r = 0; r < data.rows; ++r) {
          if (d2[r] <= 0.0) continue;
          if (target < d2[r]) {
            pick = r;
            break;
          }
          target -= d2[r];
        }
        while (d2[pick] <= 0.0) --pick;
      } else {
        // Every point coincides with a centre already; take the first unused one.
        pick = static_cast<std::size_t>(std::find(chosen.begin(), chosen.end(), false) - chosen.begin());
      }
    }
    chosen[pick] = true;
    std::copy(data.row(pick).begin(), data.row(pick).end(), centroids.row(j).begin());
    for (std::size_t r = 0; r < data.rows; ++r) {
      d2[r] = std::min(d2[r], squared_distance(data.row(r), centroids.row(j)));
    }
  }
  return centroids;
}

KMeansResult lloyd(const Matrix& data, std::size_t k, Engine& eng, std::size_t max_iter) {
  KMeansResult res;
  res.k = k;
  res.centroids = seed_plus_plus(data, k, eng);
  res.assignment.assign(data.rows, k);  // sentinel: nothing assigned yet

  std::vector<std::size_t> sizes(k);
  std::vector<double> dist(data.rows);
  for (std::size_t iter = 0; iter < max_iter; ++iter) {
    bool changed = false;
    for (std::size_t r = 0; r < data.rows; ++r) {
      const auto j = nearest_centroid(data.row(r), res.centroids, &dist[r]);
      if (j != res.assignment[r]) {
        res.assignment[r] = j;
        changed = true;
      }
    }
    std::fill(sizes.begin(), sizes.end(), 0);
    for (auto j : res.assignment) ++sizes[j];
    // Repair empty clusters with the point farthest from its centroid.
    for (std::size_t j = 0; j < k; ++j) {
      if (sizes[j] != 0) continue;
      std::size_t far = data.rows;
      for (std::size_t r = 0; r < data.rows; ++r) {
        if (sizes[res.assignment[r]] < 2) continue;
        if (far == data.rows || dist[r] > dist[far]) far = r;
      }
      if (far == data.rows) break;
      --sizes[res.assignment[far]];
      res.assignment[far] = j;
      sizes[j] = 1;
      dist[far] = 0.0;
      changed = true;
    }
    if (!changed && iter > 0) break;

    res.centroids = Matrix(k, data.cols);
    for (std::size_t r = 0; r < data.rows; ++r) {
      for (std::size_t c = 0; c < data.cols; ++c) res.centroids(res.assignment[r], c) += data(r, c);
    }
    for (std::size_t j = 0; j < k; ++j) {
      for (std::size_t c = 0; c < data.cols; ++c) res.centroids(j, c) /= static_cast<double>(sizes[j]);
    }
    double total = 0.0;
    for (std::size_t r = 0; r < data.rows; ++r) {
      total += squared_distance(data.row(r), res.centroids.row(res.assignment[r]));
    }
    res.wcss_history.push_back(total);
    res.iterations = iter + 1;
  }
  res.wcss = res.wcss_history.back();
  return res;
}

}  // namespace

KMeansResult kmeans(const Matrix& data, std::size_t k, std::uint64_t seed, const KMeansOptions& options) {
  if (k < 1) throw Error(ErrorKind::argument, "k must be >= 1");
  if (k > data.rows) {
    throw Error(ErrorKind::argument, "k = " + std::to_string(k) + " exceeds the " + std::to_string(data.rows) +
                                         " points");
  }
  if (options.max_iter < 1 || options.restarts < 1) {
    throw Error(ErrorKind::argument, "k-means needs max_iter >= 1 and restarts >= 1");
  }
  check_finite(data);
  KMeansResult best;
  for (std::size_t run = 0; run < options.restarts; ++run) {
    auto eng = make_engine(derive_seed(seed, run));
    auto res = lloyd(data, k, eng, options.max_iter);
    if (run == 0 || res.wcss < best.wcss) best = std::move(res);
  }
  return best;
}

std::vector<ElbowPoint> elbow_curve(const Matrix& data, std::size_t k_min, std::size_t k_max,
                                    std::uint64_t seed, const KMeansOptions& options) {
  if (k_min < 1 || k_min > k_max) throw Error(ErrorKind::argument, "elbow needs 1 <= k_min <= k_max");
  std::vector<ElbowPoint> out;
  for (std::size_t k = k_min; k <= k_max; ++k) {
    out.push_back(ElbowPoint{k, kmeans(data, k, derive_seed(seed, k), options).wcss});
  }
  return out;
}

std::vector<Neighbor> nearest_neighbors(const Matrix& embeddings, PlayerId player, std::size_t count) {
  if (player >= embeddings.rows) {
    throw Error(ErrorKind::unknown_player, "unknown player id " + std::to_string(player));
  }
  if (count >= embeddings.rows) {
    throw Error(ErrorKind::argument, "neighbour count must be below the " + std::to_string(embeddings.rows) +
                                         " players");
  }
  std::vector<Neighbor> all;
  all.reserve(embeddings.rows - 1);
  for (std::size_t r = 0; r < embeddings.rows; ++r) {
    if (r == player) continue;
    all.push_back(Neighbor{static_cast<PlayerId>(r),
                           std::sqrt(squared_distance(embeddings.row(player), embeddings.row(r)))});
  }
  auto closer = [](const Neighbor& a, const Neighbor& b) {
    return a.distance != b.distance ? a.distance < b.distance : a.id < b.id;
  };
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(count), all.end(), closer);
  all.resize(count);
  return all;
}

// ---- correlations ---------------------------------------------------------------

namespace {

// Continued fraction for the incomplete beta function (modified Lentz).
double beta_continued_fraction(double a, double b, double x) {
  constexpr double tiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 10000; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16) break;
  }
  return h;
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0 && b > 0.0)) throw Error(ErrorKind::argument, "incomplete beta needs a, b > 0");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double log_front =
      std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_two_sided_p(double t, double dof) {
  if (!(dof > 0.0)) throw Error(ErrorKind::argument, "degrees of freedom must be positive");
  if (std::isinf(t)) return 0.0;
  return incomplete_beta(dof / 2.0, 0.5, dof / (dof + t * t));
}

Correlation pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error(ErrorKind::argument, "pearson needs equal-length samples");
  const std::size_t n = x.size();
  if (n < 3) throw Error(ErrorKind::sample_size, "pearson needs at least 3 points, got " + std::to_string(n));
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0;
  double syy = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw Error(ErrorKind::value, "pearson input has zero variance");
  Correlation c;
  c.r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
  const double dof = static_cast<double>(n - 2);
  const double denom = 1.0 - c.r * c.r;
  if (denom <= 0.0) {
    c.t = c.r > 0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
    c.p_value = 0.0;
  } else {
    c.t = c.r * std::sqrt(dof / denom);
    c.p_value = student_t_two_sided_p(c.t, dof);
  }
  return c;
}

std::vector<MetricCorrelation> metric_correlations(const Matrix& projections, const PlayerRegistry& registry,
                                                   double alpha) {
  if (projections.cols < 2) throw Error(ErrorKind::argument, "need at least two PCA score columns");
  if (projections.rows != registry.size()) {
    throw Error(ErrorKind::argument, "projection rows do not match the registry size");
  }
  const std::size_t n = registry.size();
  if (n < 3) throw Error(ErrorKind::sample_size, "correlations need at least 3 players");

  struct Metric {
    const char* name;
    double (*get)(const PlayerRecord&);
  };
  static constexpr Metric metrics[] = {
      {"fg_made", [](const PlayerRecord& r) { return static_cast<double>(r.fg_made); }},
      {"threes_made", [](const PlayerRecord& r) { return static_cast<double>(r.threes_made); }},
      {"assists", [](const PlayerRecord& r) { return static_cast<double>(r.assists); }},
      {"rebounds", [](const PlayerRecord& r) { return static_cast<double>(r.rebounds); }},
      {"plus_minus", [](const PlayerRecord& r) { return static_cast<double>(r.plus_minus); }},
  };

  for (const auto& rec : registry.records()) {
    if (!(rec.minutes > 0.0)) {
      throw Error(ErrorKind::value, "player " + std::to_string(rec.id) + " has no minutes for per-minute rates");
    }
  }

  std::vector<MetricCorrelation> out;
  std::vector<double> rate(n);
  std::vector<double> dim(n);
  for (const auto& m : metrics) {
    for (std::size_t i = 0; i < n; ++i) {
      const auto& rec = registry.records()[i];
      rate[i] = m.get(rec) / rec.minutes;
    }
    for (std::size_t d = 0; d < 2; ++d) {
      for (std::size_t i = 0; i < n; ++i) dim[i] = projections(i, d);
      MetricCorrelation row;
      row.metric = m.name;
      row.dimension = d + 1;
      try {
        row.stats = pearson(dim, rate);
      } catch (const Error& e) {
        throw Error(e.kind(), std::string(m.name) + " vs PCA dimension " + std::to_string(d + 1) + ": " + e.what());
      }
      row.significant = row.stats.p_value < alpha;
      out.push_back(std::move(row));
    }
  }
  return out;
}

}  // namespace courtvec
