#pragma once

#include "courtvec/ingest.hpp"
#include "courtvec/model.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace courtvec {

/// Dense row-major matrix, just enough for the embedding analyses.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), values(r * c, fill) {}

  double& operator()(std::size_t r, std::size_t c) { return values[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
  std::span<const double> row(std::size_t r) const { return {values.data() + r * cols, cols}; }
  std::span<double> row(std::size_t r) { return {values.data() + r * cols, cols}; }
};

/// The model's embedding table as a vocab x embed_dim matrix.
Matrix embedding_matrix(const EmbeddingModel& model);

// ---- standardization ---------------------------------------------------------

struct StandardizedEmbeddings {
  Matrix scores;
  std::vector<double> means;
  std::vector<double> stds;  // population
};

StandardizedEmbeddings standardize(const Matrix& embeddings);

// ---- PCA -----------------------------------------------------------------------

struct PcaResult {
  Matrix components;                       // rows are principal axes, by variance descending
  std::vector<double> explained_variance;  // covariance eigenvalues (population), descending
  Matrix projections;                      // centered data in the principal basis
  std::vector<double> means;
};

/// Eigenvalues and eigenvectors (as rows) of a symmetric matrix via cyclic Jacobi rotations,
/// eigenvalues sorted descending.
void symmetric_eigen(const Matrix& symmetric, std::vector<double>& eigenvalues, Matrix& eigenvectors);

PcaResult pca(const Matrix& data);

/// Back-projection of PCA scores into the original coordinates.
Matrix reconstruct(const PcaResult& result);

// ---- k-means -------------------------------------------------------------------

struct KMeansResult {
  std::size_t k = 0;
  Matrix centroids;
  std::vector<std::size_t> assignment;
  double wcss = 0.0;
  std::size_t iterations = 0;
  std::vector<double> wcss_history;  // best run, one entry per Lloyd iteration
};

struct KMeansOptions {
  std::size_t max_iter = 300;
  std::size_t restarts = 10;
};

/// k-means++ seeding, Lloyd iterations, best of `restarts` runs by WCSS.
KMeansResult kmeans(const Matrix& data, std::size_t k, std::uint64_t seed, const KMeansOptions& options = {});

/// Within-cluster sum of squares of an assignment, each cluster around its own mean.
double assignment_wcss(const Matrix& data, std::span<const std::size_t> assignment, std::size_t k);

struct ElbowPoint {
  std::size_t k = 0;
  double wcss = 0.0;
};

std::vector<ElbowPoint> elbow_curve(const Matrix& data, std::size_t k_min, std::size_t k_max,
                                    std::uint64_t seed, const KMeansOptions& options = {});

// ---- neighbours -----------------------------------------------------------------

struct Neighbor {
  PlayerId id = 0;
  double distance = 0.0;
};

/// The `count` players closest to `player` by Euclidean distance, ties by lower id.
std::vector<Neighbor> nearest_neighbors(const Matrix& embeddings, PlayerId player, std::size_t count);

// ---- correlations ---------------------------------------------------------------

struct Correlation {
  double r = 0.0;
  double t = 0.0;
  double p_value = 1.0;  // two-sided, Student t with n-2 degrees of freedom
};

Correlation pearson(std::span<const double> x, std::span<const double> y);

/// Regularized incomplete beta I_x(a, b).
double incomplete_beta(double a, double b, double x);

/// Two-sided tail probability of Student's t.
double student_t_two_sided_p(double t, double dof);

struct MetricCorrelation {
  std::string metric;
  std::size_t dimension = 1;  // 1-based PCA dimension
  Correlation stats;
  bool significant = false;
};

/// Per-minute box metrics of every player correlated with the first two PCA score columns.
std::vector<MetricCorrelation> metric_correlations(const Matrix& projections, const PlayerRegistry& registry,
                                                   double alpha = 5e-4);

}  // namespace courtvec
