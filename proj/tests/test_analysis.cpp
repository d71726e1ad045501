#include "courtvec/analysis.hpp"
#include "courtvec/error.hpp"

#include "oracles/analysis_oracles.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace courtvec;

namespace {

Matrix random_matrix(std::size_t r, std::size_t c, std::uint64_t seed, double scale = 1.0) {
  Matrix m(r, c);
  auto eng = make_engine(seed);
  for (auto& x : m.values) x = scale * (2.0 * uniform01(eng) - 1.0);
  return m;
}

Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  Matrix m(rows.size(), rows.begin()->size());
  std::size_t r = 0;
  for (const auto& row : rows) {
    std::size_t c = 0;
    for (double x : row) m(r, c++) = x;
    ++r;
  }
  return m;
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::io;
}

}  // namespace

TEST_SUITE("analysis") {
  TEST_CASE("standardize") {
    const auto z = standardize(from_rows({{1.0, 5.0}, {3.0, 9.0}}));
    CHECK(z.scores(0, 0) == -1.0);
    CHECK(z.scores(1, 0) == 1.0);
    CHECK(z.means[0] == 2.0);
    CHECK(z.stds[0] == 1.0);

    const auto x = random_matrix(40, 6, 3, 5.0);
    const auto once = standardize(x);
    for (std::size_t c = 0; c < 6; ++c) {
      double mean = 0.0, var = 0.0;
      for (std::size_t r = 0; r < 40; ++r) mean += once.scores(r, c);
      mean /= 40;
      for (std::size_t r = 0; r < 40; ++r) var += (once.scores(r, c) - mean) * (once.scores(r, c) - mean);
      CHECK(std::fabs(mean) < 1e-9);
      CHECK(std::fabs(std::sqrt(var / 40) - 1.0) < 1e-9);
    }
    const auto twice = standardize(once.scores);
    for (std::size_t k = 0; k < x.values.size(); ++k) CHECK(std::fabs(twice.scores.values[k] - once.scores.values[k]) < 1e-12);

    try {
      standardize(from_rows({{1.0, 2.0}, {1.0, 3.0}}));
      FAIL("expected degenerate dimension");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::degenerate_dimension);
      CHECK(std::string(e.what()).find("column 0") != std::string::npos);
    }
    CHECK(kind_of([] { standardize(from_rows({{1.0, 2.0}})); }) == ErrorKind::argument);
  }

  TEST_CASE("pca on collinear points") {
    const auto r = pca(from_rows({{0, 0}, {1, 1}, {2, 2}, {3, 3}}));
    CHECK(r.components(0, 0) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
    CHECK(r.components(0, 1) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
    CHECK(std::fabs(r.explained_variance[1]) < 1e-12);
  }

  TEST_CASE("pca on a diagonal covariance") {
    // Population variances 4 and 1 along the coordinate axes.
    const auto r = pca(from_rows({{2, 1}, {-2, 1}, {2, -1}, {-2, -1}}));
    CHECK(r.explained_variance[0] == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(r.explained_variance[1] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::fabs(r.components(0, 0)) == doctest::Approx(1.0));
  }

  TEST_CASE("pca matches the 2x2 characteristic polynomial") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const auto x = random_matrix(20, 2, seed);
      double m0 = 0, m1 = 0;
      for (std::size_t r = 0; r < 20; ++r) {
        m0 += x(r, 0);
        m1 += x(r, 1);
      }
      m0 /= 20;
      m1 /= 20;
      double a = 0, b = 0, d = 0;
      for (std::size_t r = 0; r < 20; ++r) {
        a += (x(r, 0) - m0) * (x(r, 0) - m0);
        b += (x(r, 0) - m0) * (x(r, 1) - m1);
        d += (x(r, 1) - m1) * (x(r, 1) - m1);
      }
      const auto [l1, l2] = oracle::eigen2x2(a / 20, b / 20, d / 20);
      const auto p = pca(x);
      CHECK(p.explained_variance[0] == doctest::Approx(l1).epsilon(1e-10));
      CHECK(p.explained_variance[1] == doctest::Approx(l2).epsilon(1e-10));
    }
  }

  TEST_CASE("pca invariants on random matrices") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const auto x = random_matrix(20, 4, seed + 40, 3.0);
      const auto p = pca(x);
      for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = 0; j < 4; ++j) {
          double dot = 0.0;
          for (std::size_t c = 0; c < 4; ++c) dot += p.components(i, c) * p.components(j, c);
          CHECK(std::fabs(dot - (i == j ? 1.0 : 0.0)) < 1e-9);
        }
        if (i > 0) CHECK(p.explained_variance[i] <= p.explained_variance[i - 1]);
        // Sign convention: largest-magnitude coordinate is positive.
        std::size_t arg = 0;
        for (std::size_t c = 1; c < 4; ++c) {
          if (std::fabs(p.components(i, c)) > std::fabs(p.components(i, arg))) arg = c;
        }
        CHECK(p.components(i, arg) > 0.0);
      }
      const auto back = reconstruct(p);
      for (std::size_t k = 0; k < x.values.size(); ++k) CHECK(std::fabs(back.values[k] - x.values[k]) < 1e-9);
      double total = 0.0, explained = 0.0;
      for (std::size_t c = 0; c < 4; ++c) {
        double mean = 0.0, var = 0.0;
        for (std::size_t r = 0; r < 20; ++r) mean += x(r, c);
        mean /= 20;
        for (std::size_t r = 0; r < 20; ++r) var += (x(r, c) - mean) * (x(r, c) - mean);
        total += var / 20;
        explained += p.explained_variance[c];
      }
      CHECK(std::fabs(total - explained) < 1e-9);
    }
  }

  TEST_CASE("pca rejects non-finite input") {
    auto x = random_matrix(5, 2, 1);
    x(2, 1) = std::nan("");
    CHECK(kind_of([&] { pca(x); }) == ErrorKind::value);
  }
}

TEST_SUITE("analysis") {
  TEST_CASE("kmeans separates two pairs") {
    const auto x = from_rows({{0, 0}, {0.1, 0}, {10, 10}, {10, 10.1}});
    const auto r = kmeans(x, 2, 1);
    CHECK(r.assignment[0] == r.assignment[1]);
    CHECK(r.assignment[2] == r.assignment[3]);
    CHECK(r.assignment[0] != r.assignment[2]);
  }

  TEST_CASE("k=1 centroid is the mean") {
    const auto x = random_matrix(30, 3, 5);
    const auto r = kmeans(x, 1, 2);
    double total = 0.0;
    for (std::size_t c = 0; c < 3; ++c) {
      double mean = 0.0;
      for (std::size_t i = 0; i < 30; ++i) mean += x(i, c);
      mean /= 30;
      CHECK(r.centroids(0, c) == doctest::Approx(mean).epsilon(1e-12));
      for (std::size_t i = 0; i < 30; ++i) total += (x(i, c) - mean) * (x(i, c) - mean);
    }
    CHECK(r.wcss == doctest::Approx(total).epsilon(1e-12));
  }

  TEST_CASE("kmeans reaches the exhaustive optimum") {
    int hits = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const auto x = random_matrix(8, 2, 1000 + seed);
      const auto r = kmeans(x, 3, seed);
      if (std::fabs(r.wcss - oracle::exhaustive_kmeans_wcss(x, 3)) < 1e-9) ++hits;
    }
    CHECK(hits >= 9);
  }

  TEST_CASE("kmeans result invariants") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const auto x = random_matrix(60, 4, 70 + seed);
      const auto r = kmeans(x, 5, seed);
      std::vector<int> sizes(5, 0);
      for (auto a : r.assignment) ++sizes[a];
      for (int s : sizes) CHECK(s > 0);
      CHECK(r.wcss == doctest::Approx(oracle::direct_wcss(x, r.assignment, 5)).epsilon(1e-12));
      for (std::size_t i = 1; i < r.wcss_history.size(); ++i) {
        CHECK(r.wcss_history[i] <= r.wcss_history[i - 1] + 1e-12);
      }
      // Lloyd fixed point: every centroid is the mean of its members.
      for (std::size_t c = 0; c < 5; ++c) {
        for (std::size_t j = 0; j < 4; ++j) {
          double mean = 0.0;
          for (std::size_t i = 0; i < 60; ++i) {
            if (r.assignment[i] == c) mean += x(i, j);
          }
          mean /= sizes[c];
          CHECK(r.centroids(c, j) == doctest::Approx(mean).epsilon(1e-12));
        }
      }
      // Nearest centroid, ties to the lower index.
      for (std::size_t i = 0; i < 60; ++i) {
        double best = 1e300;
        std::size_t arg = 0;
        for (std::size_t c = 0; c < 5; ++c) {
          double d = 0.0;
          for (std::size_t j = 0; j < 4; ++j) d += (x(i, j) - r.centroids(c, j)) * (x(i, j) - r.centroids(c, j));
          if (d < best) {
            best = d;
            arg = c;
          }
        }
        CHECK(r.assignment[i] == arg);
      }
    }
  }

  TEST_CASE("kmeans errors and determinism") {
    const auto x = random_matrix(6, 2, 1);
    CHECK(kind_of([&] { kmeans(x, 7, 1); }) == ErrorKind::argument);
    CHECK(kind_of([&] { kmeans(x, 0, 1); }) == ErrorKind::argument);
    const auto a = kmeans(x, 3, 4);
    const auto b = kmeans(x, 3, 4);
    CHECK(a.assignment == b.assignment);
    CHECK(a.wcss == b.wcss);
  }

  TEST_CASE("elbow curve") {
    const auto x = random_matrix(12, 3, 8);
    const auto curve = elbow_curve(x, 1, 12, 5);
    REQUIRE(curve.size() == 12);
    CHECK(curve.back().wcss == doctest::Approx(0.0));
    CHECK(curve.front().wcss == doctest::Approx(kmeans(x, 1, 0).wcss).epsilon(1e-12));
    for (std::size_t k = 1; k < curve.size(); ++k) CHECK(curve[k].wcss <= curve[k - 1].wcss + 1e-12);
    CHECK(kind_of([&] { elbow_curve(x, 3, 2, 1); }) == ErrorKind::argument);
  }
}

TEST_SUITE("analysis") {
  TEST_CASE("neighbors on a line") {
    const auto e = from_rows({{0.0}, {1.0}, {5.0}});
    const auto nn = nearest_neighbors(e, 0, 1);
    REQUIRE(nn.size() == 1);
    CHECK(nn[0].id == 1);
    CHECK(nn[0].distance == 1.0);
  }

  TEST_CASE("duplicate rows are distance zero and ties go to the lower id") {
    const auto e = from_rows({{1, 1}, {3, 3}, {0, 0}, {1, 1}, {2, 2}});
    const auto nn = nearest_neighbors(e, 3, 4);
    CHECK(nn[0].id == 0);
    CHECK(nn[0].distance == 0.0);
    CHECK(nn[1].id == 2);
    CHECK(nn[2].id == 4);
  }

  TEST_CASE("neighbors agree with brute force") {
    for (std::size_t v = 2; v <= 100; v += 7) {
      const auto e = random_matrix(v, 8, v);
      for (PlayerId who = 0; who < v; who += 3) {
        const auto oracle_list = oracle::brute_neighbors(e, who);
        const auto nn = nearest_neighbors(e, who, v - 1);
        REQUIRE(nn.size() == v - 1);
        for (std::size_t k = 0; k < nn.size(); ++k) {
          CHECK(nn[k].id == oracle_list[k].second);
          CHECK(nn[k].distance == oracle_list[k].first);
        }
      }
    }
  }

  TEST_CASE("neighbor errors") {
    const auto e = random_matrix(5, 2, 1);
    CHECK(kind_of([&] { nearest_neighbors(e, 5, 1); }) == ErrorKind::unknown_player);
    CHECK(kind_of([&] { nearest_neighbors(e, 0, 5); }) == ErrorKind::argument);
    CHECK(nearest_neighbors(e, 0, 0).empty());
  }
}

TEST_SUITE("analysis") {
  TEST_CASE("pearson on a hand dataset") {
    const std::vector<double> x = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    const std::vector<double> y = {2.1, 3.9, 6.2, 7.8, 9.9, 12.5, 13.1, 16.4, 17.8, 20.3};
    const auto c = pearson(x, y);
    const auto d = oracle::direct_pearson(x, y);
    CHECK(std::fabs(c.r - d.r) < 1e-9);
    CHECK(std::fabs(c.t - d.t) < 1e-9 * std::fabs(d.t));
    // Reference values from a standard statistics library.
    CHECK(c.r == doctest::Approx(0.9978047974645319).epsilon(1e-12));
    CHECK(c.p_value == doctest::Approx(1.0132857661338953e-10).epsilon(1e-6));

    const std::vector<double> x2 = {0.3, 1.1, -0.4, 2.2, 0.9, -1.3, 0.05, 1.7, -0.8, 0.6};
    const std::vector<double> y2 = {1.0, 0.2, 0.7, 1.5, -0.3, 0.1, 0.9, 0.4, -0.6, 1.2};
    const auto c2 = pearson(x2, y2);
    CHECK(c2.r == doctest::Approx(0.4304477038812061).epsilon(1e-12));
    CHECK(c2.p_value == doctest::Approx(0.2143211522905411).epsilon(1e-9));
  }

  TEST_CASE("pearson properties") {
    auto eng = make_engine(12);
    for (int t = 0; t < 50; ++t) {
      std::vector<double> x(25), y(25);
      for (std::size_t i = 0; i < 25; ++i) {
        x[i] = uniform01(eng);
        y[i] = x[i] + uniform01(eng);
      }
      const auto base = pearson(x, y);
      CHECK(base.r >= -1.0);
      CHECK(base.r <= 1.0);
      std::vector<double> affine(25), neg(25);
      for (std::size_t i = 0; i < 25; ++i) {
        affine[i] = 3.5 * y[i] - 7.0;
        neg[i] = -y[i];
      }
      CHECK(pearson(x, affine).r == doctest::Approx(base.r).epsilon(1e-12));
      CHECK(pearson(x, neg).r == doctest::Approx(-base.r).epsilon(1e-12));
      const auto d = oracle::direct_pearson(x, y);
      CHECK(std::fabs(base.r - d.r) < 1e-9);
      CHECK(std::fabs(base.t - d.t) < 1e-9 * std::max(1.0, std::fabs(d.t)));
    }
  }

  TEST_CASE("perfect correlation") {
    const std::vector<double> x = {1, 2, 4, 8, 3};
    std::vector<double> neg(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) neg[i] = -x[i];
    const auto c = pearson(x, x);
    CHECK(c.r == 1.0);
    CHECK(c.p_value == 0.0);
    CHECK(pearson(x, neg).r == -1.0);
  }

  TEST_CASE("pearson errors") {
    const std::vector<double> two = {1, 2};
    CHECK(kind_of([&] { pearson(two, two); }) == ErrorKind::sample_size);
    const std::vector<double> flat = {1, 1, 1}, v = {1, 2, 3};
    CHECK(kind_of([&] { pearson(flat, v); }) == ErrorKind::value);
  }

  TEST_CASE("t-distribution tails and incomplete beta against reference values") {
    CHECK(student_t_two_sided_p(0.5, 3) == doctest::Approx(0.651447964848151).epsilon(1e-10));
    CHECK(student_t_two_sided_p(2.0, 10) == doctest::Approx(0.07338803477074039).epsilon(1e-10));
    CHECK(student_t_two_sided_p(-2.0, 10) == doctest::Approx(0.07338803477074039).epsilon(1e-10));
    CHECK(student_t_two_sided_p(3.5, 98) == doctest::Approx(0.0007017617707197113).epsilon(1e-9));
    CHECK(student_t_two_sided_p(10.0, 98) == doctest::Approx(1.210253752662223e-16).epsilon(1e-6));
    CHECK(student_t_two_sided_p(1.0, 1) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(student_t_two_sided_p(0.0, 5) == 1.0);
    CHECK(student_t_two_sided_p(4.2, 2) == doctest::Approx(0.052283266946299166).epsilon(1e-10));
    CHECK(incomplete_beta(0.5, 0.5, 0.3) == doctest::Approx(0.36901011956554536).epsilon(1e-10));
    CHECK(incomplete_beta(2, 3, 0.4) == doctest::Approx(0.5248).epsilon(1e-12));
    CHECK(incomplete_beta(10, 20, 0.25) == doctest::Approx(0.16630494959787945).epsilon(1e-10));
    CHECK(incomplete_beta(1, 1, 0.7) == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(incomplete_beta(49, 0.5, 0.9) == doctest::Approx(0.001349729965389982).epsilon(1e-8));
    CHECK(incomplete_beta(2, 3, 0.0) == 0.0);
    CHECK(incomplete_beta(2, 3, 1.0) == 1.0);
  }

  TEST_CASE("metric correlations") {
    std::vector<PlayerRecord> recs(30);
    Matrix proj(30, 2);
    auto eng = make_engine(3);
    for (std::size_t i = 0; i < 30; ++i) {
      recs[i].id = static_cast<PlayerId>(i);
      recs[i].name = "p" + std::to_string(i);
      recs[i].minutes = 100.0;
      proj(i, 0) = static_cast<double>(i);
      proj(i, 1) = uniform01(eng);
      recs[i].fg_made = static_cast<std::int64_t>(i) * 10;  // per minute equals dim 1 / 10
      recs[i].threes_made = static_cast<std::int64_t>(uniform_index(eng, 50));
      recs[i].assists = static_cast<std::int64_t>(uniform_index(eng, 50));
      recs[i].rebounds = static_cast<std::int64_t>(uniform_index(eng, 50));
      recs[i].plus_minus = -static_cast<std::int64_t>(i);
    }
    const PlayerRegistry reg(recs);
    const auto rows = metric_correlations(proj, reg);
    REQUIRE(rows.size() == 10);
    CHECK(rows[0].metric == "fg_made");
    CHECK(rows[0].dimension == 1);
    CHECK(rows[0].stats.r == doctest::Approx(1.0));
    CHECK(rows[0].stats.p_value < 1e-12);
    CHECK(rows[0].significant);
    CHECK(rows[8].metric == "plus_minus");
    CHECK(rows[8].stats.r == doctest::Approx(-1.0));
    CHECK(rows[1].dimension == 2);

    recs[4].minutes = 0.0;
    CHECK(kind_of([&] { metric_correlations(proj, PlayerRegistry(recs)); }) == ErrorKind::value);
  }
}
