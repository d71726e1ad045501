#include "courtvec/error.hpp"
#include "courtvec/model.hpp"

#include "oracles/reference_model.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <cstring>

using namespace courtvec;

namespace {

double rel_err(double a, double b) {
  const double scale = std::max(std::fabs(a), std::fabs(b));
  return scale == 0.0 ? 0.0 : std::fabs(a - b) / scale;
}

}  // namespace

TEST_SUITE("model") {
  TEST_CASE("forward matches the long-double reference") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto m = testing::random_model(15, 4, 9, seed);
      auto eng = make_engine(seed + 100);
      const auto [off, def] = testing::random_matchup(15, eng);
      const auto q = forward(m, off, def);
      const auto ref = oracle::reference_forward(m, off, def);
      double total = 0.0;
      for (std::size_t k = 0; k < 23; ++k) {
        CHECK(q[k] == doctest::Approx(static_cast<double>(ref[k])).epsilon(1e-12));
        total += q[k];
      }
      CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    }
  }

  TEST_CASE("zero-parameter model is uniform") {
    ModelConfig c;
    c.vocab = 10;
    const auto m = EmbeddingModel::zeros(c);
    for (double p : forward(m, {0, 1, 2, 3, 4}, {5, 6, 7, 8, 9})) CHECK(p == 1.0 / 23.0);
  }

  TEST_CASE("lineup order does not change a single bit") {
    const auto m = testing::random_model(20, 8, 16, 4);
    const Lineup off{3, 9, 1, 17, 12};
    const Lineup def{0, 5, 19, 8, 2};
    const auto base = forward(m, off, def);
    Lineup o2 = off, d2 = def;
    std::reverse(o2.begin(), o2.end());
    std::rotate(d2.begin(), d2.begin() + 2, d2.end());
    const auto other = forward(m, o2, d2);
    CHECK(std::memcmp(base.data(), other.data(), sizeof(base)) == 0);
  }

  TEST_CASE("offense and defense are not interchangeable") {
    const auto m = testing::random_model(20, 8, 16, 5);
    const auto a = forward(m, {0, 1, 2, 3, 4}, {5, 6, 7, 8, 9});
    const auto b = forward(m, {5, 6, 7, 8, 9}, {0, 1, 2, 3, 4});
    CHECK(a != b);
  }

  TEST_CASE("forward rejects bad lineups") {
    const auto m = testing::random_model(12, 3, 5, 1);
    CHECK_THROWS_AS(forward(m, {0, 1, 2, 3, 4}, {4, 5, 6, 7, 8}), Error);
    CHECK_THROWS_AS(forward(m, {0, 1, 2, 3, 3}, {5, 6, 7, 8, 9}), Error);
    try {
      forward(m, {0, 1, 2, 3, 40}, {5, 6, 7, 8, 9});
      FAIL("expected unknown_player");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::unknown_player);
    }
  }

  TEST_CASE("loss equals the reference cross-entropy") {
    const auto m = testing::random_model(12, 3, 5, 8);
    const auto plays = testing::random_plays(12, 16, 9);
    const auto lg = loss_and_gradients(m, plays);
    CHECK(lg.loss == doctest::Approx(static_cast<double>(oracle::reference_loss(m, plays))).epsilon(1e-12));
    CHECK(mean_loss(m, plays) == lg.loss);
  }

  TEST_CASE("one-hot loss is -ln q[y]") {
    const auto m = testing::random_model(12, 3, 5, 2);
    const Play p{"g", 0, {0, 1, 2, 3, 4}, {5, 6, 7, 8, 9}, 13};
    const auto q = forward(m, p.offense, p.defense);
    CHECK(mean_loss(m, std::span(&p, 1)) == doctest::Approx(-std::log(q[13])).epsilon(1e-12));
  }

  TEST_CASE("analytic gradients match central differences") {
    const double step = 1e-5;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      auto m = testing::random_model(12, 3, 5, seed);
      const auto plays = testing::random_plays(12, 8, seed + 50);
      const auto grads = loss_and_gradients(m, plays).gradients;
      std::vector<double*> params;
      std::vector<double> analytic;
      m.params.for_each_tensor([&](std::vector<double>& t) {
        for (auto& x : t) params.push_back(&x);
      });
      grads.for_each_tensor([&](const std::vector<double>& t) { analytic.insert(analytic.end(), t.begin(), t.end()); });
      REQUIRE(params.size() == analytic.size());
      for (std::size_t k = 0; k < params.size(); ++k) {
        const double saved = *params[k];
        *params[k] = saved + step;
        const long double up = oracle::reference_loss(m, plays);
        *params[k] = saved - step;
        const long double down = oracle::reference_loss(m, plays);
        *params[k] = saved;
        const double numeric = static_cast<double>((up - down) / (2 * step));
        CHECK(rel_err(analytic[k], numeric) < 1e-4);
      }
    }
  }

  TEST_CASE("gradients of a repeated player accumulate") {
    const auto m = testing::random_model(12, 3, 5, 3);
    const std::vector<Play> one = {Play{"g", 0, {0, 1, 2, 3, 4}, {5, 6, 7, 8, 9}, 2}};
    const std::vector<Play> two = {one[0], Play{"g", 1, {0, 1, 2, 3, 4}, {5, 6, 7, 8, 9}, 2}};
    const auto g1 = loss_and_gradients(m, one).gradients;
    const auto g2 = loss_and_gradients(m, two).gradients;
    for (std::size_t k = 0; k < g1.embeddings.size(); ++k) {
      CHECK(g2.embeddings[k] == doctest::Approx(g1.embeddings[k]).epsilon(1e-14));
    }
    // Players absent from the batch get no gradient.
    for (std::size_t d = 0; d < 3; ++d) CHECK(g1.embeddings[11 * 3 + d] == 0.0);
  }

  TEST_CASE("empty batch is an argument error") {
    const auto m = testing::random_model(12, 3, 5, 3);
    CHECK_THROWS_AS(loss_and_gradients(m, std::span<const Play>{}), Error);
  }

  TEST_CASE("config validation") {
    ModelConfig c;
    c.vocab = 9;
    CHECK_THROWS_AS(c.validate(), Error);
    c.vocab = 10;
    CHECK_NOTHROW(c.validate());
    c.embed_dim = 0;
    CHECK_THROWS_AS(c.validate(), Error);
    c.embed_dim = 8;
    c.outcomes = 22;
    CHECK_THROWS_AS(c.validate(), Error);
  }

  TEST_CASE("initialisation is seeded and bounded by fan-in") {
    ModelConfig c;
    c.vocab = 30;
    const auto a = init_model(c, 7);
    const auto b = init_model(c, 7);
    const auto other = init_model(c, 8);
    CHECK(bitwise_equal(a, b));
    CHECK_FALSE(bitwise_equal(a, other));
    for (double x : a.params.embeddings) CHECK(std::fabs(x) <= 1.0 / std::sqrt(8.0));
    for (double x : a.params.w1) CHECK(std::fabs(x) <= 1.0 / std::sqrt(16.0));
    for (double x : a.params.w2) CHECK(std::fabs(x) <= 1.0 / std::sqrt(128.0));
    for (double x : a.params.b1) CHECK(x == 0.0);
    for (double x : a.params.b2) CHECK(x == 0.0);
  }

  TEST_CASE("validate catches non-finite parameters") {
    auto m = testing::random_model(12, 3, 5, 1);
    CHECK_NOTHROW(m.validate());
    m.params.w2[4] = std::nan("");
    CHECK_THROWS_AS(m.validate(), Error);
  }
}
