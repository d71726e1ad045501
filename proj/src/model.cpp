#include "courtvec/model.hpp"

#include "courtvec/error.hpp"
#include "courtvec/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <string>

namespace courtvec {

void ModelConfig::validate() const {
  if (players_per_side != kPlayersPerSide) {
    throw Error(ErrorKind::argument, "players per side must be 5, got " + std::to_string(players_per_side));
  }
  if (outcomes != kNumOutcomes) {
    throw Error(ErrorKind::argument, "outcome count must be 23, got " + std::to_string(outcomes));
  }
  if (vocab < 2 * players_per_side) {
    throw Error(ErrorKind::argument, "vocabulary must hold at least 10 players, got " + std::to_string(vocab));
  }
  if (embed_dim < 1) throw Error(ErrorKind::argument, "embedding dimension must be >= 1");
  if (hidden < 1) throw Error(ErrorKind::argument, "hidden width must be >= 1");
}

Parameters Parameters::zeros(const ModelConfig& c) {
  Parameters p;
  p.embeddings.assign(c.vocab * c.embed_dim, 0.0);
  p.w1.assign(c.input_dim() * c.hidden, 0.0);
  p.b1.assign(c.hidden, 0.0);
  p.w2.assign(c.hidden * c.outcomes, 0.0);
  p.b2.assign(c.outcomes, 0.0);
  return p;
}

std::size_t Parameters::size() const {
  std::size_t n = 0;
  for_each_tensor([&n](const std::vector<double>& t) { n += t.size(); });
  return n;
}

EmbeddingModel EmbeddingModel::zeros(const ModelConfig& config) {
  config.validate();
  return EmbeddingModel{config, Parameters::zeros(config)};
}

std::span<const double> EmbeddingModel::embedding(PlayerId id) const {
  return std::span<const double>(params.embeddings).subspan(id * config.embed_dim, config.embed_dim);
}

std::span<double> EmbeddingModel::embedding(PlayerId id) {
  return std::span<double>(params.embeddings).subspan(id * config.embed_dim, config.embed_dim);
}

void EmbeddingModel::validate() const {
  config.validate();
  const auto expect = Parameters::zeros(config);
  bool shapes = params.embeddings.size() == expect.embeddings.size() &&
                params.w1.size() == expect.w1.size() && params.b1.size() == expect.b1.size() &&
                params.w2.size() == expect.w2.size() && params.b2.size() == expect.b2.size();
  if (!shapes) throw Error(ErrorKind::argument, "parameter shapes do not match the model config");
  params.for_each_tensor([](const std::vector<double>& t) {
    for (double x : t) {
      if (!std::isfinite(x)) throw Error(ErrorKind::value, "model has a non-finite parameter");
    }
  });
}

bool bitwise_equal(const EmbeddingModel& a, const EmbeddingModel& b) {
  if (!(a.config == b.config)) return false;
  auto same = [](const std::vector<double>& x, const std::vector<double>& y) {
    return x.size() == y.size() &&
           (x.empty() || std::memcmp(x.data(), y.data(), x.size() * sizeof(double)) == 0);
  };
  return same(a.params.embeddings, b.params.embeddings) && same(a.params.w1, b.params.w1) &&
         same(a.params.b1, b.params.b1) && same(a.params.w2, b.params.w2) &&
         same(a.params.b2, b.params.b2);
}

EmbeddingModel init_model(const ModelConfig& config, std::uint64_t seed) {
  auto model = EmbeddingModel::zeros(config);
  auto eng = make_engine(seed);
  auto fill = [&eng](std::vector<double>& t, std::size_t fan_in) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    for (auto& x : t) x = -bound + 2.0 * bound * uniform01(eng);
  };
  fill(model.params.embeddings, config.embed_dim);
  fill(model.params.w1, config.input_dim());
  fill(model.params.w2, config.hidden);
  return model;
}

namespace {

struct Activations {
  std::vector<double> input;   // pooled offense ++ pooled defense
  std::vector<double> hidden;  // post-ReLU
  Distribution scores{};
  double log_partition = 0.0;
  Distribution probs{};
};

Lineup sorted_checked(const Lineup& ids, std::size_t vocab) {
  Lineup s = ids;
  std::sort(s.begin(), s.end());
  for (auto id : s) {
    if (id >= vocab) throw Error(ErrorKind::unknown_player, "unknown player id " + std::to_string(id));
  }
  if (std::adjacent_find(s.begin(), s.end()) != s.end()) {
    throw Error(ErrorKind::lineup, "player listed twice in one lineup");
  }
  return s;
}

// Both lineups must already be sorted ascending; pooling walks them in that order.
void run_forward(const EmbeddingModel& m, const Lineup& off, const Lineup& def, Activations& act) {
  const auto& c = m.config;
  const std::size_t h = c.embed_dim;
  act.input.assign(c.input_dim(), 0.0);
  for (std::size_t side = 0; side < 2; ++side) {
    const Lineup& ids = side == 0 ? off : def;
    double* dst = act.input.data() + side * h;
    for (auto id : ids) {
      const double* row = m.params.embeddings.data() + id * h;
      for (std::size_t d = 0; d < h; ++d) dst[d] += row[d];
    }
    for (std::size_t d = 0; d < h; ++d) dst[d] /= static_cast<double>(kPlayersPerSide);
  }

  act.hidden.assign(m.params.b1.begin(), m.params.b1.end());
  for (std::size_t a = 0; a < c.input_dim(); ++a) {
    const double xa = act.input[a];
    const double* w = m.params.w1.data() + a * c.hidden;
    for (std::size_t j = 0; j < c.hidden; ++j) act.hidden[j] += xa * w[j];
  }
  for (auto& z : act.hidden) z = z > 0.0 ? z : 0.0;

  auto& scores = act.scores;
  std::copy(m.params.b2.begin(), m.params.b2.end(), scores.begin());
  for (std::size_t j = 0; j < c.hidden; ++j) {
    const double hj = act.hidden[j];
    if (hj == 0.0) continue;
    const double* w = m.params.w2.data() + j * c.outcomes;
    for (std::size_t k = 0; k < kNumOutcomes; ++k) scores[k] += hj * w[k];
  }

  const double top = *std::max_element(scores.begin(), scores.end());
  double total = 0.0;
  for (std::size_t k = 0; k < kNumOutcomes; ++k) {
    act.probs[k] = std::exp(scores[k] - top);
    total += act.probs[k];
  }
  for (auto& p : act.probs) p /= total;
  act.log_partition = top + std::log(total);
}

}  // namespace

Distribution forward(const EmbeddingModel& model, const Lineup& offense, const Lineup& defense) {
  const auto off = sorted_checked(offense, model.config.vocab);
  const auto def = sorted_checked(defense, model.config.vocab);
  check_matchup(off, def);
  Activations act;
  run_forward(model, off, def, act);
  return act.probs;
}

LossAndGradients loss_and_gradients(const EmbeddingModel& model, std::span<const Play> batch) {
  if (batch.empty()) throw Error(ErrorKind::argument, "loss needs a non-empty batch");
  const auto& c = model.config;
  const std::size_t h = c.embed_dim;
  const double inv_batch = 1.0 / static_cast<double>(batch.size());

  LossAndGradients out;
  out.gradients = Parameters::zeros(c);
  auto& g = out.gradients;

  Activations act;
  Distribution dscores;
  std::vector<double> dpre(c.hidden);
  std::vector<double> dinput(c.input_dim());

  double loss_sum = 0.0;
  for (const auto& play : batch) {
    if (play.outcome < 0 || play.outcome >= static_cast<int>(kNumOutcomes)) {
      throw Error(ErrorKind::outcome, "outcome outside 0..22");
    }
    const auto off = sorted_checked(play.offense, c.vocab);
    const auto def = sorted_checked(play.defense, c.vocab);
    check_matchup(off, def);
    run_forward(model, off, def, act);

    const auto y = static_cast<std::size_t>(play.outcome);
    loss_sum += act.log_partition - act.scores[y];

    for (std::size_t k = 0; k < kNumOutcomes; ++k) dscores[k] = act.probs[k] * inv_batch;
    dscores[y] -= inv_batch;

    for (std::size_t k = 0; k < kNumOutcomes; ++k) g.b2[k] += dscores[k];
    for (std::size_t j = 0; j < c.hidden; ++j) {
      const double hj = act.hidden[j];
      const double* w = model.params.w2.data() + j * c.outcomes;
      double* gw = g.w2.data() + j * c.outcomes;
      double back = 0.0;
      for (std::size_t k = 0; k < kNumOutcomes; ++k) {
        gw[k] += hj * dscores[k];
        back += w[k] * dscores[k];
      }
      // ReLU passes gradient only where the unit was active.
      dpre[j] = hj > 0.0 ? back : 0.0;
    }

    for (std::size_t j = 0; j < c.hidden; ++j) g.b1[j] += dpre[j];
    for (std::size_t a = 0; a < c.input_dim(); ++a) {
      const double xa = act.input[a];
      const double* w = model.params.w1.data() + a * c.hidden;
      double* gw = g.w1.data() + a * c.hidden;
      double back = 0.0;
      for (std::size_t j = 0; j < c.hidden; ++j) {
        gw[j] += xa * dpre[j];
        back += w[j] * dpre[j];
      }
      dinput[a] = back / static_cast<double>(kPlayersPerSide);
    }

    for (std::size_t side = 0; side < 2; ++side) {
      const Lineup& ids = side == 0 ? off : def;
      const double* src = dinput.data() + side * h;
      for (auto id : ids) {
        double* row = g.embeddings.data() + id * h;
        for (std::size_t d = 0; d < h; ++d) row[d] += src[d];
      }
    }
  }
  out.loss = loss_sum * inv_batch;
  return out;
}

double mean_loss(const EmbeddingModel& model, std::span<const Play> plays) {
  if (plays.empty()) throw Error(ErrorKind::argument, "loss needs at least one play");
  Activations act;
  double total = 0.0;
  for (const auto& p : plays) {
    const auto off = sorted_checked(p.offense, model.config.vocab);
    const auto def = sorted_checked(p.defense, model.config.vocab);
    check_matchup(off, def);
    run_forward(model, off, def, act);
    total += act.log_partition - act.scores[static_cast<std::size_t>(p.outcome)];
  }
  return total / static_cast<double>(plays.size());
}

}  // namespace courtvec
