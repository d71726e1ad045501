#pragma once

#include "courtvec/ingest.hpp"
#include "courtvec/outcomes.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace courtvec {

/// Network dimensions. Players per side and outcome count are fixed by the domain.
struct ModelConfig {
  std::size_t vocab = 0;
  std::size_t embed_dim = 8;
  std::size_t players_per_side = kPlayersPerSide;
  std::size_t hidden = 128;
  std::size_t outcomes = kNumOutcomes;

  void validate() const;
  std::size_t input_dim() const { return 2 * embed_dim; }

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

/// Every learnable tensor, row-major. Also used to hold gradients and optimizer moments.
struct Parameters {
  std::vector<double> embeddings;  // vocab x embed_dim
  std::vector<double> w1;          // (2 embed_dim) x hidden, offense half first
  std::vector<double> b1;          // hidden
  std::vector<double> w2;          // hidden x outcomes
  std::vector<double> b2;          // outcomes

  static Parameters zeros(const ModelConfig& config);

  template <typename F>
  void for_each_tensor(F&& f) {
    f(embeddings);
    f(w1);
    f(b1);
    f(w2);
    f(b2);
  }
  template <typename F>
  void for_each_tensor(F&& f) const {
    f(embeddings);
    f(w1);
    f(b1);
    f(w2);
    f(b2);
  }

  std::size_t size() const;
};

struct EmbeddingModel {
  ModelConfig config;
  Parameters params;

  static EmbeddingModel zeros(const ModelConfig& config);

  std::span<const double> embedding(PlayerId id) const;
  std::span<double> embedding(PlayerId id);

  /// Throws when shapes disagree with the config or any entry is non-finite.
  void validate() const;
};

/// Equality of every parameter bit pattern and of the config.
bool bitwise_equal(const EmbeddingModel& a, const EmbeddingModel& b);

/// Uniform fan-in initialisation in [-1/sqrt(fan_in), 1/sqrt(fan_in)], zero biases.
EmbeddingModel init_model(const ModelConfig& config, std::uint64_t seed);

/// Outcome distribution for one possession. Lineups may be given in any order.
Distribution forward(const EmbeddingModel& model, const Lineup& offense, const Lineup& defense);

struct LossAndGradients {
  double loss = 0.0;  // mean cross-entropy, nats
  Parameters gradients;
};

LossAndGradients loss_and_gradients(const EmbeddingModel& model, std::span<const Play> batch);

/// Mean cross-entropy (nats) without gradients.
double mean_loss(const EmbeddingModel& model, std::span<const Play> plays);

}  // namespace courtvec
