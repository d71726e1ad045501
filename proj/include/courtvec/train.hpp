#pragma once

#include "courtvec/model.hpp"

#include <cstdint>
#include <functional>
#include <span>

namespace courtvec {

enum class OptimizerKind { sgd, adam };

struct TrainConfig {
  double learning_rate = 1e-3;
  std::size_t batch_size = 512;
  std::size_t epochs = 10;
  OptimizerKind optimizer = OptimizerKind::adam;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::uint64_t seed = 0;
  bool shuffle = true;

  void validate() const;
};

struct EpochReport {
  std::size_t epoch = 0;      // 1-based
  double mean_loss = 0.0;     // nats, averaged over the epoch's examples
  std::size_t steps = 0;      // optimizer steps taken so far
};

using EpochCallback = std::function<void(const EpochReport&)>;

/// Applies gradient updates to a model in place; keeps Adam moments between steps.
class Optimizer {
 public:
  Optimizer(const ModelConfig& config, const TrainConfig& cfg);

  void step(Parameters& params, const Parameters& gradients);
  std::size_t steps() const { return steps_; }

 private:
  TrainConfig cfg_;
  Parameters first_moment_;
  Parameters second_moment_;
  std::size_t steps_ = 0;
};

/// Mini-batch training. Deterministic given cfg.seed.
EmbeddingModel train(EmbeddingModel model, std::span<const Play> plays, const TrainConfig& cfg,
                     const EpochCallback& report = {});

}  // namespace courtvec
