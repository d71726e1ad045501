#include "courtvec/train.hpp"

#include "courtvec/error.hpp"
#include "courtvec/rng.hpp"

#include <cmath>
#include <numeric>
#include <string>
#include <vector>

namespace courtvec {

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw Error(ErrorKind::argument, "learning rate must be positive");
  }
  if (batch_size < 1) throw Error(ErrorKind::argument, "batch size must be >= 1");
  if (epochs < 1) throw Error(ErrorKind::argument, "epochs must be >= 1");
  if (optimizer == OptimizerKind::adam) {
    if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0) || !(epsilon > 0.0)) {
      throw Error(ErrorKind::argument, "adam needs 0 <= beta < 1 and epsilon > 0");
    }
  }
}

Optimizer::Optimizer(const ModelConfig& config, const TrainConfig& cfg) : cfg_(cfg) {
  cfg_.validate();
  if (cfg_.optimizer == OptimizerKind::adam) {
    first_moment_ = Parameters::zeros(config);
    second_moment_ = Parameters::zeros(config);
  }
}

void Optimizer::step(Parameters& params, const Parameters& gradients) {
  ++steps_;
  std::vector<std::vector<double>*> p;
  std::vector<const std::vector<double>*> g;
  params.for_each_tensor([&p](std::vector<double>& t) { p.push_back(&t); });
  gradients.for_each_tensor([&g](const std::vector<double>& t) { g.push_back(&t); });

  if (cfg_.optimizer == OptimizerKind::sgd) {
    for (std::size_t t = 0; t < p.size(); ++t) {
      auto& w = *p[t];
      const auto& d = *g[t];
      for (std::size_t k = 0; k < w.size(); ++k) w[k] -= cfg_.learning_rate * d[k];
    }
    return;
  }

  std::vector<std::vector<double>*> m;
  std::vector<std::vector<double>*> v;
  first_moment_.for_each_tensor([&m](std::vector<double>& t) { m.push_back(&t); });
  second_moment_.for_each_tensor([&v](std::vector<double>& t) { v.push_back(&t); });
  const double n = static_cast<double>(steps_);
  const double correct1 = 1.0 - std::pow(cfg_.beta1, n);
  const double correct2 = 1.0 - std::pow(cfg_.beta2, n);
  for (std::size_t t = 0; t < p.size(); ++t) {
    auto& w = *p[t];
    const auto& d = *g[t];
    auto& mt = *m[t];
    auto& vt = *v[t];
    for (std::size_t k = 0; k < w.size(); ++k) {
      mt[k] = cfg_.beta1 * mt[k] + (1.0 - cfg_.beta1) * d[k];
      vt[k] = cfg_.beta2 * vt[k] + (1.0 - cfg_.beta2) * d[k] * d[k];
      const double mhat = mt[k] / correct1;
      const double vhat = vt[k] / correct2;
      w[k] -= cfg_.learning_rate * mhat / (std::sqrt(vhat) + cfg_.epsilon);
    }
  }
}

EmbeddingModel train(EmbeddingModel model, std::span<const Play> plays, const TrainConfig& cfg,
                     const EpochCallback& report) {
  cfg.validate();
  model.validate();
  if (plays.empty()) throw Error(ErrorKind::argument, "training needs at least one play");

  Optimizer opt(model.config, cfg);
  auto eng = make_engine(derive_seed(cfg.seed, 0x7261696eULL));
  std::vector<std::size_t> order(plays.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<Play> batch;
  batch.reserve(cfg.batch_size);

  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    if (cfg.shuffle) {
      for (std::size_t k = order.size(); k > 1; --k) {
        std::swap(order[k - 1], order[uniform_index(eng, k)]);
      }
    }
    double loss_total = 0.0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), start + cfg.batch_size);
      batch.clear();
      for (std::size_t k = start; k < end; ++k) batch.push_back(plays[order[k]]);
      auto lg = loss_and_gradients(model, batch);
      if (!std::isfinite(lg.loss)) {
        throw Error(ErrorKind::divergence,
                    "non-finite loss at optimizer step " + std::to_string(opt.steps() + 1));
      }
      loss_total += lg.loss * static_cast<double>(batch.size());
      opt.step(model.params, lg.gradients);
    }
    if (report) {
      report(EpochReport{epoch, loss_total / static_cast<double>(plays.size()), opt.steps()});
    }
  }
  return model;
}

}  // namespace courtvec
