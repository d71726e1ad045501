#pragma once

#include "courtvec/ingest.hpp"
#include "courtvec/model.hpp"
#include "courtvec/rng.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

namespace courtvec {

/// Adds `amount` to the logits of `classes` whenever `player` is on offense.
struct StyleBias {
  PlayerId player = 0;
  std::vector<int> classes;
  double amount = 0.0;
};

enum class LineupSampling {
  uniform,  // ten distinct players drawn uniformly per play
  zipf,     // offense and defense drawn from a fixed lineup pool with Zipf-ranked frequencies
};

struct SynthConfig {
  std::size_t players = 100;
  std::size_t embed_dim = 8;
  std::size_t hidden = 32;
  std::uint64_t seed = 1;
  double param_std = 0.5;
  std::vector<StyleBias> style;
  LineupSampling sampling = LineupSampling::uniform;
  std::size_t lineup_pool = 200;
  double zipf_exponent = 1.0;
  /// Plays tallied to derive the roster's box metrics; 0 means 200 per player.
  std::size_t metric_plays = 0;
};

/// Ground-truth network plus everything needed to draw plays from it.
struct PlantedGenerator {
  EmbeddingModel truth;
  PlayerRegistry roster;
  SynthConfig config;
  std::vector<Lineup> lineup_pool;  // empty unless sampling is zipf
  std::vector<double> pool_cdf;
};

PlantedGenerator plant_generator(const SynthConfig& config);

/// Draws one (offense, defense) pair from the generator's lineup sampler.
std::pair<Lineup, Lineup> sample_matchup(const PlantedGenerator& gen, Engine& eng);

/// `count` plays spread evenly over `games` sequential game ids.
std::vector<Play> generate_plays(const PlantedGenerator& gen, std::size_t count, std::size_t games);

/// Canonical raw-feed event for each class, used when writing raw synthetic feeds.
RawEvent canonical_raw_event(int outcome);

/// Writes plays in the raw feed format (`game_id,seq,offense,defense,event,shot,ft`).
void write_raw_plays(std::ostream& out, std::span<const Play> plays);

}  // namespace courtvec
