#include "courtvec/synth.hpp"

#include "courtvec/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <ostream>
#include <random>

namespace courtvec {

namespace {

constexpr std::uint64_t kTruthStream = 0x7472757468ULL;
constexpr std::uint64_t kPoolStream = 0x706f6f6cULL;
constexpr std::uint64_t kMetricStream = 0x6d6574726963ULL;
constexpr std::uint64_t kPlayStream = 0x706c617973ULL;
constexpr std::size_t kChunk = 4096;
constexpr double kMinutesPerPossession = 0.24;  // 48 minutes over ~200 possessions

Lineup uniform_lineup_pair(std::size_t v, Engine& eng, Lineup& defense) {
  // Partial Fisher-Yates over a scratch index set: ten distinct players.
  thread_local std::vector<PlayerId> scratch;
  scratch.resize(v);
  std::iota(scratch.begin(), scratch.end(), PlayerId{0});
  for (std::size_t k = 0; k < 2 * kPlayersPerSide; ++k) {
    std::swap(scratch[k], scratch[k + uniform_index(eng, v - k)]);
  }
  Lineup offense{};
  std::copy_n(scratch.begin(), kPlayersPerSide, offense.begin());
  std::copy_n(scratch.begin() + kPlayersPerSide, kPlayersPerSide, defense.begin());
  std::sort(offense.begin(), offense.end());
  std::sort(defense.begin(), defense.end());
  return offense;
}

bool disjoint(const Lineup& a, const Lineup& b) {
  for (auto x : a) {
    if (std::find(b.begin(), b.end(), x) != b.end()) return false;
  }
  return true;
}

void plant_style(EmbeddingModel& m, const std::vector<StyleBias>& style) {
  if (style.empty()) return;
  const auto& c = m.config;
  // One channel (embedding dim + hidden unit) per distinct (class set, sign).
  std::map<std::pair<std::vector<int>, bool>, std::size_t> channels;
  for (const auto& s : style) {
    if (s.player >= c.vocab) throw Error(ErrorKind::argument, "style bias names an unknown player");
    if (s.classes.empty()) throw Error(ErrorKind::argument, "style bias needs at least one class");
    auto classes = s.classes;
    std::sort(classes.begin(), classes.end());
    classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
    for (int k : classes) {
      if (k < 0 || k >= static_cast<int>(kNumOutcomes)) throw Error(ErrorKind::argument, "style class outside 0..22");
    }
    channels.try_emplace({classes, s.amount < 0}, channels.size());
  }
  const std::size_t n = channels.size();
  if (n >= c.embed_dim || n >= c.hidden) {
    throw Error(ErrorKind::argument, "too many style channels for the embedding/hidden sizes");
  }
  for (const auto& [key, ch] : channels) {
    const std::size_t dim = c.embed_dim - n + ch;
    const std::size_t unit = c.hidden - n + ch;
    for (std::size_t p = 0; p < c.vocab; ++p) m.params.embeddings[p * c.embed_dim + dim] = 0.0;
    for (std::size_t half = 0; half < 2; ++half) {
      double* row = m.params.w1.data() + (half * c.embed_dim + dim) * c.hidden;
      std::fill(row, row + c.hidden, 0.0);
    }
    for (std::size_t a = 0; a < c.input_dim(); ++a) m.params.w1[a * c.hidden + unit] = 0.0;
    m.params.w1[dim * c.hidden + unit] = 1.0;
    m.params.b1[unit] = 0.0;
    double* out = m.params.w2.data() + unit * c.outcomes;
    std::fill(out, out + c.outcomes, 0.0);
    for (int k : key.first) out[k] = key.second ? -1.0 : 1.0;
  }
  for (const auto& s : style) {
    auto classes = s.classes;
    std::sort(classes.begin(), classes.end());
    classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
    const std::size_t ch = channels.at({classes, s.amount < 0});
    const std::size_t dim = c.embed_dim - n + ch;
    // Mean pooling divides by five; scale so the pooled channel equals |amount|.
    m.params.embeddings[s.player * c.embed_dim + dim] += static_cast<double>(kPlayersPerSide) * std::abs(s.amount);
  }
}

PlayerRegistry synthetic_roster(const EmbeddingModel& truth, const SynthConfig& cfg) {
  static constexpr Position kPositions[] = {Position::G, Position::F, Position::C, Position::GF, Position::FC};
  std::vector<PlayerRecord> recs(cfg.players);
  for (std::size_t i = 0; i < cfg.players; ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "Synth %04zu", i);
    recs[i].id = static_cast<PlayerId>(i);
    recs[i].name = name;
    recs[i].position = kPositions[i % 5];
  }

  const std::size_t plays = cfg.metric_plays ? cfg.metric_plays : 200 * cfg.players;
  auto eng = make_engine(derive_seed(cfg.seed, kMetricStream));
  std::vector<std::uint64_t> possessions(cfg.players, 0);
  Lineup def{};
  for (std::size_t t = 0; t < plays; ++t) {
    const Lineup off = uniform_lineup_pair(cfg.players, eng, def);
    const auto q = forward(truth, off, def);
    std::array<double, kNumOutcomes> cdf{};
    std::partial_sum(q.begin(), q.end(), cdf.begin());
    const int y = sample_cdf(cdf, uniform01(eng));
    const int pts = outcome_points(y);
    for (auto id : off) {
      ++possessions[id];
      recs[id].plus_minus += pts;
    }
    for (auto id : def) {
      ++possessions[id];
      recs[id].plus_minus -= pts;
    }
    if (is_made_field_goal(y)) {
      const auto scorer = uniform_index(eng, kPlayersPerSide);
      ++recs[off[scorer]].fg_made;
      if (is_made_three(y)) ++recs[off[scorer]].threes_made;
      if (uniform01(eng) < 0.6) {
        const auto helper = (scorer + 1 + uniform_index(eng, kPlayersPerSide - 1)) % kPlayersPerSide;
        ++recs[off[helper]].assists;
      }
    } else if (is_missed_field_goal(y)) {
      const bool defensive = uniform01(eng) < 0.75;
      const auto who = uniform_index(eng, kPlayersPerSide);
      ++recs[defensive ? def[who] : off[who]].rebounds;
    }
  }
  for (std::size_t i = 0; i < cfg.players; ++i) {
    recs[i].minutes = kMinutesPerPossession * static_cast<double>(possessions[i]);
  }
  return PlayerRegistry(std::move(recs));
}

}  // namespace

PlantedGenerator plant_generator(const SynthConfig& config) {
  if (config.players < 2 * kPlayersPerSide) {
    throw Error(ErrorKind::argument, "the generator needs at least 10 players, got " + std::to_string(config.players));
  }
  if (!(config.param_std > 0.0)) throw Error(ErrorKind::argument, "parameter std must be positive");

  PlantedGenerator gen;
  gen.config = config;
  ModelConfig mc;
  mc.vocab = config.players;
  mc.embed_dim = config.embed_dim;
  mc.hidden = config.hidden;
  gen.truth = EmbeddingModel::zeros(mc);

  auto eng = make_engine(derive_seed(config.seed, kTruthStream));
  std::normal_distribution<double> normal(0.0, config.param_std);
  gen.truth.params.for_each_tensor([&](std::vector<double>& t) {
    for (auto& x : t) x = normal(eng);
  });
  plant_style(gen.truth, config.style);

  if (config.sampling == LineupSampling::zipf) {
    if (config.lineup_pool < 2) throw Error(ErrorKind::argument, "zipf sampling needs a pool of at least 2 lineups");
    if (!(config.zipf_exponent >= 0.0)) throw Error(ErrorKind::argument, "zipf exponent must be non-negative");
    auto pe = make_engine(derive_seed(config.seed, kPoolStream));
    // Start with a permutation of the roster so every player appears in some lineup.
    std::vector<PlayerId> perm(config.players);
    std::iota(perm.begin(), perm.end(), PlayerId{0});
    for (std::size_t k = perm.size(); k > 1; --k) std::swap(perm[k - 1], perm[uniform_index(pe, k)]);
    for (std::size_t k = 0; k + kPlayersPerSide <= perm.size() && gen.lineup_pool.size() < config.lineup_pool;
         k += kPlayersPerSide) {
      Lineup l{};
      std::copy_n(perm.begin() + static_cast<std::ptrdiff_t>(k), kPlayersPerSide, l.begin());
      std::sort(l.begin(), l.end());
      gen.lineup_pool.push_back(l);
    }
    while (gen.lineup_pool.size() < config.lineup_pool) {
      Lineup def{};
      gen.lineup_pool.push_back(uniform_lineup_pair(config.players, pe, def));
    }
    for (std::size_t k = gen.lineup_pool.size(); k > 1; --k) {
      std::swap(gen.lineup_pool[k - 1], gen.lineup_pool[uniform_index(pe, k)]);
    }
    double total = 0.0;
    for (std::size_t r = 0; r < gen.lineup_pool.size(); ++r) {
      total += 1.0 / std::pow(static_cast<double>(r + 1), config.zipf_exponent);
      gen.pool_cdf.push_back(total);
    }
  }

  gen.roster = synthetic_roster(gen.truth, config);
  return gen;
}

std::pair<Lineup, Lineup> sample_matchup(const PlantedGenerator& gen, Engine& eng) {
  if (gen.config.sampling == LineupSampling::uniform) {
    Lineup def{};
    Lineup off = uniform_lineup_pair(gen.config.players, eng, def);
    return {off, def};
  }
  for (;;) {
    const auto& off = gen.lineup_pool[static_cast<std::size_t>(sample_cdf(gen.pool_cdf, uniform01(eng)))];
    const auto& def = gen.lineup_pool[static_cast<std::size_t>(sample_cdf(gen.pool_cdf, uniform01(eng)))];
    if (disjoint(off, def)) return {off, def};
  }
}

std::vector<Play> generate_plays(const PlantedGenerator& gen, std::size_t count, std::size_t games) {
  if (count < 1 || games < 1) throw Error(ErrorKind::argument, "need at least one play and one game");
  if (games > count) throw Error(ErrorKind::argument, "more games than plays");

  const int width = static_cast<int>(std::to_string(games - 1).size());
  std::vector<Play> plays(count);
  std::size_t prev_game = games;
  std::uint64_t seq = 0;
  char id[32];
  for (std::size_t chunk = 0; chunk * kChunk < count; ++chunk) {
    auto eng = make_engine(derive_seed(gen.config.seed, kPlayStream, chunk));
    const std::size_t end = std::min(count, (chunk + 1) * kChunk);
    for (std::size_t j = chunk * kChunk; j < end; ++j) {
      auto [off, def] = sample_matchup(gen, eng);
      const auto q = forward(gen.truth, off, def);
      std::array<double, kNumOutcomes> cdf{};
      std::partial_sum(q.begin(), q.end(), cdf.begin());
      const std::size_t game = j * games / count;
      if (game != prev_game) {
        prev_game = game;
        seq = 0;
      }
      std::snprintf(id, sizeof(id), "g%0*zu", width, game);
      plays[j] = Play{id, seq++, off, def, sample_cdf(cdf, uniform01(eng))};
    }
  }
  return plays;
}

RawEvent canonical_raw_event(int outcome) {
  static const char* kShot[] = {"jump shot", "driving layup shot", "3pt jump shot"};
  const auto ft = [](int made, int att) { return std::optional<FreeThrows>(FreeThrows{made, att}); };
  switch (outcome) {
    case 0: case 4: case 17: return {kShot[outcome == 0 ? 0 : outcome == 4 ? 1 : 2], ShotFlag::made, std::nullopt};
    case 1: case 5: case 18:
      return {kShot[outcome == 1 ? 0 : outcome == 5 ? 1 : 2], ShotFlag::missed, std::nullopt};
    case 2: case 6: case 19: return {kShot[outcome == 2 ? 0 : outcome == 6 ? 1 : 2], ShotFlag::made, ft(1, 1)};
    case 3: case 7: case 20: return {kShot[outcome == 3 ? 0 : outcome == 7 ? 1 : 2], ShotFlag::made, ft(0, 1)};
    case 8: return {"free throw", ShotFlag::none, ft(0, 1)};
    case 9: return {"free throw", ShotFlag::none, ft(1, 1)};
    case 10: return {"free throw", ShotFlag::none, ft(0, 2)};
    case 11: return {"free throw", ShotFlag::none, ft(1, 2)};
    case 12: return {"free throw", ShotFlag::none, ft(2, 2)};
    case 13: return {"free throw", ShotFlag::none, ft(0, 3)};
    case 14: return {"free throw", ShotFlag::none, ft(1, 3)};
    case 15: return {"free throw", ShotFlag::none, ft(2, 3)};
    case 16: return {"free throw", ShotFlag::none, ft(3, 3)};
    case 21: return {"bad pass turnover", ShotFlag::none, std::nullopt};
    case 22: return {"personal foul", ShotFlag::none, std::nullopt};
    default: throw Error(ErrorKind::argument, "outcome class out of range: " + std::to_string(outcome));
  }
}

void write_raw_plays(std::ostream& out, std::span<const Play> plays) {
  out << "game_id,seq,offense,defense,event,shot,ft\n";
  auto ids = [&out](const Lineup& l) {
    for (std::size_t k = 0; k < l.size(); ++k) out << (k ? ";" : "") << l[k];
  };
  for (const auto& p : plays) {
    const auto ev = canonical_raw_event(p.outcome);
    out << p.game_id << ',' << p.seq << ',';
    ids(p.offense);
    out << ',';
    ids(p.defense);
    out << ',' << ev.description << ','
        << (ev.shot == ShotFlag::made ? "made" : ev.shot == ShotFlag::missed ? "missed" : "-") << ',';
    if (ev.free_throws) {
      out << ev.free_throws->made << '/' << ev.free_throws->attempts;
    } else {
      out << '-';
    }
    out << '\n';
  }
}

}  // namespace courtvec
