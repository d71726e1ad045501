#include "courtvec/cli.hpp"

#include "courtvec/analysis.hpp"
#include "courtvec/checkpoint.hpp"
#include "courtvec/evaluation.hpp"
#include "courtvec/json_report.hpp"
#include "courtvec/lineup_opt.hpp"
#include "courtvec/service.hpp"
#include "courtvec/sim.hpp"
#include "courtvec/synth.hpp"
#include "courtvec/text.hpp"
#include "courtvec/train.hpp"
#include "courtvec/version.hpp"

#include <CLI11.hpp>
#include <unistd.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>

namespace courtvec::cli {

namespace fs = std::filesystem;

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::argument: return usage;
    case ErrorKind::divergence:
    case ErrorKind::degenerate_model:
    case ErrorKind::degenerate_dimension:
    case ErrorKind::sample_size: return runtime_error;
    default: return data_error;
  }
}

std::vector<std::string> expand_response_files(const std::vector<std::string>& args) {
  std::vector<std::string> out;
  for (const auto& a : args) {
    if (a.size() < 2 || a[0] != '@') {
      out.push_back(a);
      continue;
    }
    std::ifstream in(a.substr(1));
    if (!in) throw Error(ErrorKind::io, "cannot open argument file '" + a.substr(1) + "'");
    std::string line;
    while (std::getline(in, line)) {
      const auto body = text::trim(text::chomp(line));
      if (body.empty() || body.front() == '#') continue;
      std::string word;
      bool in_word = false;
      char quote = 0;
      for (char c : body) {
        if (quote) {
          if (c == quote) {
            quote = 0;
          } else {
            word += c;
          }
        } else if (c == '"' || c == '\'') {
          quote = c;
          in_word = true;
        } else if (c == ' ' || c == '\t') {
          if (in_word) out.push_back(std::move(word));
          word.clear();
          in_word = false;
        } else {
          word += c;
          in_word = true;
        }
      }
      if (quote) throw Error(ErrorKind::argument, "unterminated quote in argument file '" + a.substr(1) + "'");
      if (in_word) out.push_back(std::move(word));
    }
  }
  return out;
}

void write_atomically(const std::string& path, const std::function<void(std::ostream&)>& fill) {
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp-" + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::io, "cannot write '" + tmp.string() + "'");
    try {
      fill(out);
      out.flush();
    } catch (...) {
      out.close();
      std::error_code ec;
      fs::remove(tmp, ec);
      throw;
    }
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw Error(ErrorKind::io, "write to '" + tmp.string() + "' failed");
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(ErrorKind::io, "cannot move output into place at '" + path + "'");
  }
}

namespace {

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot open '" + path + "'");
  return in;
}

PlayerRegistry read_registry(const std::string& path) {
  auto in = open_input(path);
  return build_registry(in);
}

/// The registry from `path` when given, else anonymous ids matching the model.
PlayerRegistry registry_for(const std::string& path, const EmbeddingModel& model) {
  if (path.empty()) return PlayerRegistry::anonymous(model.config.vocab);
  auto reg = read_registry(path);
  if (reg.size() != model.config.vocab) {
    throw Error(ErrorKind::registry, "'" + path + "' lists " + std::to_string(reg.size()) +
                                         " players but the model has " + std::to_string(model.config.vocab));
  }
  return reg;
}

std::vector<Play> read_plays(const std::string& path, const PlayerRegistry& registry) {
  auto in = open_input(path);
  return ingest(in, registry, default_mapping()).plays;
}

std::vector<std::string> comma_list(const std::string& s) {
  std::vector<std::string> out;
  for (auto tok : text::split(s, ',')) out.emplace_back(text::trim(tok));
  return out;
}

std::vector<PlayerId> parse_ids(const std::string& s, const char* flag) {
  std::vector<PlayerId> ids;
  for (const auto& tok : comma_list(s)) {
    const auto v = text::parse_int(tok);
    if (!v || *v < 0 || *v > std::numeric_limits<PlayerId>::max()) {
      throw Error(ErrorKind::argument, std::string(flag) + ": '" + tok + "' is not a player id (use --names for names)");
    }
    ids.push_back(static_cast<PlayerId>(*v));
  }
  return ids;
}

/// Ids from a comma list, or names resolved through the registry when `names` is set.
std::vector<PlayerId> player_list(const std::string& s, const char* flag, bool names, const PlayerRegistry& registry) {
  std::vector<PlayerId> ids = names ? std::vector<PlayerId>{} : parse_ids(s, flag);
  if (names) {
    std::vector<std::string> unknown;
    for (const auto& tok : comma_list(s)) {
      if (auto id = registry.find_by_name(tok)) {
        ids.push_back(*id);
      } else {
        unknown.push_back(tok);
      }
    }
    if (!unknown.empty()) {
      std::string msg = std::string(flag) + ": unknown players:";
      for (const auto& u : unknown) msg += " '" + u + "'";
      throw Error(ErrorKind::resolution, msg);
    }
  }
  for (auto id : ids) registry.at(id);
  return ids;
}

std::string fixed(double x, int digits) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << x;
  return s.str();
}

std::string player_label(const PlayerRegistry& reg, PlayerId id) {
  return std::to_string(id) + " (" + reg.at(id).name + ")";
}

void write_json(const std::string& path, const Json& j) {
  write_atomically(path, [&](std::ostream& o) { o << j.dump(2) << '\n'; });
}

struct Context {
  std::ostream& out;
  std::size_t threads = 1;
};

// ---- subcommands ---------------------------------------------------------------

struct IngestArgs {
  std::string plays, players, rules, out;
};

void cmd_ingest(const IngestArgs& a, Context& ctx) {
  const auto reg = read_registry(a.players);
  OutcomeMapping custom;
  if (!a.rules.empty()) {
    auto in = open_input(a.rules);
    custom = parse_rules(in);
  }
  auto in = open_input(a.plays);
  const auto result = ingest(in, reg, a.rules.empty() ? default_mapping() : custom);
  write_atomically(a.out, [&](std::ostream& o) { write_plays(o, result.plays); });
  ctx.out << "ingested " << result.plays.size() << " plays (" << result.dropped << " rows dropped) into " << a.out
          << '\n';
}

struct SynthArgs {
  std::size_t players = 100, plays = 200000, games = 500, h = 8, hidden = 32, pool = 200, metric_plays = 0;
  std::uint64_t seed = 1;
  double param_std = 0.5, zipf_exponent = 1.0;
  std::string sampling = "uniform", format = "normalized";
  std::vector<std::string> style;
  std::string out_plays, out_players, out_truth;
};

StyleBias parse_style(const std::string& s) {
  const auto parts = text::split(s, ':');
  if (parts.size() != 3) throw Error(ErrorKind::argument, "--style expects player:class,class:amount, got '" + s + "'");
  StyleBias b;
  const auto id = text::parse_int(parts[0]);
  const auto amount = text::parse_double(parts[2]);
  if (!id || *id < 0 || !amount) throw Error(ErrorKind::argument, "bad --style '" + s + "'");
  b.player = static_cast<PlayerId>(*id);
  b.amount = *amount;
  for (auto tok : text::split(parts[1], ',')) {
    const auto k = text::parse_int(tok);
    if (!k) throw Error(ErrorKind::argument, "bad class in --style '" + s + "'");
    b.classes.push_back(static_cast<int>(*k));
  }
  return b;
}

void cmd_synth(const SynthArgs& a, Context& ctx) {
  SynthConfig cfg;
  cfg.players = a.players;
  cfg.embed_dim = a.h;
  cfg.hidden = a.hidden;
  cfg.seed = a.seed;
  cfg.param_std = a.param_std;
  cfg.sampling = a.sampling == "zipf" ? LineupSampling::zipf : LineupSampling::uniform;
  cfg.lineup_pool = a.pool;
  cfg.zipf_exponent = a.zipf_exponent;
  cfg.metric_plays = a.metric_plays;
  for (const auto& s : a.style) cfg.style.push_back(parse_style(s));
  const auto gen = plant_generator(cfg);
  const auto plays = generate_plays(gen, a.plays, a.games);
  write_atomically(a.out_plays, [&](std::ostream& o) {
    if (a.format == "raw") {
      write_raw_plays(o, plays);
    } else {
      write_plays(o, plays);
    }
  });
  write_atomically(a.out_players, [&](std::ostream& o) { write_registry(o, gen.roster); });
  if (!a.out_truth.empty()) {
    write_atomically(a.out_truth, [&](std::ostream& o) { save_checkpoint(gen.truth, o); });
  }
  ctx.out << "generated " << plays.size() << " plays over " << a.games << " games for " << a.players
          << " players (seed " << a.seed << ")\n";
}

struct TrainArgs {
  std::string plays, players, out, out_validation, loss_csv, optimizer = "adam";
  std::size_t h = 8, hidden = 128, epochs = 10, batch = 512, holdout_games = 0;
  double lr = 1e-3;
  std::uint64_t seed = 0;
};

void cmd_train(const TrainArgs& a, Context& ctx) {
  const auto reg = read_registry(a.players);
  auto plays = read_plays(a.plays, reg);
  std::vector<Play> validation;
  if (a.holdout_games > 0) {
    auto split = chronological_split(plays, a.holdout_games);
    plays = std::move(split.train);
    validation = std::move(split.validation);
  }
  if (plays.empty()) throw Error(ErrorKind::argument, "no training plays");
  ModelConfig mc;
  mc.vocab = reg.size();
  mc.embed_dim = a.h;
  mc.hidden = a.hidden;
  mc.validate();
  TrainConfig tc;
  tc.learning_rate = a.lr;
  tc.batch_size = a.batch;
  tc.epochs = a.epochs;
  tc.optimizer = a.optimizer == "sgd" ? OptimizerKind::sgd : OptimizerKind::adam;
  tc.seed = a.seed;
  tc.validate();
  std::vector<EpochReport> epochs;
  const auto model = train(init_model(mc, a.seed), plays, tc, [&](const EpochReport& r) {
    epochs.push_back(r);
    ctx.out << "epoch " << r.epoch << " loss " << fixed(r.mean_loss, 6) << " nats\n";
  });
  write_atomically(a.out, [&](std::ostream& o) { save_checkpoint(model, o); });
  if (!a.out_validation.empty()) {
    write_atomically(a.out_validation, [&](std::ostream& o) { write_plays(o, validation); });
  }
  if (!a.loss_csv.empty()) {
    write_atomically(a.loss_csv, [&](std::ostream& o) {
      o << "epoch,mean_loss_nats\n";
      for (const auto& r : epochs) o << r.epoch << ',' << text::format_double(r.mean_loss) << '\n';
    });
  }
  char crc[16];
  std::snprintf(crc, sizeof(crc), "%08x", checkpoint_crc(model));
  ctx.out << "trained on " << plays.size() << " plays; wrote " << a.out << " (crc32 " << crc << ")\n";
}

struct EvalArgs {
  std::string model, plays, players, out;
  std::size_t min_plays = 15;
};

void cmd_eval(const EvalArgs& a, Context& ctx) {
  const auto model = load_checkpoint_file(a.model);
  const auto reg = registry_for(a.players, model);
  const auto plays = read_plays(a.plays, reg);
  const auto report = validate_matchups(model, plays, a.min_plays);
  const auto baseline = uniform_baseline(plays, a.min_plays);
  Json j = validation_json(report);
  j["min_plays"] = a.min_plays;
  j["uniform_baseline_mean_kl_bits"] = baseline.empty() ? Json(nullptr) : Json(baseline.mean);
  j["log_base"] = 2;
  write_json(a.out, j);
  if (report.empty()) {
    ctx.out << "no matchup has more than " << a.min_plays << " plays\n";
  } else {
    ctx.out << "mean K-L " << fixed(report.mean, 4) << " +/- " << fixed(report.stddev, 4) << " bits over "
            << report.matchups.size() << " matchups (uniform baseline " << fixed(baseline.mean, 4) << ")\n";
  }
}

struct CurveArgs {
  std::string model, plays, players, out;
  std::size_t max_n = 60, trials = 200;
  std::uint64_t seed = 0;
};

void cmd_eval_curve(const CurveArgs& a, Context& ctx) {
  const auto model = load_checkpoint_file(a.model);
  const auto reg = registry_for(a.players, model);
  const auto plays = read_plays(a.plays, reg);
  const auto curve = kl_vs_plays_curve(model, plays, a.max_n, a.trials, a.seed);
  write_atomically(a.out, [&](std::ostream& o) {
    o << "n,mean_kl\n";
    for (const auto& p : curve) o << p.n << ',' << text::format_double(p.mean_kl_bits) << '\n';
  });
  ctx.out << "wrote " << curve.size() << " curve points to " << a.out << '\n';
}

struct AnalyzeArgs {
  std::string model, players, out, out_pca, out_elbow;
  std::size_t k = 3, k_max = 10;
  std::uint64_t seed = 0;
  double alpha = 5e-4;
};

void cmd_analyze(const AnalyzeArgs& a, Context& ctx) {
  const auto model = load_checkpoint_file(a.model);
  const auto reg = registry_for(a.players, model);
  const auto z = standardize(embedding_matrix(model));
  const auto p = pca(z.scores);
  const std::size_t v = z.scores.rows;
  const auto clusters = kmeans(z.scores, a.k, derive_seed(a.seed, a.k));
  const auto elbow = elbow_curve(z.scores, 1, std::min(a.k_max, v), a.seed);
  const auto corr = metric_correlations(p.projections, reg, a.alpha);

  auto matrix_json = [](const Matrix& m) {
    Json rows = Json::array();
    for (std::size_t r = 0; r < m.rows; ++r) rows.push_back(std::vector<double>(m.row(r).begin(), m.row(r).end()));
    return rows;
  };
  Json players = Json::array();
  for (std::size_t i = 0; i < v; ++i) {
    const auto& rec = reg.at(static_cast<PlayerId>(i));
    players.push_back({{"id", rec.id},
                       {"name", rec.name},
                       {"position", to_string(rec.position)},
                       {"standardized", std::vector<double>(z.scores.row(i).begin(), z.scores.row(i).end())},
                       {"pca", std::vector<double>(p.projections.row(i).begin(), p.projections.row(i).end())},
                       {"cluster", clusters.assignment[i]}});
  }
  Json elbow_rows = Json::array();
  for (const auto& e : elbow) elbow_rows.push_back({{"k", e.k}, {"wcss", e.wcss}});
  Json corr_rows = Json::array();
  for (const auto& c : corr) {
    corr_rows.push_back({{"metric", c.metric},
                         {"dimension", c.dimension},
                         {"r", c.stats.r},
                         {"t", c.stats.t},
                         {"p_value", c.stats.p_value},
                         {"significant", c.significant}});
  }
  Json j = {{"metadata",
             {{"standardized_before_pca", true},
              {"standardized_before_kmeans", true},
              {"std", "population"},
              {"seed", a.seed},
              {"alpha", a.alpha}}},
            {"means", z.means},
            {"stds", z.stds},
            {"pca", {{"components", matrix_json(p.components)}, {"explained_variance", p.explained_variance}}},
            {"kmeans",
             {{"k", a.k}, {"wcss", clusters.wcss}, {"iterations", clusters.iterations},
              {"centroids", matrix_json(clusters.centroids)}}},
            {"elbow", std::move(elbow_rows)},
            {"correlations", std::move(corr_rows)},
            {"players", std::move(players)}};
  write_json(a.out, j);
  if (!a.out_pca.empty()) {
    write_atomically(a.out_pca, [&](std::ostream& o) {
      o << "player_id,name,position,pc1,pc2,cluster\n";
      for (std::size_t i = 0; i < v; ++i) {
        const auto& rec = reg.at(static_cast<PlayerId>(i));
        o << rec.id << ',' << rec.name << ',' << to_string(rec.position) << ','
          << text::format_double(p.projections(i, 0)) << ','
          << text::format_double(p.projections.cols > 1 ? p.projections(i, 1) : 0.0) << ','
          << clusters.assignment[i] << '\n';
      }
    });
  }
  if (!a.out_elbow.empty()) {
    write_atomically(a.out_elbow, [&](std::ostream& o) {
      o << "k,wcss\n";
      for (const auto& e : elbow) o << e.k << ',' << text::format_double(e.wcss) << '\n';
    });
  }
  ctx.out << "k=" << a.k << " wcss " << fixed(clusters.wcss, 4) << "; PC1/PC2 variance "
          << fixed(p.explained_variance[0], 4) << "/"
          << fixed(p.explained_variance.size() > 1 ? p.explained_variance[1] : 0.0, 4) << '\n';
  for (const auto& c : corr) {
    ctx.out << c.metric << " ~ PC" << c.dimension << ": r=" << fixed(c.stats.r, 3) << " p=" << c.stats.p_value
            << (c.significant ? " *" : "") << '\n';
  }
}

struct NeighborArgs {
  std::string model, players, player, out;
  std::size_t count = 5;
};

void cmd_neighbors(const NeighborArgs& a, Context& ctx) {
  const auto model = load_checkpoint_file(a.model);
  const auto reg = registry_for(a.players, model);
  PlayerId id = 0;
  if (auto byname = reg.find_by_name(a.player)) {
    id = *byname;
  } else if (auto num = text::parse_int(a.player); num && *num >= 0) {
    id = static_cast<PlayerId>(*num);
    reg.at(id);
  } else {
    throw Error(ErrorKind::resolution, "unknown player '" + a.player + "'");
  }
  const auto nn = nearest_neighbors(embedding_matrix(model), id, a.count);
  ctx.out << "nearest to " << player_label(reg, id) << ":\n";
  for (std::size_t r = 0; r < nn.size(); ++r) {
    ctx.out << "  " << r + 1 << ". " << player_label(reg, nn[r].id) << "  " << fixed(nn[r].distance, 4) << '\n';
  }
  if (!a.out.empty()) {
    write_atomically(a.out, [&](std::ostream& o) {
      o << "rank,player_id,name,distance\n";
      for (std::size_t r = 0; r < nn.size(); ++r) {
        o << r + 1 << ',' << nn[r].id << ',' << reg.at(nn[r].id).name << ',' << text::format_double(nn[r].distance)
          << '\n';
      }
    });
  }
}

struct SimulateArgs {
  std::string model, players, lineup_a, lineup_b, out, team_a = "Team A", team_b = "Team B";
  std::size_t sims = 1000, possessions = 100;
  std::uint64_t seed = 0;
  bool names = false;
};

void cmd_simulate(const SimulateArgs& a, Context& ctx) {
  if (a.names && a.players.empty()) throw Error(ErrorKind::argument, "--names needs --players");
  const auto model = load_checkpoint_file(a.model);
  const auto reg = registry_for(a.players, model);
  HeadToHeadRow row;
  row.team_a = a.team_a;
  row.team_b = a.team_b;
  row.lineup_a = checked_lineup(player_list(a.lineup_a, "--lineup-a", a.names, reg), reg);
  row.lineup_b = checked_lineup(player_list(a.lineup_b, "--lineup-b", a.names, reg), reg);
  check_matchup(row.lineup_a, row.lineup_b);
  SeriesOptions opt{a.sims, a.possessions, a.seed, ctx.threads};
  row.result = simulate_series(model, row.lineup_a, row.lineup_b, opt);
  if (!a.out.empty()) {
    Json j = series_json(row.result);
    j["team_a"] = a.team_a;
    j["team_b"] = a.team_b;
    j["lineup_a"] = lineup_json(row.lineup_a);
    j["lineup_b"] = lineup_json(row.lineup_b);
    j["possessions"] = a.possessions;
    j["seed"] = a.seed;
    j["row"] = row.render();
    write_json(a.out, j);
  }
  ctx.out << "Matchup | Avg. Series Wins | Avg. Margin | Team 1 Game Win %\n" << row.render() << '\n';
}

struct OptimizeArgs {
  std::string model, players, plays, fixed, opponent, pool, out;
  std::size_t sims = 2000, possessions = 100;
  std::uint64_t seed = 0;
  bool names = false;
};

std::vector<PlayerId> read_pool_file(const std::string& path) {
  auto in = open_input(path);
  std::vector<PlayerId> ids;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto body = text::trim(text::chomp(line));
    if (body.empty() || body.front() == '#') continue;
    for (auto tok : text::split(body, ',')) {
      tok = text::trim(tok);
      if (tok.empty()) continue;
      const auto v = text::parse_int(tok);
      if (!v || *v < 0) throw ParseError(lineno, "bad player id '" + std::string(tok) + "'");
      ids.push_back(static_cast<PlayerId>(*v));
    }
  }
  return ids;
}

void cmd_optimize(const OptimizeArgs& a, Context& ctx) {
  if (a.names && a.players.empty()) throw Error(ErrorKind::argument, "--names needs --players");
  const auto model = load_checkpoint_file(a.model);
  const auto reg = registry_for(a.players, model);
  FifthManQuery q;
  const auto four = player_list(a.fixed, "--fixed", a.names, reg);
  if (four.size() != 4) throw Error(ErrorKind::lineup, "--fixed needs exactly 4 players");
  std::copy(four.begin(), four.end(), q.fixed_four.begin());
  q.opponent = checked_lineup(player_list(a.opponent, "--opponent", a.names, reg), reg);
  if (a.pool.starts_with("top:")) {
    const auto n = text::parse_int(std::string_view(a.pool).substr(4));
    if (!n || *n < 1) throw Error(ErrorKind::argument, "--pool top:N needs N >= 1");
    if (a.plays.empty()) throw Error(ErrorKind::argument, "--pool top:N needs --plays");
    const auto plays = read_plays(a.plays, reg);
    for (auto id : most_frequent_players(plays, reg.size())) {
      const bool placed = std::find(four.begin(), four.end(), id) != four.end() ||
                          std::find(q.opponent.begin(), q.opponent.end(), id) != q.opponent.end();
      if (!placed && q.candidates.size() < static_cast<std::size_t>(*n)) q.candidates.push_back(id);
    }
  } else {
    q.candidates = read_pool_file(a.pool);
  }
  q.sims = a.sims;
  q.possessions = a.possessions;
  q.seed = a.seed;
  q.threads = ctx.threads;
  const auto rows = rank_fifth_man(model, q);
  if (!a.out.empty()) {
    Json list = Json::array();
    for (const auto& r : rows) {
      auto j = fifth_man_json(r);
      j["name"] = reg.at(r.candidate).name;
      list.push_back(std::move(j));
    }
    write_json(a.out, {{"seed", a.seed}, {"sims", a.sims}, {"possessions", a.possessions}, {"rows", std::move(list)}});
  }
  ctx.out << "rank | candidate | win % | margin +/- std\n";
  for (std::size_t r = 0; r < rows.size(); ++r) {
    ctx.out << r + 1 << " | " << player_label(reg, rows[r].candidate) << " | "
            << fixed(100.0 * rows[r].win_fraction, 1) << "% | " << fixed(rows[r].mean_margin, 2) << " +/- "
            << fixed(rows[r].margin_std, 2) << '\n';
  }
}

struct ServeArgs {
  std::string model, players, bind = "127.0.0.1:8080";
};

void cmd_serve(const ServeArgs& a, Context& ctx) {
  auto model = load_checkpoint_file(a.model);
  auto reg = registry_for(a.players, model);
  const auto colon = a.bind.rfind(':');
  const auto port = colon == std::string::npos ? std::nullopt : text::parse_int(std::string_view(a.bind).substr(colon + 1));
  if (!port || *port < 0 || *port > 65535) throw Error(ErrorKind::argument, "--bind expects host:port");
  const Service service(std::move(model), std::move(reg), ctx.threads);
  serve_http(service, a.bind.substr(0, colon), static_cast<int>(*port));
}

void cmd_version(Context& ctx) {
  ctx.out << "courtvec " << kVersion << " (" << kBuildType << ", " << kCompiler << "; checkpoint format v"
          << kCheckpointVersion << ")\n";
}

}  // namespace

int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  try {
    args = expand_response_files(args);
  } catch (const Error& e) {
    err << "courtvec: " << e.what() << '\n';
    return usage;
  }

  CLI::App app{"courtvec: lineup embeddings, play-outcome prediction and game simulation", "courtvec"};
  // `--h` is the embedding-size flag, so help is long-form only.
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);
  app.fallthrough();
  Context ctx{out};
  app.add_option("--threads", ctx.threads, "Worker threads for simulations")->check(CLI::PositiveNumber);

  std::function<void()> action;
  auto set = [&action](CLI::App* sub, std::function<void()> f) { sub->callback([&action, f] { action = f; }); };
  const auto nonneg = CLI::NonNegativeNumber;
  const auto positive = CLI::PositiveNumber;

  IngestArgs ia;
  auto* ingest_cmd = app.add_subcommand("ingest", "Normalize a play feed into the canonical play CSV");
  ingest_cmd->add_option("--plays", ia.plays, "Raw or normalized play CSV")->required();
  ingest_cmd->add_option("--players", ia.players, "Player registry CSV")->required();
  ingest_cmd->add_option("--rules", ia.rules, "Outcome mapping rules (default: built-in table)");
  ingest_cmd->add_option("--out", ia.out, "Normalized play CSV")->required();
  set(ingest_cmd, [&] { cmd_ingest(ia, ctx); });

  SynthArgs sa;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic corpus from a planted model");
  synth_cmd->add_option("--players", sa.players, "Roster size")->capture_default_str();
  synth_cmd->add_option("--plays", sa.plays, "Number of plays")->capture_default_str()->check(positive);
  synth_cmd->add_option("--games", sa.games, "Number of games")->capture_default_str()->check(positive);
  synth_cmd->add_option("--seed", sa.seed, "Generator seed")->capture_default_str();
  synth_cmd->add_option("--h", sa.h, "Embedding size of the planted model")->capture_default_str();
  synth_cmd->add_option("--hidden", sa.hidden, "Hidden units of the planted model")->capture_default_str();
  synth_cmd->add_option("--param-std", sa.param_std, "Std of planted parameters")->capture_default_str();
  synth_cmd->add_option("--sampling", sa.sampling, "Lineup sampling")
      ->capture_default_str()
      ->check(CLI::IsMember({"uniform", "zipf"}));
  synth_cmd->add_option("--pool", sa.pool, "Lineup pool size for zipf sampling")->capture_default_str();
  synth_cmd->add_option("--zipf-exponent", sa.zipf_exponent, "Zipf exponent")->capture_default_str();
  synth_cmd->add_option("--metric-plays", sa.metric_plays, "Plays tallied for box metrics (0: 200 per player)")
      ->capture_default_str();
  synth_cmd->add_option("--style", sa.style, "Planted bias player:class,class:amount (repeatable)");
  synth_cmd->add_option("--format", sa.format, "Play file format")
      ->capture_default_str()
      ->check(CLI::IsMember({"normalized", "raw"}));
  synth_cmd->add_option("--out-plays", sa.out_plays, "Play CSV")->required();
  synth_cmd->add_option("--out-players", sa.out_players, "Player registry CSV")->required();
  synth_cmd->add_option("--out-truth", sa.out_truth, "Checkpoint of the planted model");
  set(synth_cmd, [&] { cmd_synth(sa, ctx); });

  TrainArgs ta;
  auto* train_cmd = app.add_subcommand("train", "Fit player embeddings and the outcome network");
  train_cmd->add_option("--plays", ta.plays, "Play CSV")->required();
  train_cmd->add_option("--players", ta.players, "Player registry CSV")->required();
  train_cmd->add_option("--h", ta.h, "Embedding size")->capture_default_str()->check(positive);
  train_cmd->add_option("--hidden", ta.hidden, "Hidden units")->capture_default_str()->check(positive);
  train_cmd->add_option("--epochs", ta.epochs, "Epochs")->capture_default_str()->check(positive);
  train_cmd->add_option("--batch", ta.batch, "Batch size")->capture_default_str()->check(positive);
  train_cmd->add_option("--lr", ta.lr, "Learning rate")->capture_default_str()->check(positive);
  train_cmd->add_option("--optimizer", ta.optimizer, "Optimizer")
      ->capture_default_str()
      ->check(CLI::IsMember({"adam", "sgd"}));
  train_cmd->add_option("--seed", ta.seed, "Initialization and shuffle seed")->capture_default_str();
  train_cmd->add_option("--holdout-games", ta.holdout_games, "Hold out the last N games")->capture_default_str();
  train_cmd->add_option("--out-validation", ta.out_validation, "Write held-out plays here");
  train_cmd->add_option("--loss-csv", ta.loss_csv, "Write per-epoch losses here");
  train_cmd->add_option("--out", ta.out, "Checkpoint path")->required();
  set(train_cmd, [&] { cmd_train(ta, ctx); });

  EvalArgs ea;
  auto* eval_cmd = app.add_subcommand("eval", "K-L divergence of the model on held-out matchups");
  eval_cmd->add_option("--model", ea.model, "Checkpoint")->required();
  eval_cmd->add_option("--plays", ea.plays, "Validation play CSV")->required();
  eval_cmd->add_option("--players", ea.players, "Player registry CSV (default: ids only)");
  eval_cmd->add_option("--min-plays", ea.min_plays, "Keep matchups with more plays than this")->capture_default_str();
  eval_cmd->add_option("--out", ea.out, "Report JSON")->required();
  set(eval_cmd, [&] { cmd_eval(ea, ctx); });

  CurveArgs ca;
  auto* curve_cmd = app.add_subcommand("eval-curve", "Mean K-L against the number of sampled plays");
  curve_cmd->add_option("--model", ca.model, "Checkpoint")->required();
  curve_cmd->add_option("--plays", ca.plays, "Play CSV")->required();
  curve_cmd->add_option("--players", ca.players, "Player registry CSV (default: ids only)");
  curve_cmd->add_option("--max-n", ca.max_n, "Largest subsample")->capture_default_str()->check(positive);
  curve_cmd->add_option("--trials", ca.trials, "Trials")->capture_default_str()->check(positive);
  curve_cmd->add_option("--seed", ca.seed, "Seed")->capture_default_str();
  curve_cmd->add_option("--out", ca.out, "Curve CSV (n,mean_kl)")->required();
  set(curve_cmd, [&] { cmd_eval_curve(ca, ctx); });

  AnalyzeArgs aa;
  auto* analyze_cmd = app.add_subcommand("analyze", "PCA, clustering and metric correlations of the embeddings");
  analyze_cmd->add_option("--model", aa.model, "Checkpoint")->required();
  analyze_cmd->add_option("--players", aa.players, "Player registry CSV")->required();
  analyze_cmd->add_option("--k", aa.k, "Clusters")->capture_default_str()->check(positive);
  analyze_cmd->add_option("--k-max", aa.k_max, "Largest k of the elbow table")->capture_default_str()->check(positive);
  analyze_cmd->add_option("--seed", aa.seed, "k-means seed")->capture_default_str();
  analyze_cmd->add_option("--alpha", aa.alpha, "Significance level")->capture_default_str();
  analyze_cmd->add_option("--out", aa.out, "Analysis JSON")->required();
  analyze_cmd->add_option("--out-pca", aa.out_pca, "Per-player PC1/PC2/cluster CSV");
  analyze_cmd->add_option("--out-elbow", aa.out_elbow, "Elbow CSV (k,wcss)");
  set(analyze_cmd, [&] { cmd_analyze(aa, ctx); });

  NeighborArgs na;
  auto* nn_cmd = app.add_subcommand("neighbors", "Closest players in embedding space");
  nn_cmd->add_option("--model", na.model, "Checkpoint")->required();
  nn_cmd->add_option("--players", na.players, "Player registry CSV (default: ids only)");
  nn_cmd->add_option("--player", na.player, "Player id or exact name")->required();
  nn_cmd->add_option("--count", na.count, "Neighbors to list")->capture_default_str()->check(nonneg);
  nn_cmd->add_option("--out", na.out, "Neighbor CSV");
  set(nn_cmd, [&] { cmd_neighbors(na, ctx); });

  SimulateArgs sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Best-of-7 series between two lineups");
  sim_cmd->add_option("--model", sim.model, "Checkpoint")->required();
  sim_cmd->add_option("--players", sim.players, "Player registry CSV");
  sim_cmd->add_option("--lineup-a", sim.lineup_a, "Five comma-separated ids (or names with --names)")->required();
  sim_cmd->add_option("--lineup-b", sim.lineup_b, "Five comma-separated ids (or names with --names)")->required();
  sim_cmd->add_option("--team-a", sim.team_a, "Label for lineup A")->capture_default_str();
  sim_cmd->add_option("--team-b", sim.team_b, "Label for lineup B")->capture_default_str();
  sim_cmd->add_option("--sims", sim.sims, "Simulated series")->capture_default_str()->check(positive);
  sim_cmd->add_option("--possessions", sim.possessions, "Possessions per team per game")
      ->capture_default_str()
      ->check(positive);
  sim_cmd->add_option("--seed", sim.seed, "Seed")->capture_default_str();
  sim_cmd->add_flag("--names", sim.names, "Lineups are player names from --players");
  sim_cmd->add_option("--out", sim.out, "Report JSON");
  set(sim_cmd, [&] { cmd_simulate(sim, ctx); });

  OptimizeArgs oa;
  auto* opt_cmd = app.add_subcommand("optimize-fifth", "Rank candidate fifth players against an opponent");
  opt_cmd->add_option("--model", oa.model, "Checkpoint")->required();
  opt_cmd->add_option("--players", oa.players, "Player registry CSV");
  opt_cmd->add_option("--plays", oa.plays, "Play CSV, for --pool top:N");
  opt_cmd->add_option("--fixed", oa.fixed, "Four comma-separated ids (or names with --names)")->required();
  opt_cmd->add_option("--opponent", oa.opponent, "Five comma-separated ids (or names with --names)")->required();
  opt_cmd->add_option("--pool", oa.pool, "Candidate id file, or top:N most frequent players not already placed")->required();
  opt_cmd->add_option("--sims", oa.sims, "Simulated series per candidate")->capture_default_str()->check(positive);
  opt_cmd->add_option("--possessions", oa.possessions, "Possessions per team per game")
      ->capture_default_str()
      ->check(positive);
  opt_cmd->add_option("--seed", oa.seed, "Seed shared by all candidates")->capture_default_str();
  opt_cmd->add_flag("--names", oa.names, "Players are names from --players");
  opt_cmd->add_option("--out", oa.out, "Ranking JSON");
  set(opt_cmd, [&] { cmd_optimize(oa, ctx); });

  ServeArgs va;
  auto* serve_cmd = app.add_subcommand("serve", "Serve the JSON API");
  serve_cmd->add_option("--model", va.model, "Checkpoint")->required();
  serve_cmd->add_option("--players", va.players, "Player registry CSV (default: ids only)");
  serve_cmd->add_option("--bind", va.bind, "host:port")->capture_default_str();
  set(serve_cmd, [&] { cmd_serve(va, ctx); });

  auto* version_cmd = app.add_subcommand("version", "Print build metadata");
  set(version_cmd, [&] { cmd_version(ctx); });

  try {
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? ok : usage;
  }

  try {
    action();
    return ok;
  } catch (const Error& e) {
    err << "courtvec: " << to_string(e.kind()) << ": " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "courtvec: internal error: " << e.what() << '\n';
    return runtime_error;
  }
}

}  // namespace courtvec::cli
