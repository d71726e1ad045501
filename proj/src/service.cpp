#include "courtvec/service.hpp"

#include "courtvec/analysis.hpp"
#include "courtvec/checkpoint.hpp"
#include "courtvec/error.hpp"
#include "courtvec/json_report.hpp"
#include "courtvec/lineup_opt.hpp"
#include "courtvec/sim.hpp"
#include "courtvec/text.hpp"
#include "courtvec/version.hpp"

#include <httplib.h>

#include <cstdio>

namespace courtvec {

namespace {

constexpr std::string_view kPrefix = "/api/v1";

/// A request the service refuses before touching the model: 400 or 404 with a fixed code.
struct RequestError {
  int status;
  std::string code;
  std::string message;
  Json detail;
};

HttpResponse error_response(int status, std::string_view code, std::string_view message, Json detail = Json::object()) {
  Json body = {{"code", code}, {"message", message}, {"detail", std::move(detail)}};
  return {status, body.dump()};
}

int status_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::unknown_player: return 404;
    case ErrorKind::io:
    case ErrorKind::checkpoint: return 500;
    default: return 422;
  }
}

RequestError bad_request(std::string message) { return {400, "bad_request", std::move(message), Json::object()}; }

Json parse_body(std::string_view body) {
  Json j = Json::parse(body.begin(), body.end(), nullptr, false);
  if (j.is_discarded()) throw bad_request("request body is not valid JSON");
  if (!j.is_object()) throw bad_request("request body must be a JSON object");
  return j;
}

std::uint64_t unsigned_field(const Json& body, const char* name, std::uint64_t fallback) {
  if (!body.contains(name)) return fallback;
  const auto& v = body[name];
  if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
    throw bad_request(std::string("'") + name + "' must be a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

/// Player ids from a JSON array; ids beyond the registry are reported as 404s.
std::vector<PlayerId> id_list(const Json& body, const char* name, const PlayerRegistry& registry) {
  if (!body.contains(name)) throw bad_request(std::string("missing field '") + name + "'");
  const auto& arr = body[name];
  if (!arr.is_array()) throw bad_request(std::string("'") + name + "' must be an array of player ids");
  std::vector<PlayerId> ids;
  for (const auto& v : arr) {
    if (!v.is_number_unsigned()) throw bad_request(std::string("'") + name + "' must contain non-negative integers");
    const auto raw = v.get<std::uint64_t>();
    if (raw >= registry.size()) {
      throw RequestError{404, "unknown_player", "unknown player id " + std::to_string(raw),
                         {{"field", name}, {"id", raw}}};
    }
    ids.push_back(static_cast<PlayerId>(raw));
  }
  return ids;
}

Lineup lineup_field(const Json& body, const char* name, const PlayerRegistry& registry) {
  const auto ids = id_list(body, name, registry);
  try {
    return checked_lineup(ids, registry);
  } catch (const Error& e) {
    throw RequestError{422, to_string(e.kind()), e.what(), {{"field", name}}};
  }
}

std::size_t sims_field(const Json& body, std::uint64_t fallback) {
  const auto sims = unsigned_field(body, "sims", fallback);
  if (sims < 1 || sims > kMaxRequestSims) {
    throw RequestError{422, "argument_error", "sims must be between 1 and " + std::to_string(kMaxRequestSims),
                       {{"field", "sims"}, {"value", sims}}};
  }
  return sims;
}

std::string format_crc(std::uint32_t crc) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%08x", crc);
  return buf;
}

}  // namespace

Service::Service(EmbeddingModel model, PlayerRegistry registry, std::size_t threads)
    : model_(std::move(model)), registry_(std::move(registry)), threads_(threads < 1 ? 1 : threads) {
  if (registry_.size() != model_.config.vocab) {
    throw Error(ErrorKind::registry, "registry has " + std::to_string(registry_.size()) + " players but the model has " +
                                         std::to_string(model_.config.vocab));
  }
  crc_ = checkpoint_crc(model_);
}

HttpResponse Service::handle(std::string_view method, std::string_view path, const QueryParams& query,
                             std::string_view body) const {
  try {
    if (!path.starts_with(kPrefix)) return error_response(404, "not_found", "no such endpoint");
    const auto route = path.substr(kPrefix.size());
    const auto parts = text::split(route.substr(route.empty() ? 0 : 1), '/');
    const bool get = method == "GET";
    const bool post = method == "POST";
    auto wrong_method = [&] { return error_response(405, "method_not_allowed", "method not allowed for this endpoint"); };

    if (route == "/meta") {
      if (!get) return wrong_method();
      const auto& c = model_.config;
      Json out = {{"version", kVersion},
                  {"vocab", c.vocab},
                  {"embed_dim", c.embed_dim},
                  {"players_per_side", c.players_per_side},
                  {"hidden", c.hidden},
                  {"outcomes", c.outcomes},
                  {"checkpoint_crc32", format_crc(crc_)},
                  {"classes", outcome_table()}};
      return {200, out.dump()};
    }

    if (route == "/players") {
      if (!get) return wrong_method();
      std::string needle;
      if (auto it = query.find("q"); it != query.end()) needle = text::to_lower(it->second);
      Json list = Json::array();
      for (const auto& r : registry_.records()) {
        if (!needle.empty() && text::to_lower(r.name).find(needle) == std::string::npos) continue;
        list.push_back({{"id", r.id}, {"name", r.name}, {"position", to_string(r.position)}});
      }
      return {200, Json{{"players", std::move(list)}}.dump()};
    }

    if (parts.size() == 3 && parts[0] == "players" && parts[2] == "neighbors") {
      if (!get) return wrong_method();
      const auto id = text::parse_int(parts[1]);
      if (!id || *id < 0) throw bad_request("player id must be a non-negative integer");
      if (static_cast<std::uint64_t>(*id) >= registry_.size()) {
        throw RequestError{404, "unknown_player", "unknown player id " + std::string(parts[1]), {{"id", *id}}};
      }
      std::size_t count = 5;
      if (auto it = query.find("count"); it != query.end()) {
        const auto c = text::parse_int(it->second);
        if (!c || *c < 0) throw bad_request("count must be a non-negative integer");
        count = static_cast<std::size_t>(*c);
      }
      const auto pid = static_cast<PlayerId>(*id);
      Json list = Json::array();
      for (const auto& n : nearest_neighbors(embedding_matrix(model_), pid, count)) {
        list.push_back({{"id", n.id}, {"name", registry_.at(n.id).name}, {"distance", n.distance}});
      }
      return {200, Json{{"player", pid}, {"neighbors", std::move(list)}}.dump()};
    }

    if (route == "/predict") {
      if (!post) return wrong_method();
      const auto j = parse_body(body);
      const auto off = lineup_field(j, "offense", registry_);
      const auto def = lineup_field(j, "defense", registry_);
      const auto dist = forward(model_, off, def);
      Json out = {{"offense", lineup_json(off)},
                  {"defense", lineup_json(def)},
                  {"distribution", distribution_json(dist)},
                  {"classes", outcome_table()}};
      return {200, out.dump()};
    }

    if (route == "/simulate/series") {
      if (!post) return wrong_method();
      const auto j = parse_body(body);
      const auto a = lineup_field(j, "lineup_a", registry_);
      const auto b = lineup_field(j, "lineup_b", registry_);
      SeriesOptions opt;
      opt.sims = sims_field(j, opt.sims);
      opt.possessions = unsigned_field(j, "possessions", opt.possessions);
      opt.seed = unsigned_field(j, "seed", opt.seed);
      opt.threads = threads_;
      HeadToHeadRow row;
      row.team_a = j.value("team_a", std::string("A"));
      row.team_b = j.value("team_b", std::string("B"));
      row.lineup_a = a;
      row.lineup_b = b;
      check_matchup(a, b);
      row.result = simulate_series(model_, a, b, opt);
      Json out = series_json(row.result);
      out["lineup_a"] = lineup_json(a);
      out["lineup_b"] = lineup_json(b);
      out["seed"] = opt.seed;
      out["row"] = row.render();
      return {200, out.dump()};
    }

    if (route == "/optimize/fifth") {
      if (!post) return wrong_method();
      const auto j = parse_body(body);
      FifthManQuery q;
      const auto four = id_list(j, "fixed_four", registry_);
      if (four.size() != 4) {
        throw RequestError{422, "lineup_error", "fixed_four needs exactly 4 players", {{"field", "fixed_four"}}};
      }
      std::copy(four.begin(), four.end(), q.fixed_four.begin());
      q.opponent = lineup_field(j, "opponent", registry_);
      q.candidates = id_list(j, "candidates", registry_);
      q.sims = sims_field(j, q.sims);
      q.possessions = unsigned_field(j, "possessions", q.possessions);
      q.seed = unsigned_field(j, "seed", q.seed);
      q.threads = threads_;
      Json rows = Json::array();
      for (const auto& r : rank_fifth_man(model_, q)) rows.push_back(fifth_man_json(r));
      return {200, Json{{"seed", q.seed}, {"rows", std::move(rows)}}.dump()};
    }

    return error_response(404, "not_found", "no such endpoint");
  } catch (const RequestError& e) {
    return error_response(e.status, e.code, e.message, e.detail);
  } catch (const Error& e) {
    return error_response(status_for(e.kind()), to_string(e.kind()), e.what());
  } catch (const Json::exception& e) {
    return error_response(400, "bad_request", e.what());
  }
}

void serve_http(const Service& service, const std::string& host, int port) {
  httplib::Server server;
  auto bridge = [&service](const httplib::Request& req, httplib::Response& res) {
    QueryParams query(req.params.begin(), req.params.end());
    const auto out = service.handle(req.method, req.path, query, req.body);
    res.status = out.status;
    res.set_content(out.body, "application/json");
  };
  server.Get(".*", bridge);
  server.Post(".*", bridge);
  if (!server.bind_to_port(host, port)) {
    throw Error(ErrorKind::io, "cannot bind " + host + ":" + std::to_string(port));
  }
  std::fprintf(stderr, "courtvec: serving on %s:%d\n", host.c_str(), port);
  if (!server.listen_after_bind()) throw Error(ErrorKind::io, "server stopped unexpectedly");
}

}  // namespace courtvec
