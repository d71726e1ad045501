#include "courtvec/analysis.hpp"
#include "courtvec/error.hpp"
#include "courtvec/json_report.hpp"
#include "courtvec/lineup_opt.hpp"
#include "courtvec/service.hpp"
#include "courtvec/sim.hpp"

#include "support.hpp"

#include <doctest.h>
#include <httplib.h>

#include <chrono>
#include <thread>

using namespace courtvec;

namespace {

PlayerRegistry named_registry(std::size_t v) {
  std::vector<PlayerRecord> recs(v);
  for (std::size_t i = 0; i < v; ++i) {
    recs[i].id = static_cast<PlayerId>(i);
    recs[i].name = (i % 2 ? "Guard " : "Center ") + std::to_string(i);
  }
  return PlayerRegistry(recs);
}

const Service& service() {
  static const Service s(testing::random_model(16, 3, 6, 21, 0.8), named_registry(16));
  return s;
}

HttpResponse get(const std::string& path, const QueryParams& q = {}) { return service().handle("GET", path, q, ""); }
HttpResponse post(const std::string& path, const std::string& body) { return service().handle("POST", path, {}, body); }

Json body_of(const HttpResponse& r) { return Json::parse(r.body); }

}  // namespace

TEST_SUITE("service") {
  TEST_CASE("meta") {
    const auto r = get("/api/v1/meta");
    REQUIRE(r.status == 200);
    const auto j = body_of(r);
    CHECK(j["vocab"] == 16);
    CHECK(j["embed_dim"] == 3);
    CHECK(j["classes"].size() == 23);
    CHECK(j["checkpoint_crc32"].get<std::string>().size() == 8);
    CHECK(post("/api/v1/meta", "{}").status == 405);
  }

  TEST_CASE("players search") {
    const auto all = body_of(get("/api/v1/players"));
    CHECK(all["players"].size() == 16);
    const auto guards = body_of(get("/api/v1/players", {{"q", "gUaRd"}}));
    CHECK(guards["players"].size() == 8);
    CHECK(guards["players"][0]["name"] == "Guard 1");
    CHECK(body_of(get("/api/v1/players", {{"q", "zzz"}}))["players"].empty());
  }

  TEST_CASE("neighbors") {
    const auto r = get("/api/v1/players/3/neighbors", {{"count", "4"}});
    REQUIRE(r.status == 200);
    const auto j = body_of(r);
    const auto expect = nearest_neighbors(embedding_matrix(service().model()), 3, 4);
    REQUIRE(j["neighbors"].size() == 4);
    for (std::size_t k = 0; k < 4; ++k) {
      CHECK(j["neighbors"][k]["id"] == expect[k].id);
      CHECK(j["neighbors"][k]["distance"].get<double>() == expect[k].distance);
    }
    CHECK(body_of(get("/api/v1/players/3/neighbors"))["neighbors"].size() == 5);
    CHECK(body_of(get("/api/v1/players/3/neighbors", {{"count", "0"}}))["neighbors"].empty());
    CHECK(get("/api/v1/players/3/neighbors", {{"count", "16"}}).status == 422);
    CHECK(get("/api/v1/players/99999/neighbors").status == 404);
    CHECK(get("/api/v1/players/abc/neighbors").status == 400);
    CHECK(get("/api/v1/players/3/neighbors", {{"count", "-1"}}).status == 400);
  }

  TEST_CASE("predict") {
    const auto r = post("/api/v1/predict", R"({"offense":[4,0,1,2,3],"defense":[5,6,7,8,9]})");
    REQUIRE(r.status == 200);
    const auto j = body_of(r);
    const auto q = forward(service().model(), {0, 1, 2, 3, 4}, {5, 6, 7, 8, 9});
    double total = 0.0;
    for (std::size_t k = 0; k < 23; ++k) {
      CHECK(j["distribution"][k]["probability"].get<double>() == q[k]);
      total += j["distribution"][k]["probability"].get<double>();
    }
    CHECK(total == doctest::Approx(1.0));
    CHECK(j["offense"] == Json::parse("[0,1,2,3,4]"));
  }

  TEST_CASE("request errors") {
    const auto unknown = post("/api/v1/predict", R"({"offense":[0,1,2,3,99999],"defense":[5,6,7,8,9]})");
    CHECK(unknown.status == 404);
    CHECK(body_of(unknown)["code"] == "unknown_player");
    CHECK(body_of(unknown)["detail"]["id"] == 99999);

    const auto four = post("/api/v1/predict", R"({"offense":[0,1,2,3],"defense":[5,6,7,8,9]})");
    CHECK(four.status == 422);
    CHECK(body_of(four)["code"] == "lineup_error");
    CHECK(post("/api/v1/predict", R"({"offense":[0,1,2,3,3],"defense":[5,6,7,8,9]})").status == 422);

    for (const char* bad : {"{not json", "[1,2]", R"({"offense":"x","defense":[5,6,7,8,9]})",
                            R"({"offense":[0,1,2,3,-4],"defense":[5,6,7,8,9]})", R"({"defense":[5,6,7,8,9]})"}) {
      const auto r = post("/api/v1/predict", bad);
      CHECK(r.status == 400);
      CHECK(body_of(r)["code"] == "bad_request");
    }
    CHECK(get("/api/v1/nothing").status == 404);
    CHECK(get("/elsewhere").status == 404);
    CHECK(get("/api/v1/predict").status == 405);
  }

  TEST_CASE("simulate series") {
    const std::string req =
        R"({"lineup_a":[0,1,2,3,4],"lineup_b":[5,6,7,8,9],"sims":50,"possessions":40,"seed":9,"team_a":"Red"})";
    const auto r = post("/api/v1/simulate/series", req);
    REQUIRE(r.status == 200);
    const auto j = body_of(r);
    const auto direct = simulate_series(service().model(), {0, 1, 2, 3, 4}, {5, 6, 7, 8, 9}, SeriesOptions{50, 40, 9, 1});
    CHECK(j["mean_margin"].get<double>() == direct.mean_margin);
    CHECK(j["game_win_fraction_a"].get<double>() == direct.game_win_fraction_a);
    CHECK(j["row"].get<std::string>().rfind("Red vs B | ", 0) == 0);
    CHECK(post("/api/v1/simulate/series", req).body == r.body);

    const auto zero = post("/api/v1/simulate/series", R"({"lineup_a":[0,1,2,3,4],"lineup_b":[5,6,7,8,9],"sims":0})");
    CHECK(zero.status == 422);
    CHECK(body_of(zero)["code"] == "argument_error");
    CHECK(post("/api/v1/simulate/series", R"({"lineup_a":[0,1,2,3,4],"lineup_b":[5,6,7,8,9],"sims":100001})").status ==
          422);
    CHECK(post("/api/v1/simulate/series", R"({"lineup_a":[0,1,2,3,4],"lineup_b":[4,6,7,8,9]})").status == 422);
  }

  TEST_CASE("degenerate models are reported as unprocessable") {
    ModelConfig c;
    c.vocab = 10;
    c.embed_dim = 2;
    c.hidden = 2;
    auto m = EmbeddingModel::zeros(c);
    m.params.b2[21] = 1000.0;
    const Service s(m, named_registry(10));
    const auto r = s.handle("POST", "/api/v1/simulate/series", {},
                            R"({"lineup_a":[0,1,2,3,4],"lineup_b":[5,6,7,8,9],"sims":1})");
    CHECK(r.status == 422);
    CHECK(body_of(r)["code"] == "degenerate_model");
  }

  TEST_CASE("optimize fifth") {
    const std::string req =
        R"({"fixed_four":[0,1,2,3],"opponent":[5,6,7,8,9],"candidates":[10,11,4],"sims":40,"possessions":30,"seed":2})";
    const auto r = post("/api/v1/optimize/fifth", req);
    REQUIRE(r.status == 200);
    const auto j = body_of(r);
    FifthManQuery q;
    q.fixed_four = {0, 1, 2, 3};
    q.opponent = {5, 6, 7, 8, 9};
    q.candidates = {10, 11, 4};
    q.sims = 40;
    q.possessions = 30;
    q.seed = 2;
    const auto rows = rank_fifth_man(service().model(), q);
    REQUIRE(j["rows"].size() == 3);
    for (std::size_t k = 0; k < 3; ++k) {
      CHECK(j["rows"][k]["candidate"] == rows[k].candidate);
      CHECK(j["rows"][k]["win_fraction"].get<double>() == rows[k].win_fraction);
    }
    CHECK(post("/api/v1/optimize/fifth", req).body == r.body);
    CHECK(post("/api/v1/optimize/fifth", R"({"fixed_four":[0,1,2],"opponent":[5,6,7,8,9],"candidates":[10]})").status ==
          422);
    CHECK(post("/api/v1/optimize/fifth", R"({"fixed_four":[0,1,2,3],"opponent":[5,6,7,8,9],"candidates":[]})").status ==
          422);
    CHECK(post("/api/v1/optimize/fifth", R"({"fixed_four":[0,1,2,3],"opponent":[5,6,7,8,9],"candidates":[5]})").status ==
          422);
  }

  TEST_CASE("registry must match the model") {
    CHECK_THROWS_AS(Service(testing::random_model(12, 2, 2, 1), named_registry(11)), courtvec::Error);
  }

  TEST_CASE("http bridge") {
    httplib::Server server;
    server.Get(".*", [](const httplib::Request& req, httplib::Response& res) {
      const auto out = service().handle(req.method, req.path, QueryParams(req.params.begin(), req.params.end()), req.body);
      res.status = out.status;
      res.set_content(out.body, "application/json");
    });
    const int port = server.bind_to_any_port("127.0.0.1");
    std::thread t([&] { server.listen_after_bind(); });
    server.wait_until_ready();
    httplib::Client client("127.0.0.1", port);
    const auto res = client.Get("/api/v1/players?q=center%201");
    server.stop();
    t.join();
    REQUIRE(res);
    CHECK(res->status == 200);
    CHECK(res->body == get("/api/v1/players", {{"q", "center 1"}}).body);
  }
}
