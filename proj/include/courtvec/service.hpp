#pragma once

#include "courtvec/ingest.hpp"
#include "courtvec/model.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <string_view>

namespace courtvec {

struct HttpResponse {
  int status = 200;
  std::string body;  // always JSON
};

using QueryParams = std::multimap<std::string, std::string>;

/// Read-only JSON API over one loaded model and its registry. `handle` is pure, so
/// it can be tested without a socket and called concurrently.
class Service {
 public:
  Service(EmbeddingModel model, PlayerRegistry registry, std::size_t threads = 1);

  HttpResponse handle(std::string_view method, std::string_view path, const QueryParams& query,
                      std::string_view body) const;

  const EmbeddingModel& model() const { return model_; }
  const PlayerRegistry& registry() const { return registry_; }

 private:
  EmbeddingModel model_;
  PlayerRegistry registry_;
  std::size_t threads_;
  std::uint32_t crc_;
};

/// Largest `sims` a single request may ask for.
inline constexpr std::size_t kMaxRequestSims = 100000;

/// Blocks serving `service` on host:port until the process is stopped.
void serve_http(const Service& service, const std::string& host, int port);

}  // namespace courtvec
