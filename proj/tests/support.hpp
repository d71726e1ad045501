#pragma once

#include "courtvec/model.hpp"
#include "courtvec/rng.hpp"

#include <algorithm>
#include <unistd.h>

#include <filesystem>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

namespace testing {

using namespace courtvec;

inline std::pair<Lineup, Lineup> random_matchup(std::size_t v, Engine& eng) {
  std::vector<PlayerId> ids(v);
  std::iota(ids.begin(), ids.end(), PlayerId{0});
  for (std::size_t k = 0; k < 10; ++k) std::swap(ids[k], ids[k + uniform_index(eng, v - k)]);
  Lineup a{}, b{};
  std::copy_n(ids.begin(), 5, a.begin());
  std::copy_n(ids.begin() + 5, 5, b.begin());
  return {a, b};
}

inline EmbeddingModel random_model(std::size_t v, std::size_t h, std::size_t i, std::uint64_t seed,
                                   double scale = 1.0) {
  ModelConfig c;
  c.vocab = v;
  c.embed_dim = h;
  c.hidden = i;
  auto m = EmbeddingModel::zeros(c);
  auto eng = make_engine(seed);
  m.params.for_each_tensor([&](std::vector<double>& t) {
    for (auto& x : t) x = scale * (2.0 * uniform01(eng) - 1.0);
  });
  return m;
}

inline std::vector<Play> random_plays(std::size_t v, std::size_t n, std::uint64_t seed) {
  auto eng = make_engine(seed);
  std::vector<Play> plays;
  for (std::size_t k = 0; k < n; ++k) {
    auto [a, b] = random_matchup(v, eng);
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    plays.push_back(Play{"g" + std::to_string(k / 10), k % 10, a, b, static_cast<int>(uniform_index(eng, 23))});
  }
  return plays;
}

/// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    path_ = std::filesystem::temp_directory_path() / ("courtvec-test-" + tag + "-" + std::to_string(::getpid()));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  std::string file(const std::string& name) const { return (path_ / name).string(); }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace testing
