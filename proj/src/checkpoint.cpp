#include "courtvec/checkpoint.hpp"

#include "courtvec/error.hpp"

#include <zlib.h>

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <iterator>
#include <ostream>

namespace courtvec {

namespace {

constexpr char kMagic[4] = {'C', 'V', 'E', 'C'};
constexpr std::size_t kHeaderBytes = 4 + 6 * 4;

template <typename T>
void put_le(std::string& out, T value) {
  using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
  const auto bits = std::bit_cast<U>(value);
  for (std::size_t k = 0; k < sizeof(T); ++k) {
    out.push_back(static_cast<char>((bits >> (8 * k)) & 0xFF));
  }
}

template <typename T>
T get_le(std::string_view bytes, std::size_t offset) {
  using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
  U bits = 0;
  for (std::size_t k = 0; k < sizeof(T); ++k) {
    bits |= static_cast<U>(static_cast<unsigned char>(bytes[offset + k])) << (8 * k);
  }
  return std::bit_cast<T>(bits);
}

std::uint32_t crc32_of(std::string_view bytes) {
  uLong crc = crc32(0L, Z_NULL, 0);
  crc = crc32(crc, reinterpret_cast<const Bytef*>(bytes.data()), static_cast<uInt>(bytes.size()));
  return static_cast<std::uint32_t>(crc);
}

[[noreturn]] void fail(const std::string& what) { throw Error(ErrorKind::checkpoint, what); }

}  // namespace

std::string encode_checkpoint(const EmbeddingModel& model) {
  model.validate();
  const auto& c = model.config;
  std::string out(kMagic, 4);
  put_le<std::uint32_t>(out, kCheckpointVersion);
  for (std::size_t dim : {c.vocab, c.embed_dim, c.players_per_side, c.hidden, c.outcomes}) {
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(dim));
  }
  model.params.for_each_tensor([&out](const std::vector<double>& t) {
    for (double x : t) put_le<double>(out, x);
  });
  put_le<std::uint32_t>(out, crc32_of(out));
  return out;
}

EmbeddingModel decode_checkpoint(std::string_view bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) fail("missing CVEC magic");
  if (bytes.size() < kHeaderBytes) fail("truncated checkpoint header");
  const auto version = get_le<std::uint32_t>(bytes, 4);
  if (version != kCheckpointVersion) {
    fail("unsupported checkpoint version " + std::to_string(version));
  }
  ModelConfig c;
  c.vocab = get_le<std::uint32_t>(bytes, 8);
  c.embed_dim = get_le<std::uint32_t>(bytes, 12);
  c.players_per_side = get_le<std::uint32_t>(bytes, 16);
  c.hidden = get_le<std::uint32_t>(bytes, 20);
  c.outcomes = get_le<std::uint32_t>(bytes, 24);
  try {
    c.validate();
  } catch (const Error& e) {
    fail(std::string("bad dimensions: ") + e.what());
  }

  const std::size_t count = c.vocab * c.embed_dim + c.input_dim() * c.hidden + c.hidden +
                            c.hidden * c.outcomes + c.outcomes;
  const std::size_t expected = kHeaderBytes + count * 8 + 4;
  if (bytes.size() < expected) {
    fail("truncated checkpoint: " + std::to_string(bytes.size()) + " bytes, dimensions need " +
         std::to_string(expected));
  }
  if (bytes.size() > expected) fail("trailing bytes after checkpoint payload");

  auto model = EmbeddingModel::zeros(c);
  std::size_t offset = kHeaderBytes;
  model.params.for_each_tensor([&](std::vector<double>& t) {
    for (auto& x : t) {
      x = get_le<double>(bytes, offset);
      offset += 8;
    }
  });
  const auto stored = get_le<std::uint32_t>(bytes, offset);
  if (stored != crc32_of(bytes.substr(0, offset))) fail("checkpoint CRC mismatch");
  try {
    model.validate();
  } catch (const Error& e) {
    fail(e.what());
  }
  return model;
}

void save_checkpoint(const EmbeddingModel& model, std::ostream& out) {
  const auto bytes = encode_checkpoint(model);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorKind::io, "failed writing checkpoint");
}

EmbeddingModel load_checkpoint(std::istream& in) {
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_checkpoint(bytes);
}

EmbeddingModel load_checkpoint_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot open checkpoint " + path.string());
  return load_checkpoint(in);
}

std::uint32_t checkpoint_crc(const EmbeddingModel& model) {
  const auto bytes = encode_checkpoint(model);
  return get_le<std::uint32_t>(bytes, bytes.size() - 4);
}

}  // namespace courtvec
