#pragma once

#include "courtvec/model.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>

namespace courtvec {

inline constexpr std::uint32_t kCheckpointVersion = 1;

// Layout: "CVEC", u32 version, u32 v/h/n/i/o, then embeddings, w1, b1, w2, b2 as
// little-endian f64 row-major, then the CRC-32 of every preceding byte.
std::string encode_checkpoint(const EmbeddingModel& model);
EmbeddingModel decode_checkpoint(std::string_view bytes);

void save_checkpoint(const EmbeddingModel& model, std::ostream& out);
EmbeddingModel load_checkpoint(std::istream& in);

EmbeddingModel load_checkpoint_file(const std::filesystem::path& path);

/// CRC-32 stored in the checkpoint trailer for this model.
std::uint32_t checkpoint_crc(const EmbeddingModel& model);

}  // namespace courtvec
