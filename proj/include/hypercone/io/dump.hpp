#pragma once

// Embedding dump: a 29-byte header ("HYPB", version u32, space u8, dim u32,
// count u64, curvature f64), count*dim little-endian f32 values, and a
// sidecar "<stem>.labels" file with one "class<TAB>text" line per row.

#include <cstdint>
#include <filesystem>

#include "hypercone/analysis/index.hpp"

namespace hypercone::io {

inline constexpr char kDumpMagic[4] = {'H', 'Y', 'P', 'B'};
inline constexpr std::uint32_t kDumpVersion = 1;
inline constexpr std::size_t kDumpHeaderSize = 29;

std::filesystem::path labels_path(const std::filesystem::path& dump);

/// Values are rounded to f32 on write.
std::vector<std::uint8_t> encode_dump(const analysis::EmbeddingIndex& index);
analysis::EmbeddingIndex decode_dump(std::span<const std::uint8_t> bytes);

void write_dump(const std::filesystem::path& path, const analysis::EmbeddingIndex& index);

/// Throws FormatError for header or payload problems and ValidationError for
/// a label sidecar that does not match the row count.
analysis::EmbeddingIndex read_dump(const std::filesystem::path& path);

}  // namespace hypercone::io
