#include "hypercone/io/dump.hpp"

#include <cmath>
#include <sstream>

#include "hypercone/errors.hpp"
#include "hypercone/io/binary.hpp"

namespace hypercone::io {

using analysis::EmbeddingIndex;
using analysis::Space;

std::filesystem::path labels_path(const std::filesystem::path& dump) {
  std::filesystem::path p = dump;
  return p.replace_extension(".labels");
}

std::vector<std::uint8_t> encode_dump(const EmbeddingIndex& index) {
  if (index.rows.rows() != index.labels.size()) throw ValidationError("label count does not match row count");
  ByteWriter w;
  w.bytes({kDumpMagic, 4});
  w.u32(kDumpVersion);
  w.u8(static_cast<std::uint8_t>(index.space));
  w.u32(static_cast<std::uint32_t>(index.dim()));
  w.u64(index.size());
  w.f64(index.curvature);
  for (double v : index.rows.data()) w.f32(static_cast<float>(v));
  return w.buffer();
}

EmbeddingIndex decode_dump(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  if (r.bytes(4, "header") != std::string_view(kDumpMagic, 4)) throw FormatError("bad magic", 0);
  const std::size_t version_at = r.offset();
  if (r.u32("header") != kDumpVersion) throw FormatError("unsupported version", version_at);
  const std::size_t space_at = r.offset();
  const std::uint8_t space = r.u8("header");
  if (space > 1) throw FormatError("unknown space tag", space_at);
  const std::uint32_t dim = r.u32("header");
  const std::size_t count_at = r.offset();
  const std::uint64_t count = r.u64("header");
  const std::size_t curv_at = r.offset();
  const double curvature = r.f64("header");

  EmbeddingIndex index;
  index.space = static_cast<Space>(space);
  if (index.space == Space::Lorentz) {
    if (!std::isfinite(curvature) || !(curvature > 0.0)) throw FormatError("invalid curvature", curv_at);
    index.curvature = curvature;
  }
  if (dim == 0 && count > 0) throw FormatError("zero dimension with nonzero count", count_at);
  const std::uint64_t row_bytes = static_cast<std::uint64_t>(dim) * 4;
  if (row_bytes > 0 && count > r.remaining() / row_bytes) throw FormatError("truncated payload", bytes.size());
  if (count * row_bytes < r.remaining()) throw FormatError("trailing bytes", kDumpHeaderSize + count * row_bytes);
  index.rows = Matrix(count, dim);
  for (double& v : index.rows.data()) v = static_cast<double>(r.f32("payload"));
  return index;
}

void write_dump(const std::filesystem::path& path, const EmbeddingIndex& index) {
  const auto bytes = encode_dump(index);
  std::string labels;
  for (const auto& l : index.labels) labels += analysis::format_label(l) + "\n";
  write_file_atomic(path, bytes);
  write_file_atomic(labels_path(path), labels);
}

EmbeddingIndex read_dump(const std::filesystem::path& path) {
  EmbeddingIndex index = decode_dump(read_file(path));
  const auto raw = read_file(labels_path(path));
  std::istringstream in(std::string(raw.begin(), raw.end()));
  std::string line;
  while (std::getline(in, line)) index.labels.push_back(analysis::parse_label(line));
  if (index.labels.size() != index.size()) {
    throw ValidationError("label sidecar has " + std::to_string(index.labels.size()) + " lines for " +
                          std::to_string(index.size()) + " rows");
  }
  index.validate();
  return index;
}

}  // namespace hypercone::io
