#include <zlib.h>

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "adaopt/erm.hpp"
#include "adaopt/errors.hpp"

namespace adaopt::erm {

namespace {

constexpr std::uint32_t kImageMagic = 0x00000803;
constexpr std::uint32_t kLabelMagic = 0x00000801;

std::uint32_t read_be32(const std::vector<std::uint8_t>& bytes,
                        std::size_t offset, const char* what) {
  if (offset + 4 > bytes.size())
    throw FormatError(std::string("load_idx: stream truncated reading ") +
                      what + " at byte offset " + std::to_string(offset));
  return (static_cast<std::uint32_t>(bytes[offset]) << 24) |
         (static_cast<std::uint32_t>(bytes[offset + 1]) << 16) |
         (static_cast<std::uint32_t>(bytes[offset + 2]) << 8) |
         static_cast<std::uint32_t>(bytes[offset + 3]);
}

std::vector<std::uint8_t> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::vector<std::uint8_t> bytes(
      (std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failure on " + path);
  return bytes;
}

}  // namespace

std::vector<std::uint8_t> maybe_gunzip(std::vector<std::uint8_t> bytes) {
  if (bytes.size() < 2 || bytes[0] != 0x1f || bytes[1] != 0x8b)
    return bytes;
  z_stream strm{};
  // 16 + MAX_WBITS selects gzip framing.
  if (inflateInit2(&strm, 16 + MAX_WBITS) != Z_OK)
    throw FormatError("maybe_gunzip: zlib initialization failed");
  std::vector<std::uint8_t> out;
  std::uint8_t chunk[1 << 15];
  strm.next_in = bytes.data();
  strm.avail_in = static_cast<uInt>(bytes.size());
  int rc = Z_OK;
  while (rc != Z_STREAM_END) {
    strm.next_out = chunk;
    strm.avail_out = sizeof(chunk);
    rc = inflate(&strm, Z_NO_FLUSH);
    if (rc != Z_OK && rc != Z_STREAM_END) {
      inflateEnd(&strm);
      throw FormatError("maybe_gunzip: corrupt gzip stream (zlib code " +
                        std::to_string(rc) + ")");
    }
    out.insert(out.end(), chunk, chunk + (sizeof(chunk) - strm.avail_out));
  }
  inflateEnd(&strm);
  return out;
}

Dataset load_idx(const std::vector<std::uint8_t>& images_bytes,
                 const std::vector<std::uint8_t>& labels_bytes) {
  const std::uint32_t image_magic = read_be32(images_bytes, 0, "image magic");
  if (image_magic != kImageMagic)
    throw FormatError("load_idx: image magic 0x" + [&] {
      char buf[16];
      std::snprintf(buf, sizeof(buf), "%08x", image_magic);
      return std::string(buf);
    }() + " at byte offset 0, expected 0x00000803");
  const std::uint32_t n = read_be32(images_bytes, 4, "image count");
  const std::uint32_t rows = read_be32(images_bytes, 8, "row count");
  const std::uint32_t cols = read_be32(images_bytes, 12, "column count");
  const std::size_t p = static_cast<std::size_t>(rows) * cols;
  if (p == 0) throw FormatError("load_idx: zero-pixel images");
  const std::size_t need = 16 + static_cast<std::size_t>(n) * p;
  if (images_bytes.size() < need)
    throw FormatError("load_idx: image stream truncated at byte offset " +
                      std::to_string(images_bytes.size()) + ", need " +
                      std::to_string(need));

  const std::uint32_t label_magic = read_be32(labels_bytes, 0, "label magic");
  if (label_magic != kLabelMagic)
    throw FormatError("load_idx: label magic mismatch at byte offset 0, "
                      "expected 0x00000801");
  const std::uint32_t label_n = read_be32(labels_bytes, 4, "label count");
  if (label_n != n)
    throw FormatError("load_idx: " + std::to_string(n) + " images but " +
                      std::to_string(label_n) + " labels");
  if (labels_bytes.size() < 8 + static_cast<std::size_t>(n))
    throw FormatError("load_idx: label stream truncated at byte offset " +
                      std::to_string(labels_bytes.size()));
  if (n == 0) throw FormatError("load_idx: empty dataset");

  RealVec features(static_cast<std::size_t>(n) * p);
  for (std::size_t i = 0; i < features.size(); ++i)
    features[i] = static_cast<double>(images_bytes[16 + i]) / 255.0;
  std::vector<std::int32_t> labels(n);
  std::int32_t max_label = 0;
  for (std::size_t i = 0; i < n; ++i) {
    labels[i] = static_cast<std::int32_t>(labels_bytes[8 + i]);
    max_label = std::max(max_label, labels[i]);
  }
  return make_dataset(n, p, static_cast<std::size_t>(max_label) + 1,
                      std::move(features), std::move(labels));
}

Dataset load_idx_files(const std::string& images_path,
                       const std::string& labels_path) {
  return load_idx(maybe_gunzip(read_file(images_path)),
                  maybe_gunzip(read_file(labels_path)));
}

}  // namespace adaopt::erm
