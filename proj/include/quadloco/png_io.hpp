#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <optional>
#include <string>
#include <vector>

#include <png.h>

#include "json.hpp"
#include "quadloco/heightfield.hpp"

namespace quadloco {

namespace detail {

struct PngWriteBuffer {
  std::vector<std::uint8_t> bytes;
};

inline void pngWriteCallback(png_structp png, png_bytep data, png_size_t length) {
  auto* buffer = static_cast<PngWriteBuffer*>(png_get_io_ptr(png));
  buffer->bytes.insert(buffer->bytes.end(), data, data + length);
}

struct PngReadCursor {
  const std::uint8_t* data;
  std::size_t size;
  std::size_t offset;
};

inline void pngReadCallback(png_structp png, png_bytep out, png_size_t length) {
  auto* cursor = static_cast<PngReadCursor*>(png_get_io_ptr(png));
  if (cursor->offset + length > cursor->size) png_error(png, "truncated PNG stream");
  std::memcpy(out, cursor->data + cursor->offset, length);
  cursor->offset += length;
}

[[noreturn]] inline void pngErrorCallback(png_structp, png_const_charp message) {
  throw IoError(std::string("PNG: ") + message);
}

inline void pngWarningCallback(png_structp, png_const_charp) {}

}  // namespace detail

/// Encodes the cell codes as a single-channel 16-bit grayscale PNG (row 0 first).
/// Metric metadata is not stored in the image; see the sidecar helpers below.
inline std::vector<std::uint8_t> encodePng(const Heightfield& hf) {
  require(hf.cells.size() == static_cast<std::size_t>(hf.rows) * hf.cols, "heightfield cell count mismatch");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, detail::pngErrorCallback,
                                            detail::pngWarningCallback);
  if (!png) throw IoError("PNG: cannot create write struct");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw IoError("PNG: cannot create info struct");
  }

  detail::PngWriteBuffer buffer;
  std::vector<std::uint8_t> row(static_cast<std::size_t>(hf.cols) * 2);
  try {
    png_set_write_fn(png, &buffer, detail::pngWriteCallback, nullptr);
    png_set_IHDR(png, info, static_cast<png_uint_32>(hf.cols), static_cast<png_uint_32>(hf.rows), 16,
                 PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_set_compression_level(png, 6);
    png_write_info(png, info);
    for (int r = 0; r < hf.rows; ++r) {
      for (int c = 0; c < hf.cols; ++c) {
        const std::uint16_t v = hf.at(r, c);
        row[2 * c] = static_cast<std::uint8_t>(v >> 8);  // PNG samples are big-endian
        row[2 * c + 1] = static_cast<std::uint8_t>(v & 0xFF);
      }
      png_write_row(png, row.data());
    }
    png_write_end(png, nullptr);
  } catch (...) {
    png_destroy_write_struct(&png, &info);
    throw;
  }
  png_destroy_write_struct(&png, &info);
  return buffer.bytes;
}

struct PngGeometry {
  double resolution = kGridResolution;
  double z_scale = kDefaultZScale;
  Vec2 origin = Vec2::Zero();
};

/// Decodes a 16-bit single-channel PNG. When `expected_rows`/`expected_cols` are given the
/// image must match them exactly.
inline Heightfield decodePng(const std::vector<std::uint8_t>& bytes, const PngGeometry& geometry = {},
                             std::optional<int> expected_rows = std::nullopt,
                             std::optional<int> expected_cols = std::nullopt) {
  if (bytes.size() < 8 || png_sig_cmp(bytes.data(), 0, 8) != 0) throw IoError("PNG: bad signature");
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, detail::pngErrorCallback,
                                           detail::pngWarningCallback);
  if (!png) throw IoError("PNG: cannot create read struct");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw IoError("PNG: cannot create info struct");
  }

  Heightfield hf;
  try {
    detail::PngReadCursor cursor{bytes.data(), bytes.size(), 0};
    png_set_read_fn(png, &cursor, detail::pngReadCallback);
    png_read_info(png, info);
    const auto width = png_get_image_width(png, info);
    const auto height = png_get_image_height(png, info);
    const int depth = png_get_bit_depth(png, info);
    const int color = png_get_color_type(png, info);
    if (depth != 16) throw IoError("PNG: expected 16-bit samples, found " + std::to_string(depth));
    if (color != PNG_COLOR_TYPE_GRAY) throw IoError("PNG: expected a single grayscale channel");
    if (png_get_interlace_type(png, info) != PNG_INTERLACE_NONE) throw IoError("PNG: interlaced images unsupported");
    if ((expected_rows && static_cast<int>(height) != *expected_rows) ||
        (expected_cols && static_cast<int>(width) != *expected_cols))
      throw IoError("PNG: dimension mismatch");

    hf = Heightfield(static_cast<int>(height), static_cast<int>(width), geometry.resolution, geometry.z_scale,
                     geometry.origin);
    std::vector<std::uint8_t> row(static_cast<std::size_t>(width) * 2);
    for (int r = 0; r < hf.rows; ++r) {
      png_read_row(png, row.data(), nullptr);
      for (int c = 0; c < hf.cols; ++c)
        hf.at(r, c) = static_cast<std::uint16_t>((row[2 * c] << 8) | row[2 * c + 1]);
    }
    png_read_end(png, nullptr);
  } catch (...) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw;
  }
  png_destroy_read_struct(&png, &info, nullptr);
  return hf;
}

// ─── Sidecar: {"resolution", "z_scale", "origin": [x, y]} ───────────────────

inline nlohmann::json sidecarJson(const Heightfield& hf) {
  return {{"resolution", hf.resolution}, {"z_scale", hf.z_scale}, {"origin", {hf.origin.x(), hf.origin.y()}}};
}

inline PngGeometry geometryFromSidecar(const nlohmann::json& j) {
  try {
    PngGeometry g;
    g.resolution = j.at("resolution").get<double>();
    g.z_scale = j.at("z_scale").get<double>();
    g.origin = Vec2(j.at("origin").at(0).get<double>(), j.at("origin").at(1).get<double>());
    require(g.resolution > 0.0 && g.z_scale > 0.0, "sidecar resolution and z_scale must be positive");
    return g;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("malformed heightfield sidecar: ") + e.what());
  }
}

inline std::vector<std::uint8_t> readBinaryFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void writeBinaryFile(const std::string& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for " + path);
}

/// Writes `<path>` (PNG) and `<path>.json` (sidecar).
inline void saveHeightfield(const Heightfield& hf, const std::string& png_path) {
  writeBinaryFile(png_path, encodePng(hf));
  const std::string text = sidecarJson(hf).dump(2) + "\n";
  writeBinaryFile(png_path + ".json", std::vector<std::uint8_t>(text.begin(), text.end()));
}

inline Heightfield loadHeightfield(const std::string& png_path) {
  PngGeometry geometry;
  std::ifstream sidecar(png_path + ".json");
  if (sidecar) {
    nlohmann::json j;
    try {
      sidecar >> j;
    } catch (const nlohmann::json::exception& e) {
      throw IoError(std::string("malformed heightfield sidecar: ") + e.what());
    }
    geometry = geometryFromSidecar(j);
  } else {
    // Without a sidecar, assume the 0.02 m grid centred on the world origin.
    const auto bytes = readBinaryFile(png_path);
    Heightfield probe = decodePng(bytes, geometry);
    probe.origin = Vec2(-0.5 * (probe.cols - 1) * probe.resolution, -0.5 * (probe.rows - 1) * probe.resolution);
    return probe;
  }
  return decodePng(readBinaryFile(png_path), geometry);
}

}  // namespace quadloco
