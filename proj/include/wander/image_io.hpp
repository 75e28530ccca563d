#pragma once

#include <cstdint>
#include <filesystem>

#include "wander/pano.hpp"

namespace wander {

struct PngInfo {
  int width = 0;
  int height = 0;
  int channels = 0;
  int bit_depth = 0;
};

/// 16-bit grayscale (depth in millimeters, labels).
void write_png(const std::filesystem::path& path, const Image<std::uint16_t>& img);
/// 8-bit grayscale or RGB by channel count.
void write_png(const std::filesystem::path& path, const Image<std::uint8_t>& img);

PngInfo read_png_info(const std::filesystem::path& path);
/// Throws IoError, ParseError (wrong bit depth).
Image<std::uint16_t> read_png16(const std::filesystem::path& path);
Image<std::uint8_t> read_png8(const std::filesystem::path& path);

/// In-memory encoding; write_png stores exactly these bytes.
std::string encode_png(const Image<std::uint16_t>& img);
std::string encode_png(const Image<std::uint8_t>& img);

}  // namespace wander
