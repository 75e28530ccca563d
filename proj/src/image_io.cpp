#include "wander/image_io.hpp"

#include <cstring>

#include <png.h>

#include "wander/errors.hpp"
#include "wander/io.hpp"

namespace wander {

namespace {

void on_png_error(png_structp png, png_const_charp msg) {
  auto* err = static_cast<std::string*>(png_get_error_ptr(png));
  if (err) *err = msg;
  png_longjmp(png, 1);
}

void on_png_warning(png_structp, png_const_charp) {}

int color_type_for(int channels) {
  switch (channels) {
    case 1: return PNG_COLOR_TYPE_GRAY;
    case 3: return PNG_COLOR_TYPE_RGB;
    case 4: return PNG_COLOR_TYPE_RGBA;
  }
  throw std::invalid_argument("PNG supports 1, 3 or 4 channels");
}

// Rows are given big-endian as PNG requires.
std::string encode(int width, int height, int channels, int bit_depth, const std::vector<png_byte>& rows) {
  std::string out;
  std::string err;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &err, on_png_error, on_png_warning);
  if (!png) throw IoError("png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info || setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("PNG encode: " + err);
  }
  png_set_write_fn(
      png, &out,
      [](png_structp p, png_bytep data, png_size_t len) {
        static_cast<std::string*>(png_get_io_ptr(p))->append(reinterpret_cast<const char*>(data), len);
      },
      nullptr);
  png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), bit_depth,
               color_type_for(channels), PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  const std::size_t stride = static_cast<std::size_t>(width) * channels * (bit_depth / 8);
  for (int y = 0; y < height; ++y) {
    png_write_row(png, const_cast<png_bytep>(rows.data() + stride * static_cast<std::size_t>(y)));
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return out;
}

struct Decoded {
  PngInfo info;
  std::vector<png_byte> rows;
};

Decoded decode(const std::filesystem::path& path, bool header_only) {
  const std::string bytes = read_text_file(path);
  if (bytes.size() < 8 || png_sig_cmp(reinterpret_cast<png_const_bytep>(bytes.data()), 0, 8) != 0) {
    throw ParseError(path.string() + " is not a PNG file");
  }
  struct Reader {
    const std::string* data;
    std::size_t pos;
  } reader{&bytes, 0};
  std::string err;
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &err, on_png_error, on_png_warning);
  if (!png) throw IoError("png_create_read_struct failed");
  png_infop info = png_create_info_struct(png);
  Decoded out;
  if (!info || setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw ParseError(path.string() + ": " + err);
  }
  png_set_read_fn(png, &reader, [](png_structp p, png_bytep data, png_size_t len) {
    auto* r = static_cast<Reader*>(png_get_io_ptr(p));
    if (r->pos + len > r->data->size()) png_error(p, "truncated PNG");
    std::memcpy(data, r->data->data() + r->pos, len);
    r->pos += len;
  });
  png_read_info(png, info);
  out.info.width = static_cast<int>(png_get_image_width(png, info));
  out.info.height = static_cast<int>(png_get_image_height(png, info));
  out.info.bit_depth = png_get_bit_depth(png, info);
  out.info.channels = png_get_channels(png, info);
  const int color = png_get_color_type(png, info);
  if (color == PNG_COLOR_TYPE_PALETTE || out.info.bit_depth < 8) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw ParseError(path.string() + ": palette and sub-byte PNGs are not supported");
  }
  if (!header_only) {
    const std::size_t stride = png_get_rowbytes(png, info);
    out.rows.resize(stride * static_cast<std::size_t>(out.info.height));
    for (int y = 0; y < out.info.height; ++y) png_read_row(png, out.rows.data() + stride * static_cast<std::size_t>(y), nullptr);
    png_read_end(png, nullptr);
  }
  png_destroy_read_struct(&png, &info, nullptr);
  return out;
}

}  // namespace

std::string encode_png(const Image<std::uint16_t>& img) {
  std::vector<png_byte> rows(img.data().size() * 2);
  for (std::size_t i = 0; i < img.data().size(); ++i) {
    rows[2 * i] = static_cast<png_byte>(img.data()[i] >> 8);
    rows[2 * i + 1] = static_cast<png_byte>(img.data()[i] & 0xff);
  }
  return encode(img.width(), img.height(), img.channels(), 16, rows);
}

std::string encode_png(const Image<std::uint8_t>& img) {
  return encode(img.width(), img.height(), img.channels(), 8, img.data());
}

void write_png(const std::filesystem::path& path, const Image<std::uint16_t>& img) {
  write_file_atomic(path, encode_png(img));
}

void write_png(const std::filesystem::path& path, const Image<std::uint8_t>& img) {
  write_file_atomic(path, encode_png(img));
}

PngInfo read_png_info(const std::filesystem::path& path) { return decode(path, true).info; }

Image<std::uint16_t> read_png16(const std::filesystem::path& path) {
  const Decoded d = decode(path, false);
  if (d.info.bit_depth != 16) throw ParseError(path.string() + ": expected a 16-bit PNG");
  Image<std::uint16_t> img(d.info.width, d.info.height, d.info.channels);
  for (std::size_t i = 0; i < img.data().size(); ++i) {
    img.data()[i] = static_cast<std::uint16_t>((d.rows[2 * i] << 8) | d.rows[2 * i + 1]);
  }
  return img;
}

Image<std::uint8_t> read_png8(const std::filesystem::path& path) {
  Decoded d = decode(path, false);
  if (d.info.bit_depth != 8) throw ParseError(path.string() + ": expected an 8-bit PNG");
  Image<std::uint8_t> img(d.info.width, d.info.height, d.info.channels);
  img.data() = std::move(d.rows);
  return img;
}

}  // namespace wander
