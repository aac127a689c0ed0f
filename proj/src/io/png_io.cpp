#include <cstdio>
#include <csetjmp>

#include <png.h>

#include "artic/error.hpp"
#include "artic/io.hpp"

namespace artic {

namespace {

struct FileHandle {
  std::FILE* f = nullptr;
  explicit FileHandle(const std::string& path, const char* mode) : f(std::fopen(path.c_str(), mode)) {}
  ~FileHandle() {
    if (f) std::fclose(f);
  }
};

/// Shared libpng plumbing. Rows are packed by the caller; 16-bit channels
/// are written big-endian, PNG's native order, so files are identical
/// across hosts.
void write_png(const std::string& path, int width, int height, int bit_depth,
               int color_type, const std::vector<std::vector<png_byte>>& rows) {
  FileHandle fh(path, "wb");
  if (!fh.f) throw IoError("cannot open for writing: " + path);
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    throw IoError("libpng initialization failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("png write failed: " + path);
  }
  png_init_io(png, fh.f);
  png_set_IHDR(png, info, png_uint_32(width), png_uint_32(height), bit_depth, color_type,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (const auto& row : rows) png_write_row(png, const_cast<png_bytep>(row.data()));
  png_write_end(png, info);
  png_destroy_write_struct(&png, &info);
}

struct PngImage {
  int width = 0, height = 0, bit_depth = 0, color_type = 0;
  std::vector<std::vector<png_byte>> rows;
};

PngImage read_png(const std::string& path) {
  FileHandle fh(path, "rb");
  if (!fh.f) throw IoError("cannot open: " + path);
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("libpng initialization failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("png read failed: " + path);
  }
  png_init_io(png, fh.f);
  png_read_info(png, info);
  PngImage out;
  out.width = int(png_get_image_width(png, info));
  out.height = int(png_get_image_height(png, info));
  out.bit_depth = int(png_get_bit_depth(png, info));
  out.color_type = int(png_get_color_type(png, info));
  out.rows.assign(std::size_t(out.height),
                  std::vector<png_byte>(png_get_rowbytes(png, info)));
  for (auto& row : out.rows) png_read_row(png, row.data(), nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return out;
}

}  // namespace

void write_png_rgb(const std::string& path, const Image<Rgb8>& img) {
  if (img.width <= 0 || img.height <= 0) throw IoError("png: empty image: " + path);
  std::vector<std::vector<png_byte>> rows(std::size_t(img.height));
  for (int y = 0; y < img.height; ++y) {
    auto& row = rows[std::size_t(y)];
    row.resize(std::size_t(img.width) * 3);
    for (int x = 0; x < img.width; ++x) {
      const Rgb8& c = img.at(x, y);
      row[std::size_t(x) * 3] = c.r;
      row[std::size_t(x) * 3 + 1] = c.g;
      row[std::size_t(x) * 3 + 2] = c.b;
    }
  }
  write_png(path, img.width, img.height, 8, PNG_COLOR_TYPE_RGB, rows);
}

Image<Rgb8> read_png_rgb(const std::string& path) {
  PngImage p = read_png(path);
  if (p.bit_depth != 8 || p.color_type != PNG_COLOR_TYPE_RGB)
    throw IoError("png: expected 8-bit RGB: " + path);
  Image<Rgb8> img(p.width, p.height);
  for (int y = 0; y < p.height; ++y)
    for (int x = 0; x < p.width; ++x) {
      const png_byte* px = &p.rows[std::size_t(y)][std::size_t(x) * 3];
      img.at(x, y) = Rgb8{px[0], px[1], px[2]};
    }
  return img;
}

void write_png_mask(const std::string& path, const Image<std::uint16_t>& img) {
  if (img.width <= 0 || img.height <= 0) throw IoError("png: empty image: " + path);
  std::vector<std::vector<png_byte>> rows(std::size_t(img.height));
  for (int y = 0; y < img.height; ++y) {
    auto& row = rows[std::size_t(y)];
    row.resize(std::size_t(img.width) * 2);
    for (int x = 0; x < img.width; ++x) {
      std::uint16_t v = img.at(x, y);
      row[std::size_t(x) * 2] = png_byte(v >> 8);
      row[std::size_t(x) * 2 + 1] = png_byte(v & 0xff);
    }
  }
  write_png(path, img.width, img.height, 16, PNG_COLOR_TYPE_GRAY, rows);
}

Image<std::uint16_t> read_png_mask(const std::string& path) {
  PngImage p = read_png(path);
  if (p.bit_depth != 16 || p.color_type != PNG_COLOR_TYPE_GRAY)
    throw IoError("png: expected 16-bit grayscale: " + path);
  Image<std::uint16_t> img(p.width, p.height);
  for (int y = 0; y < p.height; ++y)
    for (int x = 0; x < p.width; ++x) {
      const png_byte* px = &p.rows[std::size_t(y)][std::size_t(x) * 2];
      img.at(x, y) = std::uint16_t((px[0] << 8) | px[1]);
    }
  return img;
}

}  // namespace artic
