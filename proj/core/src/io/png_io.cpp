#include "streetforge/io/png_io.hpp"

#include <cmath>
#include <cstdio>
#include <memory>

#include <png.h>

namespace streetforge {

namespace {

struct FileCloser {
  void operator()(FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<FILE, FileCloser>;

void write_png_bytes(const std::string& path, int width, int height,
                     int color_type, const std::vector<png_byte>& data,
                     const Palette* palette) {
  FilePtr file(std::fopen(path.c_str(), "wb"));
  require(file != nullptr, "cannot open for write: " + path);

  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr,
                                            nullptr, nullptr);
  require(png != nullptr, "png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info || setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw ValidationError("png write failed: " + path);
  }
  png_init_io(png, file.get());
  png_set_IHDR(png, info, width, height, 8, color_type, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);

  std::vector<png_color> plte;
  if (color_type == PNG_COLOR_TYPE_PALETTE) {
    for (const auto& c : palette->colors) {
      png_color entry;
      entry.red = static_cast<png_byte>(std::lround(c.x() * 255.0));
      entry.green = static_cast<png_byte>(std::lround(c.y() * 255.0));
      entry.blue = static_cast<png_byte>(std::lround(c.z() * 255.0));
      plte.push_back(entry);
    }
    png_set_PLTE(png, info, plte.data(), static_cast<int>(plte.size()));
  }
  png_write_info(png, info);

  const int stride = color_type == PNG_COLOR_TYPE_RGB ? 3 : 1;
  std::vector<png_bytep> rows(height);
  for (int y = 0; y < height; ++y)
    rows[y] = const_cast<png_bytep>(&data[static_cast<size_t>(y) * width * stride]);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

struct PngData {
  int width = 0, height = 0, channels = 0;
  std::vector<png_byte> bytes;  // raw indices for palette/gray, RGB otherwise
};

PngData read_png_bytes(const std::string& path, bool expand_to_rgb) {
  FilePtr file(std::fopen(path.c_str(), "rb"));
  require(file != nullptr, "cannot open: " + path);

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr,
                                           nullptr, nullptr);
  require(png != nullptr, "png_create_read_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info || setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw ValidationError("png read failed: " + path);
  }
  png_init_io(png, file.get());
  png_read_info(png, info);

  png_byte color_type = png_get_color_type(png, info);
  png_byte bit_depth = png_get_bit_depth(png, info);
  if (bit_depth == 16) png_set_strip_16(png);
  if (bit_depth < 8) png_set_packing(png);
  if (expand_to_rgb) {
    if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color_type == PNG_COLOR_TYPE_GRAY || color_type == PNG_COLOR_TYPE_GRAY_ALPHA)
      png_set_gray_to_rgb(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    png_set_strip_alpha(png);
  } else {
    require(color_type == PNG_COLOR_TYPE_GRAY || color_type == PNG_COLOR_TYPE_PALETTE,
            "expected a label PNG (gray or indexed): " + path);
  }
  png_read_update_info(png, info);

  PngData out;
  out.width = static_cast<int>(png_get_image_width(png, info));
  out.height = static_cast<int>(png_get_image_height(png, info));
  out.channels = static_cast<int>(png_get_channels(png, info));
  size_t rowbytes = png_get_rowbytes(png, info);
  out.bytes.resize(rowbytes * out.height);
  std::vector<png_bytep> rows(out.height);
  for (int y = 0; y < out.height; ++y) rows[y] = &out.bytes[rowbytes * y];
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return out;
}

}  // namespace

void write_png_rgb(const PseudoImage& img, const std::string& path) {
  std::vector<png_byte> bytes(img.values.size());
  for (size_t i = 0; i < img.values.size(); ++i) {
    double v = std::clamp(img.values[i], 0.0, 1.0);
    bytes[i] = static_cast<png_byte>(std::lround(v * 255.0));
  }
  write_png_bytes(path, img.width, img.height, PNG_COLOR_TYPE_RGB, bytes, nullptr);
}

PseudoImage read_png_rgb(const std::string& path) {
  PngData data = read_png_bytes(path, true);
  require(data.channels == 3, "expected 3-channel data: " + path);
  PseudoImage img(data.width, data.height);
  for (size_t i = 0; i < img.values.size(); ++i)
    img.values[i] = data.bytes[i] / 255.0;
  return img;
}

void write_png_labels(const SemanticMap& map, const std::string& path) {
  std::vector<png_byte> bytes(map.labels.size());
  for (size_t i = 0; i < map.labels.size(); ++i) {
    require(map.labels[i] >= 0 && map.labels[i] < 256, "label exceeds 8 bits");
    bytes[i] = static_cast<png_byte>(map.labels[i]);
  }
  write_png_bytes(path, map.width, map.height, PNG_COLOR_TYPE_GRAY, bytes, nullptr);
}

void write_png_indexed(const SemanticMap& map, const Palette& palette,
                       const std::string& path) {
  std::vector<png_byte> bytes(map.labels.size());
  for (size_t i = 0; i < map.labels.size(); ++i) {
    require(map.labels[i] >= 0 && map.labels[i] < palette.K(),
            "label out of palette");
    bytes[i] = static_cast<png_byte>(map.labels[i]);
  }
  write_png_bytes(path, map.width, map.height, PNG_COLOR_TYPE_PALETTE, bytes,
                  &palette);
}

SemanticMap read_png_labels(const std::string& path) {
  PngData data = read_png_bytes(path, false);
  require(data.channels == 1, "expected single-channel label data: " + path);
  SemanticMap map(data.width, data.height);
  for (size_t i = 0; i < map.labels.size(); ++i) map.labels[i] = data.bytes[i];
  return map;
}

}  // namespace streetforge
