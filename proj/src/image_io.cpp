// Copyright 2026 The camknob Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "camknob/image_io.hpp"

#include <png.h>

#include <cctype>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

namespace camknob {

namespace {

std::vector<std::uint8_t> slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ImageIoError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void dump(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ImageIoError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw ImageIoError("short write to " + path.string());
}

// PPM header tokens are whitespace separated and may carry '#' comments.
class PpmHeaderReader {
 public:
  explicit PpmHeaderReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::string token() {
    skip_space_and_comments();
    std::string out;
    while (pos_ < bytes_.size() && !std::isspace(bytes_[pos_])) out.push_back(static_cast<char>(bytes_[pos_++]));
    if (out.empty()) throw ImageIoError("truncated PPM header");
    return out;
  }

  int number() {
    const std::string t = token();
    for (char c : t) {
      if (!std::isdigit(static_cast<unsigned char>(c))) throw ImageIoError("bad PPM header field: " + t);
    }
    return std::stoi(t);
  }

  // Exactly one whitespace byte separates the header from the raster.
  std::size_t raster_offset() const { return pos_ + 1; }

 private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

struct PngReadState {
  std::span<const std::uint8_t> bytes;
  std::size_t pos = 0;
};

void png_read_from_span(png_structp png, png_bytep out, png_size_t len) {
  auto* st = static_cast<PngReadState*>(png_get_io_ptr(png));
  if (st->pos + len > st->bytes.size()) png_error(png, "truncated PNG stream");
  std::memcpy(out, st->bytes.data() + st->pos, len);
  st->pos += len;
}

void png_write_to_vector(png_structp png, png_bytep in, png_size_t len) {
  auto* out = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(png));
  out->insert(out->end(), in, in + len);
}

void png_flush_noop(png_structp) {}

[[noreturn]] void png_throw(png_structp, png_const_charp msg) { throw ImageIoError(std::string("libpng: ") + msg); }

void png_warn_silent(png_structp, png_const_charp) {}

}  // namespace

ImageBuffer read_ppm(const std::filesystem::path& path) {
  const std::vector<std::uint8_t> bytes = slurp(path);
  PpmHeaderReader header(bytes);
  if (header.token() != "P6") throw ImageIoError(path.string() + ": not a binary PPM (P6)");
  const int w = header.number();
  const int h = header.number();
  const int maxval = header.number();
  if (w <= 0 || h <= 0) throw ImageIoError(path.string() + ": empty PPM");
  if (maxval != 255) throw ImageIoError(path.string() + ": only 8-bit PPM is supported");
  const std::size_t offset = header.raster_offset();
  ImageBuffer img(w, h);
  if (bytes.size() < offset + img.data.size()) throw ImageIoError(path.string() + ": truncated PPM raster");
  std::memcpy(img.data.data(), bytes.data() + offset, img.data.size());
  img.tag = path.stem().string();
  return img;
}

void write_ppm(const ImageBuffer& img, const std::filesystem::path& path) {
  img.validate();
  const std::string header = "P6\n" + std::to_string(img.width) + " " + std::to_string(img.height) + "\n255\n";
  std::vector<std::uint8_t> bytes(header.begin(), header.end());
  bytes.insert(bytes.end(), img.data.begin(), img.data.end());
  dump(path, bytes);
}

ImageBuffer decode_png(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 8 || png_sig_cmp(bytes.data(), 0, 8) != 0) throw ImageIoError("not a PNG stream");
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, png_throw, png_warn_silent);
  if (png == nullptr) throw ImageIoError("png_create_read_struct failed");
  png_infop info = png_create_info_struct(png);
  PngReadState state{bytes, 0};
  ImageBuffer img;
  try {
    if (info == nullptr) throw ImageIoError("png_create_info_struct failed");
    png_set_read_fn(png, &state, png_read_from_span);
    png_read_info(png, info);
    const png_uint_32 w = png_get_image_width(png, info);
    const png_uint_32 h = png_get_image_height(png, info);
    const int color = png_get_color_type(png, info);
    const int depth = png_get_bit_depth(png, info);
    if (depth == 16) png_set_strip_16(png);
    if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    if (color == PNG_COLOR_TYPE_GRAY || color == PNG_COLOR_TYPE_GRAY_ALPHA) png_set_gray_to_rgb(png);
    png_set_strip_alpha(png);
    png_read_update_info(png, info);
    if (png_get_rowbytes(png, info) != static_cast<png_size_t>(w) * 3) {
      throw ImageIoError("unsupported PNG pixel layout");
    }
    img = ImageBuffer(static_cast<int>(w), static_cast<int>(h));
    std::vector<png_bytep> rows(h);
    for (png_uint_32 y = 0; y < h; ++y) rows[y] = img.data.data() + static_cast<std::size_t>(y) * w * 3;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
  } catch (...) {
    png_destroy_read_struct(&png, info ? &info : nullptr, nullptr);
    throw;
  }
  png_destroy_read_struct(&png, &info, nullptr);
  return img;
}

std::vector<std::uint8_t> encode_png(const ImageBuffer& img) {
  img.validate();
  std::vector<std::uint8_t> out;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, png_throw, png_warn_silent);
  if (png == nullptr) throw ImageIoError("png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  try {
    if (info == nullptr) throw ImageIoError("png_create_info_struct failed");
    png_set_write_fn(png, &out, png_write_to_vector, png_flush_noop);
    png_set_IHDR(png, info, static_cast<png_uint_32>(img.width), static_cast<png_uint_32>(img.height), 8,
                 PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_set_compression_level(png, 3);
    png_write_info(png, info);
    for (int y = 0; y < img.height; ++y) {
      png_write_row(png, const_cast<png_bytep>(img.px(0, y)));
    }
    png_write_end(png, nullptr);
  } catch (...) {
    png_destroy_write_struct(&png, info ? &info : nullptr);
    throw;
  }
  png_destroy_write_struct(&png, &info);
  return out;
}

ImageBuffer read_png(const std::filesystem::path& path) {
  ImageBuffer img = decode_png(slurp(path));
  img.tag = path.stem().string();
  return img;
}

void write_png(const ImageBuffer& img, const std::filesystem::path& path) { dump(path, encode_png(img)); }

ImageBuffer read_image(const std::filesystem::path& path) {
  const std::string ext = path.extension().string();
  if (ext == ".ppm") return read_ppm(path);
  if (ext == ".png") return read_png(path);
  throw ImageIoError("unsupported image extension: " + path.string());
}

void write_image(const ImageBuffer& img, const std::filesystem::path& path) {
  const std::string ext = path.extension().string();
  if (ext == ".ppm") return write_ppm(img, path);
  if (ext == ".png") return write_png(img, path);
  throw ImageIoError("unsupported image extension: " + path.string());
}

}  // namespace camknob
