// Copyright 2026 The Peekaboo Authors
// SPDX-License-Identifier: Apache-2.0

#include "peekaboo/image_io.hpp"

#include <png.h>

#include <cctype>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <memory>
#include <vector>

// jpeglib.h expects FILE and size_t to be declared first.
#include <jpeglib.h>

namespace peekaboo {

namespace {

std::string lower_extension(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext;
}

bool is_jpeg(const std::filesystem::path& path) {
  const auto ext = lower_extension(path);
  return ext == ".jpg" || ext == ".jpeg";
}

struct Decoded {
  int width = 0;
  int height = 0;
  int channels = 0;
  std::vector<std::uint8_t> pixels;
};

Decoded decode_png(const std::filesystem::path& path, int channels) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.c_str())) {
    throw IoError("cannot read PNG " + path.string() + ": " + image.message);
  }
  image.format = channels == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  Decoded out;
  out.width = static_cast<int>(image.width);
  out.height = static_cast<int>(image.height);
  out.channels = channels;
  out.pixels.resize(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, out.pixels.data(), 0, nullptr)) {
    const std::string message = image.message;
    png_image_free(&image);
    throw IoError("cannot decode PNG " + path.string() + ": " + message);
  }
  return out;
}

struct JpegErrorManager {
  jpeg_error_mgr base;
  std::jmp_buf jump;
  char message[JMSG_LENGTH_MAX];
};

void jpeg_error_exit(j_common_ptr cinfo) {
  auto* err = reinterpret_cast<JpegErrorManager*>(cinfo->err);
  (*cinfo->err->format_message)(cinfo, err->message);
  std::longjmp(err->jump, 1);
}

Decoded decode_jpeg(const std::filesystem::path& path, int channels) {
  std::unique_ptr<FILE, int (*)(FILE*)> file(std::fopen(path.c_str(), "rb"), &std::fclose);
  if (!file) throw IoError("cannot open JPEG " + path.string());

  jpeg_decompress_struct cinfo;
  JpegErrorManager err;
  cinfo.err = jpeg_std_error(&err.base);
  err.base.error_exit = jpeg_error_exit;
  Decoded out;
  if (setjmp(err.jump)) {
    jpeg_destroy_decompress(&cinfo);
    throw IoError("cannot decode JPEG " + path.string() + ": " + err.message);
  }
  jpeg_create_decompress(&cinfo);
  jpeg_stdio_src(&cinfo, file.get());
  jpeg_read_header(&cinfo, TRUE);
  cinfo.out_color_space = channels == 3 ? JCS_RGB : JCS_GRAYSCALE;
  jpeg_start_decompress(&cinfo);
  out.width = static_cast<int>(cinfo.output_width);
  out.height = static_cast<int>(cinfo.output_height);
  out.channels = channels;
  out.pixels.resize(static_cast<std::size_t>(out.width) * out.height * channels);
  while (cinfo.output_scanline < cinfo.output_height) {
    JSAMPROW row = out.pixels.data() +
                   static_cast<std::size_t>(cinfo.output_scanline) * out.width * channels;
    jpeg_read_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);
  return out;
}

Decoded decode(const std::filesystem::path& path, int channels) {
  if (!std::filesystem::exists(path)) throw IoError("image not found: " + path.string());
  return is_jpeg(path) ? decode_jpeg(path, channels) : decode_png(path, channels);
}

void encode_png(const std::filesystem::path& path, int width, int height, int channels,
                const std::vector<std::uint8_t>& pixels) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(width);
  image.height = static_cast<png_uint_32>(height);
  image.format = channels == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  if (!png_image_write_to_file(&image, path.c_str(), 0, pixels.data(), 0, nullptr)) {
    throw IoError("cannot write PNG " + path.string() + ": " + image.message);
  }
}

std::uint8_t to_byte(float v) {
  return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

template <typename Mask>
void write_binary(const std::filesystem::path& path, const Mask& mask) {
  std::vector<std::uint8_t> px(mask.size());
  std::transform(mask.data().begin(), mask.data().end(), px.begin(),
                 [](std::uint8_t v) { return static_cast<std::uint8_t>(v ? 255 : 0); });
  encode_png(path, mask.width(), mask.height(), 1, px);
}

}  // namespace

ImageTensor read_rgb_image(const std::filesystem::path& path) {
  const Decoded d = decode(path, 3);
  std::vector<float> data(d.pixels.begin(), d.pixels.end());
  return ImageTensor(d.height, d.width, std::move(data));
}

Plane<float> read_gray_image(const std::filesystem::path& path) {
  const Decoded d = decode(path, 1);
  std::vector<float> data(d.pixels.begin(), d.pixels.end());
  return Plane<float>(d.height, d.width, std::move(data));
}

void write_rgb_png(const std::filesystem::path& path, const ImageTensor& raw) {
  std::vector<std::uint8_t> px(raw.data().size());
  std::transform(raw.data().begin(), raw.data().end(), px.begin(), to_byte);
  encode_png(path, raw.width(), raw.height(), 3, px);
}

void write_mask_png(const std::filesystem::path& path, const BinaryMask& mask) {
  write_binary(path, mask);
}

void write_mask_png(const std::filesystem::path& path, const ScribbleMask& mask) {
  write_binary(path, mask);
}

void write_soft_png(const std::filesystem::path& path, const SoftMask& mask) {
  std::vector<std::uint8_t> px(mask.size());
  std::transform(mask.data().begin(), mask.data().end(), px.begin(),
                 [](float v) { return to_byte(v * 255.0f); });
  encode_png(path, mask.width(), mask.height(), 1, px);
}

bool has_image_extension(const std::filesystem::path& path) {
  const auto ext = lower_extension(path);
  return ext == ".png" || ext == ".jpg" || ext == ".jpeg";
}

}  // namespace peekaboo
