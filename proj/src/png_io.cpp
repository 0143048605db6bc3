#include "framescope/png_io.hpp"

#include <png.h>

#include <cmath>
#include <cstring>
#include <vector>

namespace framescope {
namespace {

std::vector<uint8_t> read_png_bytes(const std::string& path, int format,
                                    int channels, int* w, int* h) {
  png_image img;
  std::memset(&img, 0, sizeof(img));
  img.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&img, path.c_str())) {
    throw Error(ErrorKind::IoError,
                "cannot read PNG " + path + ": " + img.message);
  }
  img.format = format;
  std::vector<uint8_t> buf(static_cast<size_t>(img.width) * img.height * channels);
  if (!png_image_finish_read(&img, nullptr, buf.data(), 0, nullptr)) {
    std::string msg = img.message;
    png_image_free(&img);
    throw Error(ErrorKind::IoError, "cannot decode PNG " + path + ": " + msg);
  }
  *w = static_cast<int>(img.width);
  *h = static_cast<int>(img.height);
  return buf;
}

void write_png_bytes(const std::string& path, const uint8_t* bytes, int w, int h,
                     int format) {
  png_image img;
  std::memset(&img, 0, sizeof(img));
  img.version = PNG_IMAGE_VERSION;
  img.width = static_cast<png_uint_32>(w);
  img.height = static_cast<png_uint_32>(h);
  img.format = format;
  if (!png_image_write_to_file(&img, path.c_str(), 0, bytes, 0, nullptr)) {
    throw Error(ErrorKind::IoError,
                "cannot write PNG " + path + ": " + img.message);
  }
}

}  // namespace

ImageBuffer read_png_rgb(const std::string& path) {
  int w = 0, h = 0;
  std::vector<uint8_t> buf = read_png_bytes(path, PNG_FORMAT_RGB, 3, &w, &h);
  ImageBuffer out(w, h);
  for (size_t i = 0; i < buf.size(); ++i) out.data[i] = buf[i] / 255.0;
  return out;
}

void write_png_rgb(const std::string& path, const ImageBuffer& image) {
  std::vector<uint8_t> buf(image.data.size());
  for (size_t i = 0; i < buf.size(); ++i)
    buf[i] = static_cast<uint8_t>(std::lround(image.data[i] * 255.0));
  write_png_bytes(path, buf.data(), image.width, image.height, PNG_FORMAT_RGB);
}

BinaryPlane read_png_mask(const std::string& path) {
  int w = 0, h = 0;
  std::vector<uint8_t> buf = read_png_bytes(path, PNG_FORMAT_GRAY, 1, &w, &h);
  BinaryPlane out(w, h);
  for (size_t i = 0; i < buf.size(); ++i) out.data[i] = buf[i] != 0 ? 1 : 0;
  return out;
}

void write_png_mask(const std::string& path, const BinaryPlane& plane) {
  std::vector<uint8_t> buf(plane.data.size());
  for (size_t i = 0; i < buf.size(); ++i) buf[i] = plane.data[i] ? 255 : 0;
  write_png_bytes(path, buf.data(), plane.width, plane.height, PNG_FORMAT_GRAY);
}

}  // namespace framescope
