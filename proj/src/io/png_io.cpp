#include "png_io.hpp"

#include <png.h>

#include <csetjmp>
#include <cstdio>
#include <cstring>

#include "../core/error.hpp"

namespace bugworld {

void write_png(const std::filesystem::path& path, const Image& img) {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw Error(ErrorCode::kIo, "cannot open " + path.string() + " for writing");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!info || setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, info ? &info : nullptr);
    std::fclose(f);
    throw Error(ErrorCode::kIo, "cannot encode " + path.string());
  }
  png_init_io(png, f);
  png_set_IHDR(png, info, png_uint_32(img.width), png_uint_32(img.height), 8, PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  const auto* rows = img.bytes().data();
  for (int y = 0; y < img.height; ++y)
    png_write_row(png, rows + size_t(y) * size_t(img.width) * 3);
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  if (std::fclose(f) != 0) throw Error(ErrorCode::kIo, "cannot write " + path.string());
}

Image read_png(const std::filesystem::path& path) {
  png_image png;
  std::memset(&png, 0, sizeof png);
  png.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&png, path.c_str()))
    throw Error(ErrorCode::kIo, "cannot read " + path.string() + ": " + png.message);
  png.format = PNG_FORMAT_RGB;
  Image img(int(png.width), int(png.height));
  if (!png_image_finish_read(&png, nullptr, img.pixels.data(), 0, nullptr)) {
    png_image_free(&png);
    throw Error(ErrorCode::kIo, "cannot decode " + path.string() + ": " + png.message);
  }
  return img;
}

}  // namespace bugworld
