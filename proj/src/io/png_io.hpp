#pragma once

#include <filesystem>

#include "../core/types.hpp"

namespace bugworld {

/// 8-bit RGB, no alpha, no gamma chunk. Throws Error(kIo).
void write_png(const std::filesystem::path& path, const Image& img);
Image read_png(const std::filesystem::path& path);

}  // namespace bugworld
