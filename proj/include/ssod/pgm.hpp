#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace ssod {

// 8-bit grayscale raster, row-major.
struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<uint8_t> pixels;

  uint8_t at(int x, int y) const {
    return pixels[static_cast<size_t>(y) * width + x];
  }
};

// Binary PGM (P5, maxval 255).
void write_pgm(const GrayImage& image, const std::filesystem::path& file);
GrayImage read_pgm(const std::filesystem::path& file);

using RasterSet = std::map<std::string, GrayImage>;

// Loads every `<image_id>.pgm` in a directory.
RasterSet load_pgm_dir(const std::filesystem::path& dir);
void write_pgm_dir(const RasterSet& rasters, const std::filesystem::path& dir);

}  // namespace ssod
