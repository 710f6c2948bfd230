#include <algorithm>
#include <cctype>
#include <fstream>

#include "ssod/errors.hpp"
#include "ssod/pgm.hpp"

namespace ssod {

void write_pgm(const GrayImage& image, const std::filesystem::path& file) {
  if (image.width <= 0 || image.height <= 0 ||
      image.pixels.size() !=
          static_cast<size_t>(image.width) * static_cast<size_t>(image.height))
    throw ValidationError("raster dimensions do not match pixel count");
  if (file.has_parent_path())
    std::filesystem::create_directories(file.parent_path());
  std::ofstream out(file, std::ios::binary);
  if (!out) throw IoError("cannot write " + file.string());
  out << "P5\n" << image.width << ' ' << image.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(image.pixels.data()),
            static_cast<std::streamsize>(image.pixels.size()));
  if (!out) throw IoError("write failed: " + file.string());
}

namespace {

// Next whitespace-separated token, skipping '#' comment lines.
std::string next_token(std::istream& in) {
  std::string tok;
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {
      }
      continue;
    }
    if (std::isspace(c)) {
      if (!tok.empty()) return tok;
      continue;
    }
    tok.push_back(static_cast<char>(c));
  }
  return tok;
}

}  // namespace

GrayImage read_pgm(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw IoError("cannot open " + file.string());
  if (next_token(in) != "P5")
    throw ValidationError(file.string() + ": not a binary PGM (P5)");
  GrayImage image;
  try {
    image.width = std::stoi(next_token(in));
    image.height = std::stoi(next_token(in));
    int maxval = std::stoi(next_token(in));
    if (maxval != 255)
      throw ValidationError(file.string() + ": expected maxval 255");
  } catch (const ValidationError&) {
    throw;
  } catch (const std::exception&) {
    throw ValidationError(file.string() + ": malformed PGM header");
  }
  if (image.width <= 0 || image.height <= 0)
    throw ValidationError(file.string() + ": non-positive dimensions");
  // next_token consumed exactly one whitespace after maxval
  const size_t n =
      static_cast<size_t>(image.width) * static_cast<size_t>(image.height);
  image.pixels.resize(n);
  in.read(reinterpret_cast<char*>(image.pixels.data()),
          static_cast<std::streamsize>(n));
  if (static_cast<size_t>(in.gcount()) != n)
    throw ValidationError(file.string() + ": truncated pixel data");
  return image;
}

RasterSet load_pgm_dir(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir))
    throw IoError("not a directory: " + dir.string());
  RasterSet rasters;
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".pgm")
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  for (const auto& file : files)
    rasters.emplace(file.stem().string(), read_pgm(file));
  return rasters;
}

void write_pgm_dir(const RasterSet& rasters,
                   const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& [image_id, image] : rasters)
    write_pgm(image, dir / (image_id + ".pgm"));
}

}  // namespace ssod
