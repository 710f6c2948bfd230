#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "ssod/errors.hpp"
#include "ssod/formats.hpp"

namespace ssod {

namespace {

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> tokens;
  std::istringstream in(line);
  std::string tok;
  while (in >> tok) tokens.push_back(tok);
  return tokens;
}

double parse_real(const std::string& tok, const std::string& ctx) {
  size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(tok, &pos);
  } catch (const std::exception&) {
    throw ValidationError(ctx + ": not a number: '" + tok + "'");
  }
  if (pos != tok.size())
    throw ValidationError(ctx + ": not a number: '" + tok + "'");
  return v;
}

int parse_class_id(const std::string& tok, const std::string& ctx) {
  size_t pos = 0;
  int v = 0;
  try {
    v = std::stoi(tok, &pos);
  } catch (const std::exception&) {
    throw ValidationError(ctx + ": not an integer class id: '" + tok + "'");
  }
  if (pos != tok.size())
    throw ValidationError(ctx + ": not an integer class id: '" + tok + "'");
  return v;
}

}  // namespace

DimsTable parse_dims_csv(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw IoError("cannot open " + file.string());
  DimsTable dims;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::string ctx = file.string() + ":" + std::to_string(line_no);
    std::istringstream row(line);
    std::string id, w, h;
    if (!std::getline(row, id, ',') || !std::getline(row, w, ',') ||
        !std::getline(row, h))
      throw ValidationError(ctx + ": expected image_id,width,height");
    if (line_no == 1 && w == "width") continue;  // header row
    int wi = parse_class_id(w, ctx);
    int hi = parse_class_id(h, ctx);
    if (wi <= 0 || hi <= 0)
      throw ValidationError(ctx + ": non-positive dimensions");
    if (!dims.emplace(id, std::make_pair(wi, hi)).second)
      throw ValidationError(ctx + ": duplicate image_id '" + id + "'");
  }
  return dims;
}

DatasetManifest parse_yolo_dir(const std::filesystem::path& label_dir,
                               const DimsTable& dims, const ClassMap& classes,
                               const std::string& name) {
  if (!std::filesystem::is_directory(label_dir))
    throw IoError("not a directory: " + label_dir.string());

  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(label_dir))
    if (entry.is_regular_file() && entry.path().extension() == ".txt")
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());

  DatasetManifest manifest;
  manifest.name = name;
  manifest.class_map = classes;
  manifest.split_tag = SplitTag::unsplit;

  for (const auto& file : files) {
    const std::string image_id = file.stem().string();
    auto dims_it = dims.find(image_id);
    if (dims_it == dims.end())
      throw ValidationError("no dimensions for image '" + image_id + "' (" +
                            file.string() + ")");
    const auto [width, height] = dims_it->second;

    ManifestRecord rec;
    rec.image.image_id = image_id;
    rec.image.width = width;
    rec.image.height = height;

    std::ifstream in(file);
    if (!in) throw IoError("cannot open " + file.string());
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      auto tokens = split_ws(line);
      if (tokens.empty()) continue;
      const std::string ctx = file.string() + ":" + std::to_string(line_no);
      if (tokens.size() != 5)
        throw ValidationError(ctx + ": expected 5 fields, got " +
                              std::to_string(tokens.size()));
      int class_id = parse_class_id(tokens[0], ctx);
      if (!classes.contains(class_id))
        throw ValidationError(ctx + ": unknown class id " +
                              std::to_string(class_id));
      double vals[4];
      for (int i = 0; i < 4; ++i) {
        vals[i] = parse_real(tokens[i + 1], ctx);
        if (vals[i] < 0.0 || vals[i] > 1.0)
          throw ValidationError(ctx + ": value out of [0,1]: " +
                                tokens[i + 1]);
      }
      const double cx = vals[0], cy = vals[1], w = vals[2], h = vals[3];
      BBox box{(cx - w / 2.0) * width, (cy - h / 2.0) * height,
               (cx + w / 2.0) * width, (cy + h / 2.0) * height};
      // Snap quantization overshoot at the image edges (the text format
      // rounds normalized values) but reject anything beyond tolerance.
      constexpr double kSnap = 1e-6;  // pixels
      if (box.x_min < 0.0 && box.x_min >= -kSnap) box.x_min = 0.0;
      if (box.y_min < 0.0 && box.y_min >= -kSnap) box.y_min = 0.0;
      if (box.x_max > width && box.x_max <= width + kSnap) box.x_max = width;
      if (box.y_max > height && box.y_max <= height + kSnap)
        box.y_max = height;
      if (!bbox_valid(box))
        throw ValidationError(ctx + ": degenerate box after denormalization");
      if (box.x_min < 0.0 || box.y_min < 0.0 || box.x_max > width ||
          box.y_max > height)
        throw ValidationError(ctx + ": box out of bounds after denormalization");
      rec.image.boxes.push_back({box, class_id, std::nullopt});
    }
    manifest.records.push_back(std::move(rec));
  }

  sort_records(manifest);
  validate(manifest);
  return manifest;
}

void write_yolo_dir(const DatasetManifest& manifest,
                    const std::filesystem::path& out_dir) {
  validate(manifest);
  std::filesystem::create_directories(out_dir);
  for (const auto& rec : manifest.records) {
    const auto file = out_dir / (rec.image.image_id + ".txt");
    std::ofstream out(file);
    if (!out) throw IoError("cannot write " + file.string());
    for (const auto& box : rec.image.boxes) {
      const double w = rec.image.width, h = rec.image.height;
      // 12 decimals keep the denormalized round-trip well under 1e-6 px.
      char line[160];
      std::snprintf(line, sizeof(line), "%d %.12f %.12f %.12f %.12f\n",
                    box.class_id,
                    (box.bbox.x_min + box.bbox.x_max) / 2.0 / w,
                    (box.bbox.y_min + box.bbox.y_max) / 2.0 / h,
                    (box.bbox.x_max - box.bbox.x_min) / w,
                    (box.bbox.y_max - box.bbox.y_min) / h);
      out << line;
    }
    if (!out) throw IoError("write failed: " + file.string());
  }
}

}  // namespace ssod
