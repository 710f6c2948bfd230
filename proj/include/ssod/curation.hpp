#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ssod/types.hpp"

namespace ssod {

struct SplitSpec {
  double train_frac = 0.7;
  double val_frac = 0.2;
  double test_frac = 0.1;
  uint64_t seed = 0;
  enum class GroupBy { image, group_id } group_by = GroupBy::image;
};

struct CountsTable {
  std::map<int, int64_t> boxes_per_class;
  std::map<std::string, std::map<int, int64_t>> boxes_per_group;
  std::map<std::string, std::set<int>> classes_per_image;
  int64_t total_boxes = 0;
};

CountsTable class_counts(const DatasetManifest& manifest);

// Removes majority-only images (>= 1 box, all of majority_class), picked by
// seeded uniform sampling, until majority/minority box ratio <= target_ratio
// or no removable images remain. Images with any minority box are never
// touched. target_ratio >= 1; throws when there are no minority boxes.
DatasetManifest rebalance(const DatasetManifest& manifest, int majority_class,
                          double target_ratio, uint64_t seed);

// Seeded shuffle of split units (whole images, or whole group_ids), then a
// cumulative-rounded fraction cut: per-split unit counts land within +-1 of
// frac * total and the outputs partition the input.
std::array<DatasetManifest, 3> split_dataset(const DatasetManifest& manifest,
                                             const SplitSpec& spec);

struct AuditReport {
  struct Offender {
    std::string id;
    std::vector<std::string> manifests;
  };
  // Verdict keys on image ids; shared groups are reported but legitimate
  // when splitting by image.
  std::vector<Offender> duplicate_image_ids;
  std::vector<Offender> shared_group_ids;
  bool pass = true;
};

// Flags every image_id (and group_id) appearing in more than one manifest.
// Id-based only: identical content under two ids is not detected.
AuditReport leakage_audit(std::span<const DatasetManifest> manifests);

nlohmann::json to_json(const AuditReport& report);

}  // namespace ssod
