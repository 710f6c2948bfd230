#include <algorithm>
#include <cmath>
#include <numeric>

#include "ssod/curation.hpp"
#include "ssod/errors.hpp"
#include "ssod/rng.hpp"

namespace ssod {

CountsTable class_counts(const DatasetManifest& manifest) {
  CountsTable table;
  for (const auto& c : manifest.class_map.classes())
    table.boxes_per_class[c.id] = 0;
  for (const auto& rec : manifest.records) {
    auto& presence = table.classes_per_image[rec.image.image_id];
    for (const auto& box : rec.image.boxes) {
      ++table.boxes_per_class[box.class_id];
      ++table.boxes_per_group[rec.image.group_id][box.class_id];
      presence.insert(box.class_id);
      ++table.total_boxes;
    }
  }
  return table;
}

DatasetManifest rebalance(const DatasetManifest& manifest, int majority_class,
                          double target_ratio, uint64_t seed) {
  validate(manifest);
  if (!manifest.class_map.contains(majority_class))
    throw ValidationError("unknown majority class " +
                          std::to_string(majority_class));
  if (target_ratio < 1.0)
    throw ValidationError("target_ratio must be >= 1");

  int64_t majority_count = 0, minority_count = 0;
  std::vector<size_t> removable;  // records with >= 1 box, all majority
  std::vector<int64_t> removable_boxes;
  for (size_t i = 0; i < manifest.records.size(); ++i) {
    const auto& boxes = manifest.records[i].image.boxes;
    int64_t maj = 0, min = 0;
    for (const auto& box : boxes)
      box.class_id == majority_class ? ++maj : ++min;
    majority_count += maj;
    minority_count += min;
    if (min == 0 && maj > 0) {
      removable.push_back(i);
      removable_boxes.push_back(maj);
    }
  }
  if (minority_count == 0)
    throw ValidationError("cannot rebalance: no minority instances");

  Rng rng(seed);
  std::vector<size_t> order(removable.size());
  std::iota(order.begin(), order.end(), size_t{0});
  rng.shuffle(order);

  std::vector<bool> removed(manifest.records.size(), false);
  for (size_t k : order) {
    if (majority_count <=
        target_ratio * static_cast<double>(minority_count))
      break;
    removed[removable[k]] = true;
    majority_count -= removable_boxes[k];
  }

  DatasetManifest out;
  out.name = manifest.name;
  out.class_map = manifest.class_map;
  out.split_tag = manifest.split_tag;
  out.extra = manifest.extra;
  for (size_t i = 0; i < manifest.records.size(); ++i)
    if (!removed[i]) out.records.push_back(manifest.records[i]);
  return out;
}

std::array<DatasetManifest, 3> split_dataset(const DatasetManifest& manifest,
                                             const SplitSpec& spec) {
  validate(manifest);
  if (!(spec.train_frac > 0.0 && spec.val_frac > 0.0 && spec.test_frac > 0.0))
    throw ValidationError("split fractions must be positive");
  if (std::abs(spec.train_frac + spec.val_frac + spec.test_frac - 1.0) > 1e-9)
    throw ValidationError("split fractions must sum to 1");

  // Split units: image ids, or distinct group ids.
  std::vector<std::string> units;
  for (const auto& rec : manifest.records) {
    const std::string& key = spec.group_by == SplitSpec::GroupBy::image
                                 ? rec.image.image_id
                                 : rec.image.group_id;
    units.push_back(key);
  }
  std::sort(units.begin(), units.end());
  units.erase(std::unique(units.begin(), units.end()), units.end());

  const size_t n = units.size();
  if (n < 3)
    throw ValidationError("fewer split units (" + std::to_string(n) +
                          ") than splits (3)");

  Rng rng(spec.seed);
  rng.shuffle(units);

  const auto cut1 = static_cast<size_t>(
      std::llround(spec.train_frac * static_cast<double>(n)));
  const auto cut2 = static_cast<size_t>(std::llround(
      (spec.train_frac + spec.val_frac) * static_cast<double>(n)));
  std::map<std::string, int> assignment;  // unit -> 0/1/2
  for (size_t i = 0; i < n; ++i)
    assignment[units[i]] = i < cut1 ? 0 : (i < cut2 ? 1 : 2);

  std::array<DatasetManifest, 3> out;
  const SplitTag tags[3] = {SplitTag::train, SplitTag::val, SplitTag::test};
  const char* suffix[3] = {"_train", "_val", "_test"};
  for (int s = 0; s < 3; ++s) {
    out[s].name = manifest.name + suffix[s];
    out[s].class_map = manifest.class_map;
    out[s].split_tag = tags[s];
  }
  for (const auto& rec : manifest.records) {
    const std::string& key = spec.group_by == SplitSpec::GroupBy::image
                                 ? rec.image.image_id
                                 : rec.image.group_id;
    out[static_cast<size_t>(assignment.at(key))].records.push_back(rec);
  }
  return out;
}

AuditReport leakage_audit(std::span<const DatasetManifest> manifests) {
  if (manifests.size() < 2)
    throw ValidationError("leakage audit needs at least 2 manifests");

  auto label = [&](size_t i) {
    return manifests[i].name.empty()
               ? "manifest[" + std::to_string(i) + "]"
               : manifests[i].name;
  };

  std::map<std::string, std::vector<std::string>> image_owners, group_owners;
  for (size_t i = 0; i < manifests.size(); ++i) {
    std::set<std::string> groups;
    for (const auto& rec : manifests[i].records) {
      image_owners[rec.image.image_id].push_back(label(i));
      groups.insert(rec.image.group_id);
    }
    for (const auto& g : groups) group_owners[g].push_back(label(i));
  }

  AuditReport report;
  for (auto& [id, owners] : image_owners) {
    std::vector<std::string> distinct(owners);
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()),
                   distinct.end());
    if (distinct.size() > 1)
      report.duplicate_image_ids.push_back({id, std::move(distinct)});
  }
  for (auto& [id, owners] : group_owners)
    if (owners.size() > 1) report.shared_group_ids.push_back({id, owners});
  report.pass = report.duplicate_image_ids.empty();
  return report;
}

nlohmann::json to_json(const AuditReport& report) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["type"] = "leakage_audit";
  j["verdict"] = report.pass ? "PASS" : "FAIL";
  auto offenders = [](const std::vector<AuditReport::Offender>& list) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& o : list)
      arr.push_back({{"id", o.id}, {"manifests", o.manifests}});
    return arr;
  };
  j["duplicate_image_ids"] = offenders(report.duplicate_image_ids);
  j["shared_group_ids"] = offenders(report.shared_group_ids);
  return j;
}

}  // namespace ssod
