#pragma once

// Dataset manifest: a JSON object listing the views to load. Unknown keys
// are rejected so typos fail loudly instead of being ignored. View paths
// are resolved relative to the manifest's directory.

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "viewfuse/csv.hpp"
#include "viewfuse/errors.hpp"
#include "viewfuse/universe.hpp"
#include "viewfuse/view.hpp"

namespace viewfuse {

struct ManifestEntry {
  std::string id;
  std::string path;  // resolved
  std::string type;  // "features" | "relation"
  Direction direction = Direction::out;   // relation only
  Weighting weighting = Weighting::binary;  // relation only
};

namespace detail {

inline void reject_unknown_keys(const nlohmann::json& object,
                                const std::vector<std::string>& allowed,
                                const std::string& where) {
  for (auto it = object.begin(); it != object.end(); ++it) {
    bool known = false;
    for (const auto& key : allowed) {
      if (it.key() == key) {
        known = true;
        break;
      }
    }
    if (!known) {
      throw_validation(where + ": unknown key '" + it.key() + "'");
    }
  }
}

inline std::string require_string(const nlohmann::json& object,
                                  const std::string& key,
                                  const std::string& where) {
  if (!object.contains(key)) {
    throw_validation(where + ": missing key '" + key + "'");
  }
  if (!object[key].is_string() || object[key].get<std::string>().empty()) {
    throw_validation(where + ": key '" + key + "' must be a non-empty string");
  }
  return object[key].get<std::string>();
}

}  // namespace detail

inline std::vector<ManifestEntry> parse_manifest(const std::string& text,
                                                 const std::string& source,
                                                 const std::string& base_dir) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw_validation(source + ": invalid JSON: " + e.what());
  }
  if (!doc.is_object()) throw_validation(source + ": manifest must be a JSON object");
  detail::reject_unknown_keys(doc, {"views"}, source);
  if (!doc.contains("views") || !doc["views"].is_array() || doc["views"].empty()) {
    throw_validation(source + ": manifest needs a non-empty 'views' array");
  }

  std::vector<ManifestEntry> entries;
  std::vector<std::string> seen_ids;
  for (std::size_t i = 0; i < doc["views"].size(); ++i) {
    const auto& item = doc["views"][i];
    const std::string where = source + ": views[" + std::to_string(i) + "]";
    if (!item.is_object()) throw_validation(where + ": must be an object");

    ManifestEntry entry;
    entry.id = detail::require_string(item, "id", where);
    const std::string raw_path = detail::require_string(item, "path", where);
    entry.path = (std::filesystem::path(base_dir) / raw_path).string();
    entry.type = detail::require_string(item, "type", where);

    if (entry.type == "features") {
      detail::reject_unknown_keys(item, {"id", "path", "type"}, where);
    } else if (entry.type == "relation") {
      detail::reject_unknown_keys(item, {"id", "path", "type", "direction", "weighting"},
                                  where);
      const std::string direction = detail::require_string(item, "direction", where);
      if (direction == "out") {
        entry.direction = Direction::out;
      } else if (direction == "in") {
        entry.direction = Direction::in;
      } else {
        throw_validation(where + ": direction must be 'out' or 'in', got '" +
                         direction + "'");
      }
      const std::string weighting = detail::require_string(item, "weighting", where);
      if (weighting == "binary") {
        entry.weighting = Weighting::binary;
      } else if (weighting == "weighted") {
        entry.weighting = Weighting::weighted;
      } else {
        throw_validation(where + ": weighting must be 'binary' or 'weighted', got '" +
                         weighting + "'");
      }
    } else {
      throw_validation(where + ": type must be 'features' or 'relation', got '" +
                       entry.type + "'");
    }

    for (const auto& id : seen_ids) {
      if (id == entry.id) throw_validation(where + ": duplicate view id '" + id + "'");
    }
    seen_ids.push_back(entry.id);
    entries.push_back(std::move(entry));
  }
  return entries;
}

struct Dataset {
  std::vector<View> views;
  UserUniverse universe;
};

inline Dataset load_dataset(const std::string& manifest_path) {
  const std::string base_dir =
      std::filesystem::path(manifest_path).parent_path().string();
  auto entries =
      parse_manifest(csv::read_file(manifest_path), manifest_path, base_dir);

  std::vector<View> views;
  views.reserve(entries.size());
  for (const auto& entry : entries) {
    if (entry.type == "features") {
      views.push_back(load_feature_view(entry.path, entry.id));
    } else {
      views.push_back(relation_to_view(load_relation_csv(entry.path),
                                       entry.direction, entry.weighting,
                                       entry.id));
    }
  }
  UserUniverse universe = make_universe(views);
  return Dataset{std::move(views), std::move(universe)};
}

}  // namespace viewfuse
