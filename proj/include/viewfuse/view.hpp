#pragma once

// Heterogeneous data views over a shared user set: ingestion from sparse
// triplet CSV, profile construction from directed relations, and per-view
// cosine kNN queries.

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "viewfuse/csv.hpp"
#include "viewfuse/errors.hpp"
#include "viewfuse/profile.hpp"
#include "viewfuse/universe.hpp"

namespace viewfuse {

enum class Provenance { features, relation_out, relation_in, bipartite_membership };
enum class Weighting { binary, weighted };
enum class Direction { out, in };

struct Edge {
  std::string source;
  std::string target;
  double weight = 1.0;
};

// user id -> feature id -> accumulated weight; ordered for determinism.
using ProfileMap = std::map<std::string, std::map<std::string, double>>;

/// One data view: its present users (a subset of the universe) and a sparse
/// profile per present user. Immutable after construction; all queries are
/// pure reads and thread-safe.
class View {
public:
  View(std::string id, Provenance provenance, Weighting weighting,
       const ProfileMap& profiles)
      : id_(std::move(id)), provenance_(provenance), weighting_(weighting) {
    if (id_.empty()) throw_validation("view id must not be empty");
    if (profiles.size() < 2) {
      throw_validation("view '" + id_ + "' has " +
                       std::to_string(profiles.size()) +
                       " present users, need at least 2");
    }
    users_.reserve(profiles.size());
    profiles_.reserve(profiles.size());
    std::map<std::string, std::uint32_t> feature_index;
    for (const auto& [user, features] : profiles) {
      if (user.empty()) throw_validation("view '" + id_ + "' has an empty user id");
      slots_.emplace(user, users_.size());
      users_.push_back(user);
      std::vector<FeatureProfile::Entry> entries;
      entries.reserve(features.size());
      for (const auto& [feature, weight] : features) {
        if (!(weight >= 0.0) || weight > kMaxFeatureWeight) {
          throw_validation("view '" + id_ + "': weight out of range for user '" +
                           user + "', feature '" + feature + "'");
        }
        if (weight == 0.0) continue;
        auto [it, inserted] = feature_index.emplace(
            feature, static_cast<std::uint32_t>(feature_names_.size()));
        if (inserted) feature_names_.push_back(feature);
        entries.emplace_back(it->second, weight);
      }
      std::sort(entries.begin(), entries.end());
      profiles_.emplace_back(std::move(entries));
    }
  }

  const std::string& id() const { return id_; }
  Provenance provenance() const { return provenance_; }
  Weighting weighting() const { return weighting_; }

  // number of users present in this view
  std::size_t present_count() const { return users_.size(); }
  const std::vector<std::string>& present() const { return users_; }

  bool is_present(const std::string& user) const {
    return slots_.find(user) != slots_.end();
  }

  std::size_t slot_of(const std::string& user) const {
    auto it = slots_.find(user);
    if (it == slots_.end()) {
      throw_validation("user '" + user + "' is not present in view '" + id_ + "'");
    }
    return it->second;
  }

  const std::string& user_at(std::size_t slot) const { return users_[slot]; }
  const FeatureProfile& profile_at(std::size_t slot) const { return profiles_[slot]; }

  const FeatureProfile& profile(const std::string& user) const {
    return profiles_[slot_of(user)];
  }

  // Profile as (feature name, weight), sorted by name. Used by tests and
  // tooling; the hot paths stay on interned indices.
  std::map<std::string, double> profile_entries(const std::string& user) const {
    std::map<std::string, double> out;
    for (const auto& [feature, weight] : profile(user).entries()) {
      out.emplace(feature_names_[feature], weight);
    }
    return out;
  }

private:
  std::string id_;
  Provenance provenance_;
  Weighting weighting_;
  std::vector<std::string> users_;  // sorted (ProfileMap key order)
  std::unordered_map<std::string, std::size_t> slots_;
  std::vector<FeatureProfile> profiles_;
  std::vector<std::string> feature_names_;
};

// ---------------------------------------------------------------------------
// Ingestion

inline View parse_feature_view(const std::string& text, const std::string& view_id,
                               const std::string& source) {
  auto table = csv::parse_table(text, source, {"user_id,feature_id,weight"});
  ProfileMap profiles;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::size_t line = table.row_lines[r];
    if (row[0].empty()) {
      throw_validation(source + ":" + std::to_string(line) + ": empty user id");
    }
    if (row[1].empty()) {
      throw_validation(source + ":" + std::to_string(line) + ": empty feature id");
    }
    double weight = csv::parse_double(row[2], source, line);
    if (weight < 0.0) {
      throw_validation(source + ":" + std::to_string(line) +
                       ": negative weight " + row[2]);
    }
    profiles[row[0]][row[1]] += weight;  // duplicate rows accumulate
  }
  return View(view_id, Provenance::features, Weighting::weighted, profiles);
}

inline View load_feature_view(const std::string& path, const std::string& view_id) {
  return parse_feature_view(csv::read_file(path), view_id, path);
}

// Relation CSV: header `source,target,weight` or `source,target` (weight 1).
inline std::vector<Edge> parse_relation_csv(const std::string& text,
                                            const std::string& source) {
  auto table =
      csv::parse_table(text, source, {"source,target,weight", "source,target"});
  const bool has_weight = table.header_variant == 0;
  std::vector<Edge> edges;
  edges.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::size_t line = table.row_lines[r];
    if (row[0].empty() || row[1].empty()) {
      throw_validation(source + ":" + std::to_string(line) + ": empty endpoint id");
    }
    double weight = has_weight ? csv::parse_double(row[2], source, line) : 1.0;
    edges.push_back({row[0], row[1], weight});
  }
  return edges;
}

inline std::vector<Edge> load_relation_csv(const std::string& path) {
  return parse_relation_csv(csv::read_file(path), path);
}

// Derives profile vectors from a directed relation. direction=out profiles a
// user by the distinct targets of its out-edges, direction=in by the distinct
// sources of its in-edges. Self-loops are dropped; duplicates merge before
// binarisation; present set = users with at least one edge in the chosen
// direction.
inline View relation_to_view(const std::vector<Edge>& edges, Direction direction,
                             Weighting weighting, const std::string& view_id) {
  ProfileMap profiles;
  for (const auto& edge : edges) {
    if (edge.weight <= 0.0) {
      throw_validation("view '" + view_id + "': relation edge (" + edge.source +
                       " -> " + edge.target + ") has non-positive weight");
    }
    if (edge.source.empty() || edge.target.empty()) {
      throw_validation("view '" + view_id + "': relation edge with empty endpoint");
    }
    if (edge.source == edge.target) continue;
    if (direction == Direction::out) {
      profiles[edge.source][edge.target] += edge.weight;
    } else {
      profiles[edge.target][edge.source] += edge.weight;
    }
  }
  if (weighting == Weighting::binary) {
    for (auto& [user, features] : profiles) {
      for (auto& [feature, weight] : features) weight = 1.0;
    }
  }
  return View(view_id,
              direction == Direction::out ? Provenance::relation_out
                                          : Provenance::relation_in,
              weighting, profiles);
}

// ---------------------------------------------------------------------------
// Universe construction and kNN queries

// Union of all views' present users, ordered lexicographically.
inline UserUniverse make_universe(const std::vector<View>& views) {
  std::set<std::string> ids;
  for (const auto& view : views) {
    ids.insert(view.present().begin(), view.present().end());
  }
  return UserUniverse(std::vector<std::string>(ids.begin(), ids.end()));
}

// All present users other than `user`, ordered by descending cosine
// similarity to `user`; exact ties break by ascending universe index.
inline std::vector<std::string> ranked_targets(const View& view,
                                               const UserUniverse& universe,
                                               const std::string& user) {
  const std::size_t self = view.slot_of(user);
  const FeatureProfile& own = view.profile_at(self);

  struct Candidate {
    double similarity;
    std::size_t universe_index;
    std::size_t slot;
  };
  std::vector<Candidate> candidates;
  candidates.reserve(view.present_count() - 1);
  for (std::size_t slot = 0; slot < view.present_count(); ++slot) {
    if (slot == self) continue;
    candidates.push_back({cosine(own, view.profile_at(slot)),
                          universe.index_of(view.user_at(slot)), slot});
  }
  std::sort(candidates.begin(), candidates.end(),
            [](const Candidate& a, const Candidate& b) {
              if (a.similarity != b.similarity) return a.similarity > b.similarity;
              return a.universe_index < b.universe_index;
            });
  std::vector<std::string> order;
  order.reserve(candidates.size());
  for (const auto& c : candidates) order.push_back(view.user_at(c.slot));
  return order;
}

// The min(k, view size - 1) most similar present users.
inline std::vector<std::string> view_knn(const View& view,
                                         const UserUniverse& universe,
                                         const std::string& user, int k) {
  if (k < 1) throw_validation("k must be at least 1, got " + std::to_string(k));
  auto order = ranked_targets(view, universe, user);
  if (order.size() > static_cast<std::size_t>(k)) {
    order.resize(static_cast<std::size_t>(k));
  }
  return order;
}

}  // namespace viewfuse
