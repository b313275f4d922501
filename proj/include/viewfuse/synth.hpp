#pragma once

// Seeded synthetic multi-view datasets with planted community structure.
// Each view draws per-user sparse features either from the user's community
// pool (probability `signal`) or from a view-global pool, so one generator
// feeds both feature views and relation-derived views (a relation view is
// the same draws emitted as an edge list user -> feature id).
//
// Determinism contract: all randomness comes from viewfuse::Rng (mt19937_64
// with rejection-sampled bounds), and the draw order is fixed: overlap
// assignment, then per-view coverage subsets, then per-view feature draws in
// ascending user order. The same seed yields byte-identical files on every
// platform.

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "viewfuse/community.hpp"
#include "viewfuse/csv.hpp"
#include "viewfuse/errors.hpp"
#include "viewfuse/rng.hpp"
#include "viewfuse/universe.hpp"
#include "viewfuse/view.hpp"

namespace viewfuse {

struct SynthConfig {
  int n = 100;
  int communities = 4;
  std::vector<int> sizes;        // optional explicit sizes; empty = balanced
  int views = 3;
  std::vector<double> signals;   // one value broadcast, or one per view
  int features_per_user = 10;
  double coverage = 1.0;         // fraction of users present per view
  double overlap_fraction = 0.0; // fraction of users with a second community
  int relation_views = 0;        // trailing views emitted as edge lists
  int community_pool = 24;       // feature-pool sizes, per view
  int global_pool = 96;
  std::uint64_t seed = 1;
};

struct SynthViewFile {
  std::string id;
  std::string filename;
  bool relation = false;
  std::string csv;
};

struct SynthDataset {
  std::vector<View> views;
  UserUniverse universe;
  CommunityAssignment communities;
  std::vector<SynthViewFile> files;
  std::string communities_csv;
  std::string manifest_json;
};

namespace detail {

inline std::string padded_id(char prefix, std::size_t index, std::size_t max_index) {
  std::size_t width = 1;
  for (std::size_t v = max_index; v >= 10; v /= 10) ++width;
  std::string digits = std::to_string(index);
  std::string out(1, prefix);
  out.append(width - digits.size(), '0');
  out += digits;
  return out;
}

inline void validate(const SynthConfig& config) {
  if (config.n < 2) throw_validation("synth: n must be at least 2");
  if (config.communities < 1) throw_validation("synth: need at least 1 community");
  if (config.n < 2 * config.communities) {
    throw_validation("synth: n must be at least twice the community count");
  }
  if (!config.sizes.empty()) {
    if (config.sizes.size() != static_cast<std::size_t>(config.communities)) {
      throw_validation("synth: sizes list must have one entry per community");
    }
    int sum = 0;
    for (int s : config.sizes) {
      if (s < 1) throw_validation("synth: community sizes must be positive");
      sum += s;
    }
    if (sum != config.n) throw_validation("synth: community sizes must sum to n");
  }
  if (config.views < 1) throw_validation("synth: need at least 1 view");
  if (config.relation_views < 0 || config.relation_views > config.views) {
    throw_validation("synth: relation view count must lie in [0, views]");
  }
  if (config.signals.size() > 1 &&
      config.signals.size() != static_cast<std::size_t>(config.views)) {
    throw_validation("synth: signals must be a single value or one per view");
  }
  for (double s : config.signals) {
    if (!(s >= 0.0 && s <= 1.0)) {
      throw_validation("synth: signal must lie in [0, 1]");
    }
  }
  if (!(config.coverage >= 0.0 && config.coverage <= 1.0)) {
    throw_validation("synth: coverage must lie in [0, 1]");
  }
  if (!(config.overlap_fraction >= 0.0 && config.overlap_fraction <= 1.0)) {
    throw_validation("synth: overlap fraction must lie in [0, 1]");
  }
  if (config.overlap_fraction > 0.0 && config.communities < 2) {
    throw_validation("synth: overlap needs at least 2 communities");
  }
  if (config.features_per_user < 1) {
    throw_validation("synth: features per user must be at least 1");
  }
  if (config.community_pool < 1 || config.global_pool < 1) {
    throw_validation("synth: feature pools must be non-empty");
  }
}

}  // namespace detail

inline SynthDataset generate(const SynthConfig& config) {
  detail::validate(config);
  const std::size_t n = static_cast<std::size_t>(config.n);
  const std::size_t c = static_cast<std::size_t>(config.communities);
  const std::size_t l = static_cast<std::size_t>(config.views);
  Rng rng(config.seed);

  std::vector<std::string> user_ids(n);
  for (std::size_t i = 0; i < n; ++i) {
    user_ids[i] = detail::padded_id('u', i, n - 1);
  }
  std::vector<std::string> community_ids(c);
  for (std::size_t i = 0; i < c; ++i) {
    community_ids[i] = detail::padded_id('c', i, c - 1);
  }

  // Balanced sizes unless given explicitly; the remainder goes to the first
  // communities.
  std::vector<int> sizes = config.sizes;
  if (sizes.empty()) {
    sizes.assign(c, config.n / config.communities);
    for (int r = 0; r < config.n % config.communities; ++r) sizes[r] += 1;
  }

  // user -> list of community indices (one, or two for overlap users)
  std::vector<std::vector<std::size_t>> member_of(n);
  {
    std::size_t user = 0;
    for (std::size_t comm = 0; comm < c; ++comm) {
      for (int s = 0; s < sizes[comm]; ++s) member_of[user++] = {comm};
    }
  }
  const std::size_t overlap_count = static_cast<std::size_t>(
      config.overlap_fraction * static_cast<double>(n) + 0.5);
  for (std::size_t idx : rng.sample_without_replacement(n, overlap_count)) {
    const std::size_t primary = member_of[idx][0];
    const std::size_t secondary = (primary + 1 + rng.below(c - 1)) % c;
    member_of[idx].push_back(secondary);
  }

  // Per-view coverage subsets, then make sure nobody is left out of every
  // view (the universe must cover all generated users).
  std::vector<std::vector<bool>> covered(l, std::vector<bool>(n, false));
  std::size_t cover_size = static_cast<std::size_t>(
      config.coverage * static_cast<double>(n) + 0.5);
  if (cover_size < 2) cover_size = 2;
  if (cover_size > n) cover_size = n;
  for (std::size_t j = 0; j < l; ++j) {
    for (std::size_t idx : rng.sample_without_replacement(n, cover_size)) {
      covered[j][idx] = true;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    bool anywhere = false;
    for (std::size_t j = 0; j < l; ++j) anywhere = anywhere || covered[j][i];
    if (!anywhere) covered[i % l][i] = true;
  }

  auto signal_of = [&](std::size_t j) {
    if (config.signals.empty()) return 1.0;
    if (config.signals.size() == 1) return config.signals[0];
    return config.signals[j];
  };

  // Draw features and render each view's CSV body.
  std::vector<View> views;
  std::vector<SynthViewFile> files;
  const std::size_t feature_views = l - static_cast<std::size_t>(config.relation_views);
  for (std::size_t j = 0; j < l; ++j) {
    const bool relation = j >= feature_views;
    SynthViewFile file;
    file.id = "view" + std::to_string(j);
    file.filename = file.id + ".csv";
    file.relation = relation;
    file.csv = relation ? "source,target,weight\n" : "user_id,feature_id,weight\n";

    const double signal = signal_of(j);
    for (std::size_t i = 0; i < n; ++i) {
      if (!covered[j][i]) continue;
      for (int d = 0; d < config.features_per_user; ++d) {
        std::string feature;
        if (rng.unit() < signal) {
          const auto& groups = member_of[i];
          const std::size_t comm =
              groups.size() == 1 ? groups[0] : groups[rng.below(groups.size())];
          feature = "v" + std::to_string(j) + ":" + community_ids[comm] + ":" +
                    std::to_string(rng.below(static_cast<std::uint64_t>(config.community_pool)));
        } else {
          feature = "v" + std::to_string(j) + ":g:" +
                    std::to_string(rng.below(static_cast<std::uint64_t>(config.global_pool)));
        }
        file.csv += user_ids[i];
        file.csv += ',';
        file.csv += feature;
        file.csv += ",1\n";
      }
    }

    if (relation) {
      views.push_back(relation_to_view(parse_relation_csv(file.csv, file.filename),
                                       Direction::out, Weighting::weighted,
                                       file.id));
    } else {
      views.push_back(parse_feature_view(file.csv, file.id, file.filename));
    }
    files.push_back(std::move(file));
  }

  UserUniverse universe = make_universe(views);

  std::vector<std::pair<std::string, std::string>> membership_pairs;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t comm : member_of[i]) {
      membership_pairs.emplace_back(user_ids[i], community_ids[comm]);
    }
  }
  CommunityAssignment assignment = CommunityAssignment::from_pairs(membership_pairs);
  std::string communities_csv = assignment.to_csv();

  nlohmann::ordered_json manifest;
  manifest["views"] = nlohmann::ordered_json::array();
  for (const auto& file : files) {
    nlohmann::ordered_json entry;
    entry["id"] = file.id;
    entry["path"] = file.filename;
    entry["type"] = file.relation ? "relation" : "features";
    if (file.relation) {
      entry["direction"] = "out";
      entry["weighting"] = "weighted";
    }
    manifest["views"].push_back(entry);
  }

  return SynthDataset{std::move(views),
                      std::move(universe),
                      std::move(assignment),
                      std::move(files),
                      std::move(communities_csv),
                      manifest.dump(2) + "\n"};
}

inline void write_dataset(const SynthDataset& dataset, const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw_io("cannot create directory '" + dir + "': " + ec.message());
  const std::filesystem::path base(dir);
  for (const auto& file : dataset.files) {
    csv::write_file((base / file.filename).string(), file.csv);
  }
  csv::write_file((base / "communities.csv").string(), dataset.communities_csv);
  csv::write_file((base / "manifest.json").string(), dataset.manifest_json);
}

}  // namespace viewfuse
