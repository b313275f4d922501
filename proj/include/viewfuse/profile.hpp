#pragma once

// Sparse non-negative feature vectors and their cosine similarity.

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "viewfuse/errors.hpp"

namespace viewfuse {

// Weights above this bound could overflow the squared-norm accumulation and
// poison every similarity downstream with NaN.
inline constexpr double kMaxFeatureWeight = 1e100;

/// One user's representation within a single view. Entries are view-local
/// feature indices with positive weights; the L2 norm is cached. An empty
/// profile is legal and has similarity 0 to everything.
class FeatureProfile {
public:
  using Entry = std::pair<std::uint32_t, double>;

  FeatureProfile() = default;

  // Entries must be sorted by feature index and unique; zero weights are
  // dropped, negative or non-finite weights are rejected.
  explicit FeatureProfile(std::vector<Entry> entries) {
    entries_.reserve(entries.size());
    double sq = 0.0;
    std::uint32_t last = 0;
    bool first = true;
    for (auto& [feature, weight] : entries) {
      if (!first && feature <= last) {
        throw_validation("profile entries must be sorted and unique");
      }
      first = false;
      last = feature;
      if (!(weight >= 0.0) || weight > kMaxFeatureWeight) {
        throw_validation("feature weight out of range [0, 1e100]");
      }
      if (weight == 0.0) continue;
      entries_.emplace_back(feature, weight);
      sq += weight * weight;
    }
    norm_ = std::sqrt(sq);
  }

  const std::vector<Entry>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }
  double norm() const { return norm_; }

private:
  std::vector<Entry> entries_;
  double norm_ = 0.0;
};

// Cosine of two sparse profiles; 0 if either is empty. Weights are
// non-negative, so the result lies in [0, 1].
inline double cosine(const FeatureProfile& p, const FeatureProfile& q) {
  if (p.empty() || q.empty()) return 0.0;
  double dot = 0.0;
  auto pi = p.entries().begin();
  auto qi = q.entries().begin();
  while (pi != p.entries().end() && qi != q.entries().end()) {
    if (pi->first < qi->first) {
      ++pi;
    } else if (qi->first < pi->first) {
      ++qi;
    } else {
      dot += pi->second * qi->second;
      ++pi;
      ++qi;
    }
  }
  double value = dot / (p.norm() * q.norm());
  if (value < 0.0) return 0.0;
  if (value > 1.0) return 1.0;
  return value;
}

}  // namespace viewfuse
