#pragma once

// Per-user SVD rank aggregation: build the stacked normalised rank matrix
// across views and read the consensus ordering off the leading left singular
// vector, computed by power iteration on M(M^T v).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "viewfuse/errors.hpp"
#include "viewfuse/parallel.hpp"
#include "viewfuse/universe.hpp"
#include "viewfuse/view.hpp"

namespace viewfuse {

// Rank columns use 1 = most similar, so in the non-negative leading singular
// vector smaller entries mean better aggregated rank; entries within this
// threshold count as tied and fall back to ascending universe index.
inline constexpr double kEntryTieThreshold = 1e-12;

struct PowerIterationOptions {
  double tol = 1e-10;
  int max_iters = 1000;
};

struct PowerIterationResult {
  std::vector<double> vector;  // unit norm, entries canonicalised >= 0
  int iterations = 0;
  bool converged = false;
};

/// One view's rank column for a subject user: every other universe user in
/// universe order, present targets carrying the exact ranks 1..(view size - 1)
/// and absent targets the shared rank (view size + 1).
struct RankVector {
  std::vector<std::string> targets;
  std::vector<double> ranks;
};

/// The (n-1) x l' stack of a subject's unit-normalised rank columns.
struct RankMatrix {
  std::string subject;
  std::vector<std::string> targets;          // n-1 ids in universe order
  std::vector<std::vector<double>> columns;  // l' columns, each unit norm
};

/// Aggregated top-k neighbour lists for every universe user, in universe
/// order. k is the requested neighbourhood size; lists hold min(k, n-1) ids.
class NeighbourSets {
public:
  NeighbourSets(int k, std::vector<std::string> subjects,
                std::vector<std::vector<std::string>> lists,
                std::size_t non_converged = 0)
      : k_(k),
        subjects_(std::move(subjects)),
        lists_(std::move(lists)),
        non_converged_(non_converged) {
    for (std::size_t i = 0; i < subjects_.size(); ++i) {
      position_.emplace(subjects_[i], i);
    }
  }

  int k() const { return k_; }
  std::size_t size() const { return subjects_.size(); }
  const std::vector<std::string>& subjects() const { return subjects_; }
  const std::vector<std::vector<std::string>>& lists() const { return lists_; }
  std::size_t non_converged() const { return non_converged_; }

  const std::vector<std::string>& neighbours_of(const std::string& user) const {
    auto it = position_.find(user);
    if (it == position_.end()) {
      throw_validation("no neighbour set for user '" + user + "'");
    }
    return lists_[it->second];
  }

  // CSV export `user_id,rank,neighbour_id`, rank starting at 1.
  std::string to_csv() const {
    std::string out = "user_id,rank,neighbour_id\n";
    for (std::size_t i = 0; i < subjects_.size(); ++i) {
      for (std::size_t r = 0; r < lists_[i].size(); ++r) {
        out += subjects_[i];
        out += ',';
        out += std::to_string(r + 1);
        out += ',';
        out += lists_[i][r];
        out += '\n';
      }
    }
    return out;
  }

private:
  int k_;
  std::vector<std::string> subjects_;
  std::vector<std::vector<std::string>> lists_;
  std::unordered_map<std::string, std::size_t> position_;
  std::size_t non_converged_;
};

// ---------------------------------------------------------------------------
// Pipeline steps

// Cosine from `user` to every other user present in the view.
inline std::map<std::string, double> similarity_vector(const View& view,
                                                       const std::string& user) {
  const std::size_t self = view.slot_of(user);
  const FeatureProfile& own = view.profile_at(self);
  std::map<std::string, double> sims;
  for (std::size_t slot = 0; slot < view.present_count(); ++slot) {
    if (slot == self) continue;
    sims.emplace(view.user_at(slot), cosine(own, view.profile_at(slot)));
  }
  return sims;
}

// Turns a similarity vector into the full rank column over all n-1 other
// universe users. Present targets are ranked 1..(view size - 1) by descending
// similarity (ties by ascending universe index), absent targets share rank
// (view size + 1); the rank equal to the view size itself is never assigned.
inline RankVector rank_vector(const std::map<std::string, double>& sims,
                              const View& view, const UserUniverse& universe,
                              const std::string& user) {
  const std::size_t self = universe.index_of(user);
  if (!view.is_present(user)) {
    throw_validation("user '" + user + "' is not present in view '" +
                     view.id() + "'");
  }

  struct Present {
    double similarity;
    std::size_t universe_index;
  };
  std::vector<Present> present;
  present.reserve(view.present_count() - 1);
  for (const auto& target : view.present()) {
    if (target == user) continue;
    auto it = sims.find(target);
    if (it == sims.end()) {
      throw_validation("similarity vector is missing present target '" +
                       target + "' of view '" + view.id() + "'");
    }
    present.push_back({it->second, universe.index_of(target)});
  }
  if (sims.size() != present.size()) {
    throw_validation("similarity vector for view '" + view.id() +
                     "' does not match the view's present targets");
  }
  std::sort(present.begin(), present.end(),
            [](const Present& a, const Present& b) {
              if (a.similarity != b.similarity) return a.similarity > b.similarity;
              return a.universe_index < b.universe_index;
            });

  const double missing_rank = static_cast<double>(view.present_count()) + 1.0;
  RankVector rv;
  rv.targets.reserve(universe.size() - 1);
  rv.ranks.assign(universe.size() - 1, missing_rank);
  std::vector<std::size_t> row_of(universe.size(), 0);
  std::size_t row = 0;
  for (std::size_t i = 0; i < universe.size(); ++i) {
    if (i == self) continue;
    rv.targets.push_back(universe.users()[i]);
    row_of[i] = row++;
  }
  for (std::size_t r = 0; r < present.size(); ++r) {
    rv.ranks[row_of[present[r].universe_index]] = static_cast<double>(r + 1);
  }
  return rv;
}

// Stacks one unit-normalised rank column per view containing the subject.
// Views the subject is absent from contribute no column.
inline RankMatrix build_rank_matrix(const std::string& user,
                                    const std::vector<View>& views,
                                    const UserUniverse& universe) {
  RankMatrix matrix;
  matrix.subject = user;
  const std::size_t self = universe.index_of(user);
  matrix.targets.reserve(universe.size() - 1);
  for (std::size_t i = 0; i < universe.size(); ++i) {
    if (i != self) matrix.targets.push_back(universe.users()[i]);
  }
  for (const auto& view : views) {
    if (!view.is_present(user)) continue;
    auto column = rank_vector(similarity_vector(view, user), view, universe, user).ranks;
    double sq = 0.0;
    for (double r : column) sq += r * r;
    const double norm = std::sqrt(sq);
    for (double& r : column) r /= norm;
    matrix.columns.push_back(std::move(column));
  }
  if (matrix.columns.empty()) {
    throw_validation("user '" + user + "' is unrankable: present in no view");
  }
  return matrix;
}

// Leading left singular vector of the matrix whose columns are given, by
// power iteration on v -> M(M^T v). Deterministic all-ones start; converged
// when successive unit iterates differ by less than tol in Euclidean norm.
inline PowerIterationResult leading_left_singular_vector(
    const std::vector<std::vector<double>>& columns,
    const PowerIterationOptions& options = {}) {
  if (columns.empty()) throw_validation("matrix has no columns");
  const std::size_t rows = columns.front().size();
  if (rows == 0) throw_validation("matrix has no rows");
  for (const auto& column : columns) {
    if (column.size() != rows) {
      throw_validation("matrix columns have inconsistent lengths");
    }
    for (double value : column) {
      if (!std::isfinite(value)) throw_numeric("matrix contains NaN or Inf");
    }
  }
  if (!(options.tol > 0.0)) throw_validation("power iteration tol must be > 0");
  if (options.max_iters < 1) throw_validation("power iteration needs max_iters >= 1");

  PowerIterationResult result;
  std::vector<double>& v = result.vector;
  v.assign(rows, 1.0 / std::sqrt(static_cast<double>(rows)));
  std::vector<double> next(rows);

  for (int iter = 1; iter <= options.max_iters; ++iter) {
    std::fill(next.begin(), next.end(), 0.0);
    for (const auto& column : columns) {
      double projection = 0.0;
      for (std::size_t r = 0; r < rows; ++r) projection += column[r] * v[r];
      for (std::size_t r = 0; r < rows; ++r) next[r] += projection * column[r];
    }
    double sq = 0.0;
    for (double value : next) sq += value * value;
    const double norm = std::sqrt(sq);
    if (norm == 0.0 || !std::isfinite(norm)) {
      throw_numeric("power iteration collapsed to a zero or non-finite vector");
    }
    for (double& value : next) value /= norm;

    double diff_sq = 0.0;
    for (std::size_t r = 0; r < rows; ++r) {
      const double d = next[r] - v[r];
      diff_sq += d * d;
    }
    v = next;
    result.iterations = iter;
    if (std::sqrt(diff_sq) < options.tol) {
      result.converged = true;
      break;
    }
  }

  // Sign canonicalisation: the Perron direction of a positive matrix is
  // entrywise positive, so orient the dominant entry positive.
  double dominant = 0.0;
  for (double value : v) {
    if (std::abs(value) > std::abs(dominant)) dominant = value;
  }
  if (dominant < 0.0) {
    for (double& value : v) value = -value;
  }
  return result;
}

struct AggregatedRanking {
  std::vector<std::string> order;  // all n-1 targets, best first
  bool converged = true;
};

// Full consensus ordering of the subject's targets: ascending singular-vector
// entry, near-ties (within kEntryTieThreshold) by ascending universe index.
inline AggregatedRanking aggregate_ranking(const RankMatrix& matrix,
                                           const PowerIterationOptions& options = {}) {
  auto spectral = leading_left_singular_vector(matrix.columns, options);
  const std::vector<double>& entries = spectral.vector;

  std::vector<std::size_t> order(entries.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  // targets are already in universe order, so position doubles as the
  // universe tie-break
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (entries[a] != entries[b]) return entries[a] < entries[b];
    return a < b;
  });
  // Group runs of near-equal entries and settle each run by position.
  std::size_t run_start = 0;
  for (std::size_t i = 1; i <= order.size(); ++i) {
    if (i == order.size() ||
        entries[order[i]] - entries[order[i - 1]] > kEntryTieThreshold) {
      if (i - run_start > 1) {
        std::sort(order.begin() + run_start, order.begin() + i);
      }
      run_start = i;
    }
  }

  AggregatedRanking ranking;
  ranking.converged = spectral.converged;
  ranking.order.reserve(order.size());
  for (std::size_t index : order) ranking.order.push_back(matrix.targets[index]);
  return ranking;
}

// The min(k, n-1) best-ranked users of the consensus ordering.
inline std::vector<std::string> aggregate_neighbour_set(
    const RankMatrix& matrix, int k, const PowerIterationOptions& options = {}) {
  if (k < 1) throw_validation("k must be at least 1, got " + std::to_string(k));
  auto ranking = aggregate_ranking(matrix, options);
  if (ranking.order.size() > static_cast<std::size_t>(k)) {
    ranking.order.resize(static_cast<std::size_t>(k));
  }
  return ranking.order;
}

// Full consensus orderings for every universe user. Pure per-user work mapped
// over an optional thread pool; output is scheduling independent.
inline std::vector<AggregatedRanking> all_aggregated_rankings(
    const std::vector<View>& views, const UserUniverse& universe,
    unsigned threads = 1, const PowerIterationOptions& options = {}) {
  std::vector<AggregatedRanking> rankings(universe.size());
  parallel_for(universe.size(), threads, [&](std::size_t i) {
    const std::string& user = universe.users()[i];
    try {
      rankings[i] = aggregate_ranking(build_rank_matrix(user, views, universe), options);
    } catch (const Error& e) {
      throw Error(e.kind(), "user '" + user + "': " + e.what());
    }
  });
  return rankings;
}

inline NeighbourSets all_neighbour_sets(const std::vector<View>& views,
                                        const UserUniverse& universe, int k,
                                        unsigned threads = 1,
                                        const PowerIterationOptions& options = {}) {
  if (k < 1) throw_validation("k must be at least 1, got " + std::to_string(k));
  auto rankings = all_aggregated_rankings(views, universe, threads, options);
  std::vector<std::vector<std::string>> lists;
  lists.reserve(rankings.size());
  std::size_t non_converged = 0;
  for (auto& ranking : rankings) {
    if (!ranking.converged) ++non_converged;
    if (ranking.order.size() > static_cast<std::size_t>(k)) {
      ranking.order.resize(static_cast<std::size_t>(k));
    }
    lists.push_back(std::move(ranking.order));
  }
  return NeighbourSets(k, universe.users(), std::move(lists), non_converged);
}

}  // namespace viewfuse
