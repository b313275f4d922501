#pragma once

// kNN community-consistency metrics and the per-view vs. unified k-sweep.
// Works for any neighbour-producing source: an individual view's cosine kNN
// or the unified SVD aggregation.

#include <algorithm>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "viewfuse/aggregation.hpp"
#include "viewfuse/community.hpp"
#include "viewfuse/csv.hpp"
#include "viewfuse/errors.hpp"
#include "viewfuse/parallel.hpp"
#include "viewfuse/universe.hpp"
#include "viewfuse/view.hpp"

namespace viewfuse {

// Fraction of neighbours sharing at least one ground-truth community with
// the subject. Unassigned neighbours count as mismatches.
inline double user_consistency(const std::string& user,
                               const std::vector<std::string>& neighbours,
                               const CommunityAssignment& assignment) {
  const std::set<std::string>* own = assignment.communities_of(user);
  if (own == nullptr) {
    throw_validation("user '" + user + "' is unscorable: no community assignment");
  }
  if (neighbours.empty()) {
    throw_validation("user '" + user + "' has an empty neighbour list");
  }
  std::size_t matches = 0;
  for (const auto& neighbour : neighbours) {
    const std::set<std::string>* theirs = assignment.communities_of(neighbour);
    if (theirs == nullptr) continue;
    bool shared = std::any_of(theirs->begin(), theirs->end(),
                              [&](const std::string& c) { return own->count(c) > 0; });
    if (shared) ++matches;
  }
  return static_cast<double>(matches) / static_cast<double>(neighbours.size());
}

// Simple average of the per-user scores.
inline double micro_average(const std::map<std::string, double>& scores) {
  if (scores.empty()) {
    throw_validation("micro average undefined: no scorable users");
  }
  double sum = 0.0;
  for (const auto& [user, score] : scores) sum += score;
  return sum / static_cast<double>(scores.size());
}

// Per-community mean of member scores, then the unweighted mean over
// communities; small and large communities weigh equally. Overlapping users
// contribute to every community containing them; communities with no
// scorable members are skipped.
inline double macro_average(const std::map<std::string, double>& scores,
                            const CommunityAssignment& assignment) {
  double sum = 0.0;
  std::size_t counted = 0;
  for (const auto& [community, members] : assignment.communities) {
    double member_sum = 0.0;
    std::size_t member_count = 0;
    for (const auto& member : members) {
      auto it = scores.find(member);
      if (it == scores.end()) continue;
      member_sum += it->second;
      ++member_count;
    }
    if (member_count == 0) continue;
    sum += member_sum / static_cast<double>(member_count);
    ++counted;
  }
  if (counted == 0) {
    throw_validation("macro average undefined: no community has scorable members");
  }
  return sum / static_cast<double>(counted);
}

struct ConsistencyRow {
  int k;
  std::string source;  // view id or "unified"
  double micro;
  double macro;
};

struct ConsistencyReport {
  std::vector<ConsistencyRow> rows;

  std::string to_csv() const {
    std::string out = "k,source,micro,macro\n";
    for (const auto& row : rows) {
      out += std::to_string(row.k);
      out += ',';
      out += row.source;
      out += ',';
      out += csv::format_fixed(row.micro, 6);
      out += ',';
      out += csv::format_fixed(row.macro, 6);
      out += '\n';
    }
    return out;
  }
};

// Evaluates every view plus the unified aggregation for each k in
// [k_min, k_max]. Per-view scores cover that view's present, assigned users
// (neighbour lists of length min(k, view size - 1)); unified scores cover all
// assigned users. Full orderings are computed once and sliced per k.
inline ConsistencyReport consistency_sweep(const std::vector<View>& views,
                                           const UserUniverse& universe,
                                           const CommunityAssignment& assignment,
                                           int k_min, int k_max,
                                           unsigned threads = 1,
                                           const PowerIterationOptions& options = {}) {
  if (k_min < 1) throw_validation("k_min must be at least 1");
  if (k_max < k_min) throw_validation("k_max must be >= k_min");

  // Per-view full orderings for present & assigned users.
  struct ViewOrderings {
    std::vector<std::string> users;
    std::vector<std::vector<std::string>> orders;
  };
  std::vector<ViewOrderings> per_view(views.size());
  for (std::size_t v = 0; v < views.size(); ++v) {
    const View& view = views[v];
    for (const auto& user : view.present()) {
      if (assignment.assigned(user)) per_view[v].users.push_back(user);
    }
    per_view[v].orders.resize(per_view[v].users.size());
    parallel_for(per_view[v].users.size(), threads, [&](std::size_t i) {
      per_view[v].orders[i] = ranked_targets(view, universe, per_view[v].users[i]);
    });
  }

  auto unified = all_aggregated_rankings(views, universe, threads, options);

  auto truncated = [](const std::vector<std::string>& order, int k) {
    std::vector<std::string> prefix(
        order.begin(),
        order.begin() + std::min(order.size(), static_cast<std::size_t>(k)));
    return prefix;
  };

  ConsistencyReport report;
  for (int k = k_min; k <= k_max; ++k) {
    for (std::size_t v = 0; v < views.size(); ++v) {
      std::map<std::string, double> scores;
      for (std::size_t i = 0; i < per_view[v].users.size(); ++i) {
        const std::string& user = per_view[v].users[i];
        scores[user] = user_consistency(user, truncated(per_view[v].orders[i], k),
                                        assignment);
      }
      try {
        report.rows.push_back({k, views[v].id(), micro_average(scores),
                               macro_average(scores, assignment)});
      } catch (const Error& e) {
        throw Error(e.kind(), "view '" + views[v].id() + "', k=" +
                                  std::to_string(k) + ": " + e.what());
      }
    }
    std::map<std::string, double> scores;
    for (std::size_t i = 0; i < universe.size(); ++i) {
      const std::string& user = universe.users()[i];
      if (!assignment.assigned(user)) continue;
      scores[user] = user_consistency(user, truncated(unified[i].order, k),
                                      assignment);
    }
    try {
      report.rows.push_back({k, "unified", micro_average(scores),
                             macro_average(scores, assignment)});
    } catch (const Error& e) {
      throw Error(e.kind(),
                  "unified, k=" + std::to_string(k) + ": " + e.what());
    }
  }
  return report;
}

}  // namespace viewfuse
