#pragma once

// Deterministic random multi-view instances for property and oracle tests.
// User ids are zero-padded so lexicographic universe order equals numeric
// order, which keeps tie-break expectations easy to state.

#include <map>
#include <string>
#include <vector>

#include "viewfuse/rng.hpp"
#include "viewfuse/universe.hpp"
#include "viewfuse/view.hpp"

namespace testinst {

inline std::string user_name(std::size_t index) {
  std::string digits = std::to_string(index);
  return "u" + std::string(digits.size() < 2 ? 2 - digits.size() : 0, '0') + digits;
}

inline std::vector<std::string> user_names(std::size_t n) {
  std::vector<std::string> names(n);
  for (std::size_t i = 0; i < n; ++i) names[i] = user_name(i);
  return names;
}

// A feature view over a random subset of `users`. Mixes binary and weighted
// profiles, small feature pools (to provoke ties) and the occasional empty
// profile.
inline viewfuse::View random_view(viewfuse::Rng& rng,
                                  const std::vector<std::string>& users,
                                  const std::string& id) {
  const std::size_t n = users.size();
  const std::size_t present = 2 + rng.below(n - 1);  // [2, n]
  const bool binary = rng.bernoulli(0.4);
  const std::uint64_t pool = binary ? 8 : 16;

  viewfuse::ProfileMap profiles;
  for (std::size_t index : rng.sample_without_replacement(n, present)) {
    auto& features = profiles[users[index]];
    if (rng.bernoulli(0.05)) continue;  // empty profile, legal
    const int draws = 1 + static_cast<int>(rng.below(6));
    for (int d = 0; d < draws; ++d) {
      const std::string feature = "f" + std::to_string(rng.below(pool));
      features[feature] += binary ? 1.0 : 0.25 + rng.unit();
    }
  }
  return viewfuse::View(id, viewfuse::Provenance::features,
                        binary ? viewfuse::Weighting::binary
                               : viewfuse::Weighting::weighted,
                        profiles);
}

struct Instance {
  std::vector<viewfuse::View> views;
  viewfuse::UserUniverse universe;
};

inline Instance random_instance(viewfuse::Rng& rng, std::size_t max_n = 30,
                                std::size_t max_l = 5) {
  const std::size_t n = 2 + rng.below(max_n - 1);
  const std::size_t l = 1 + rng.below(max_l);
  const auto users = user_names(n);
  std::vector<viewfuse::View> views;
  views.reserve(l);
  for (std::size_t j = 0; j < l; ++j) {
    views.push_back(random_view(rng, users, "view" + std::to_string(j)));
  }
  viewfuse::UserUniverse universe = viewfuse::make_universe(views);
  return Instance{std::move(views), std::move(universe)};
}

}  // namespace testinst
