#pragma once

// Ground-truth community assignments. Overlapping membership is allowed;
// users absent from the map are unassigned.

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "viewfuse/csv.hpp"
#include "viewfuse/errors.hpp"
#include "viewfuse/universe.hpp"

namespace viewfuse {

struct CommunityAssignment {
  std::map<std::string, std::set<std::string>> membership;   // user -> communities
  std::map<std::string, std::set<std::string>> communities;  // community -> members

  static CommunityAssignment from_pairs(
      const std::vector<std::pair<std::string, std::string>>& pairs) {
    CommunityAssignment assignment;
    for (const auto& [user, community] : pairs) {
      if (user.empty()) throw_validation("community membership with empty user id");
      if (community.empty()) {
        throw_validation("user '" + user + "' listed with an empty community id");
      }
      assignment.membership[user].insert(community);
      assignment.communities[community].insert(user);
    }
    return assignment;
  }

  bool assigned(const std::string& user) const {
    return membership.find(user) != membership.end();
  }

  const std::set<std::string>* communities_of(const std::string& user) const {
    auto it = membership.find(user);
    return it == membership.end() ? nullptr : &it->second;
  }

  std::string to_csv() const {
    std::string out = "user_id,community_id\n";
    for (const auto& [user, groups] : membership) {
      for (const auto& community : groups) {
        out += user;
        out += ',';
        out += community;
        out += '\n';
      }
    }
    return out;
  }
};

inline CommunityAssignment parse_communities(const std::string& text,
                                             const std::string& source) {
  auto table = csv::parse_table(text, source, {"user_id,community_id"});
  std::vector<std::pair<std::string, std::string>> pairs;
  pairs.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    if (row[0].empty() || row[1].empty()) {
      throw_validation(source + ":" + std::to_string(table.row_lines[r]) +
                       ": empty user or community id");
    }
    pairs.emplace_back(row[0], row[1]);
  }
  return CommunityAssignment::from_pairs(pairs);
}

// Loads and checks every listed member against the universe.
inline CommunityAssignment load_communities(const std::string& path,
                                            const UserUniverse& universe) {
  auto assignment = parse_communities(csv::read_file(path), path);
  for (const auto& [user, groups] : assignment.membership) {
    if (!universe.contains(user)) {
      throw_validation(path + ": ground-truth user '" + user +
                       "' is not in the universe");
    }
  }
  return assignment;
}

}  // namespace viewfuse
