#pragma once

// The ordered global user set. Universe positions are the tie-breaking
// index used everywhere downstream, so the order is part of the contract.

#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "viewfuse/errors.hpp"

namespace viewfuse {

class UserUniverse {
public:
  // Takes an explicit order; ids must be unique and non-empty, n >= 2.
  explicit UserUniverse(std::vector<std::string> users)
      : users_(std::move(users)) {
    if (users_.size() < 2) {
      throw_validation("universe needs at least 2 users, got " +
                       std::to_string(users_.size()));
    }
    index_.reserve(users_.size());
    for (std::size_t i = 0; i < users_.size(); ++i) {
      if (users_[i].empty()) {
        throw_validation("universe contains an empty user id at position " +
                         std::to_string(i));
      }
      if (!index_.emplace(users_[i], i).second) {
        throw_validation("duplicate user id '" + users_[i] + "' in universe");
      }
    }
  }

  const std::vector<std::string>& users() const { return users_; }
  std::size_t size() const { return users_.size(); }

  bool contains(const std::string& id) const {
    return index_.find(id) != index_.end();
  }

  std::size_t index_of(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) {
      throw_validation("user '" + id + "' is not in the universe");
    }
    return it->second;
  }

private:
  std::vector<std::string> users_;
  std::unordered_map<std::string, std::size_t> index_;
};

}  // namespace viewfuse
