#include "neardup/report.hpp"

#include <algorithm>
#include <utility>

#include "neardup/errors.hpp"

namespace neardup {

DuplicationReport::DuplicationReport(std::vector<DocId> universe,
                                     std::vector<std::vector<DocId>> groups)
    : universe_(std::move(universe)), groups_(std::move(groups)) {
  std::sort(universe_.begin(), universe_.end());
  auto dup = std::adjacent_find(universe_.begin(), universe_.end());
  if (dup != universe_.end()) {
    throw DataError("duplicate id in universe: \"" + *dup + "\"");
  }

  for (auto& group : groups_) {
    std::sort(group.begin(), group.end());
    group.erase(std::unique(group.begin(), group.end()), group.end());
    if (group.size() < 2) {
      throw DataError("duplicate group must have at least 2 distinct members" +
                      (group.empty() ? std::string{}
                                     : ", got [\"" + group.front() + "\"]"));
    }
  }
  std::sort(groups_.begin(), groups_.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });

  membership_.reserve(num_duplicated_files());
  for (std::size_t g = 0; g < groups_.size(); ++g) {
    for (const auto& id : groups_[g]) {
      if (!std::binary_search(universe_.begin(), universe_.end(), id)) {
        throw DataError("group member \"" + id + "\" is not in the universe");
      }
      if (!membership_.emplace(id, g).second) {
        throw DataError("id \"" + id + "\" appears in more than one group");
      }
    }
  }
}

DuplicationReport DuplicationReport::from_groups(
    std::vector<std::vector<DocId>> groups) {
  std::vector<DocId> universe;
  for (const auto& group : groups) {
    universe.insert(universe.end(), group.begin(), group.end());
  }
  std::sort(universe.begin(), universe.end());
  // Overlaps are reported by the constructor rather than silently merged.
  auto overlap = std::adjacent_find(universe.begin(), universe.end());
  if (overlap != universe.end()) {
    throw DataError("id \"" + *overlap + "\" appears in more than one group");
  }
  return DuplicationReport(std::move(universe), std::move(groups));
}

std::size_t DuplicationReport::num_duplicated_files() const {
  std::size_t total = 0;
  for (const auto& group : groups_) total += group.size();
  return total;
}

std::size_t DuplicationReport::num_unique() const {
  return universe_.size() - num_duplicated_files() + groups_.size();
}

bool DuplicationReport::contains(const DocId& id) const {
  return std::binary_search(universe_.begin(), universe_.end(), id);
}

std::optional<std::size_t> DuplicationReport::group_index(
    const DocId& id) const {
  auto it = membership_.find(id);
  if (it == membership_.end()) return std::nullopt;
  return it->second;
}

std::size_t DuplicationReport::group_size_of(const DocId& id) const {
  auto g = group_index(id);
  return g ? groups_[*g].size() : 1;
}

}  // namespace neardup
