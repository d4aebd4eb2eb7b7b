#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace neardup {

using DocId = std::string;

/// The set of analyzed files together with their near-duplicate groups.
///
/// Stored canonically: the universe is sorted, every group is sorted, and
/// groups are ordered by their smallest member. Two reports describing the
/// same partition therefore compare equal.
class DuplicationReport {
 public:
  DuplicationReport() = default;

  /// Throws DataError when a group has fewer than two members, two groups
  /// overlap, a member is missing from the universe, or the universe lists
  /// an id twice.
  DuplicationReport(std::vector<DocId> universe,
                    std::vector<std::vector<DocId>> groups);

  /// Universe is the union of the group members.
  static DuplicationReport from_groups(std::vector<std::vector<DocId>> groups);

  const std::vector<DocId>& universe() const { return universe_; }
  const std::vector<std::vector<DocId>>& groups() const { return groups_; }

  std::size_t num_files() const { return universe_.size(); }
  std::size_t num_groups() const { return groups_.size(); }
  /// Number of distinct items |X|: groups plus singletons.
  std::size_t num_unique() const;
  /// Files that belong to some group.
  std::size_t num_duplicated_files() const;

  bool contains(const DocId& id) const;
  std::optional<std::size_t> group_index(const DocId& id) const;
  /// Size of the group holding `id`, 1 for singletons.
  std::size_t group_size_of(const DocId& id) const;

  friend bool operator==(const DuplicationReport& a,
                         const DuplicationReport& b) {
    return a.universe_ == b.universe_ && a.groups_ == b.groups_;
  }

 private:
  std::vector<DocId> universe_;
  std::vector<std::vector<DocId>> groups_;
  std::unordered_map<DocId, std::size_t> membership_;
};

}  // namespace neardup
