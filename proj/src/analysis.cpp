#include "neardup/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "neardup/errors.hpp"

namespace neardup {

namespace {

void require_nonempty(const DuplicationReport& report) {
  if (report.num_files() == 0) {
    throw DataError("duplication statistics are undefined for an empty corpus");
  }
}

void require_fraction(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw UsageError("train fraction must lie strictly between 0 and 1, got " +
                     std::to_string(p));
  }
}

// Fold of every universe id, in universe order.
std::vector<Fold> folds_of_universe(const DuplicationReport& report,
                                    const SplitAssignment& split) {
  std::vector<Fold> folds;
  folds.reserve(report.num_files());
  std::vector<DocId> missing;
  for (const auto& id : report.universe()) {
    auto it = split.find(id);
    if (it == split.end()) {
      missing.push_back(id);
      folds.push_back(Fold::validation);
    } else {
      folds.push_back(it->second);
    }
  }
  if (!missing.empty()) {
    std::string msg = std::to_string(missing.size()) +
                      " analyzed file(s) have no fold in the split:";
    for (std::size_t i = 0; i < missing.size() && i < 10; ++i) {
      msg += " \"" + missing[i] + "\"";
    }
    throw DataError(msg);
  }
  return folds;
}

struct GroupFolds {
  std::vector<DocId> train;
  std::vector<DocId> test;
};

std::vector<GroupFolds> split_groups(const DuplicationReport& report,
                                     const SplitAssignment& split) {
  folds_of_universe(report, split);  // validates coverage
  std::vector<GroupFolds> result(report.num_groups());
  for (std::size_t g = 0; g < report.num_groups(); ++g) {
    for (const auto& id : report.groups()[g]) {
      switch (split.at(id)) {
        case Fold::train:
          result[g].train.push_back(id);
          break;
        case Fold::test:
          result[g].test.push_back(id);
          break;
        case Fold::validation:
          break;
      }
    }
  }
  return result;
}

}  // namespace

double duplication_factor(const DuplicationReport& report) {
  require_nonempty(report);
  return static_cast<double>(report.num_files() - report.num_unique()) /
         static_cast<double>(report.num_files());
}

GroupSizeStats group_size_stats(const DuplicationReport& report) {
  if (report.num_groups() == 0) {
    throw DataError("group size statistics need at least one duplicate group");
  }
  std::vector<std::size_t> sizes;
  sizes.reserve(report.num_groups());
  for (const auto& group : report.groups()) sizes.push_back(group.size());
  std::sort(sizes.begin(), sizes.end());
  std::size_t total = 0;
  for (auto s : sizes) total += s;
  return {static_cast<double>(total) / static_cast<double>(sizes.size()),
          static_cast<double>(sizes[(sizes.size() - 1) / 2])};
}

double expected_cross_set_fraction(const DuplicationReport& report,
                                   double train_fraction) {
  require_fraction(train_fraction);
  require_nonempty(report);
  const double q = 1.0 - train_fraction;
  double sum = 0.0;
  for (const auto& group : report.groups()) {
    double c = static_cast<double>(group.size());
    sum += c * (1.0 - std::pow(q, c - 1.0));
  }
  return sum / static_cast<double>(report.num_files());
}

double monte_carlo_cross_set(const DuplicationReport& report,
                             double train_fraction, std::size_t trials,
                             std::uint64_t seed) {
  require_fraction(train_fraction);
  require_nonempty(report);
  if (trials == 0) throw UsageError("trials must be at least 1");
  if (report.num_groups() == 0) return 0.0;

  // rng() < cut  <=>  train, with probability train_fraction.
  const auto cut = static_cast<std::uint64_t>(std::ldexp(train_fraction, 64));
  const std::size_t singletons = report.num_files() - report.num_duplicated_files();
  std::mt19937_64 rng(seed);

  std::uint64_t cross_total = 0;
  std::uint64_t test_total = 0;
  std::size_t done = 0;
  while (done < trials) {
    std::uint64_t cross = 0;
    std::uint64_t test = 0;
    for (const auto& group : report.groups()) {
      std::size_t in_train = 0;
      for (std::size_t k = 0; k < group.size(); ++k) {
        if (rng() < cut) ++in_train;
      }
      std::size_t in_test = group.size() - in_train;
      test += in_test;
      if (in_train > 0) cross += in_test;
    }
    for (std::size_t k = 0; k < singletons; ++k) {
      if (rng() >= cut) ++test;
    }
    if (test == 0) continue;  // empty test fold: resample
    cross_total += cross;
    test_total += test;
    ++done;
  }
  return static_cast<double>(cross_total) / static_cast<double>(test_total);
}

CorpusStats corpus_stats(const DuplicationReport& report, double train_fraction) {
  CorpusStats stats;
  stats.num_files = report.num_files();
  stats.num_groups = report.num_groups();
  stats.duplication_factor = duplication_factor(report);
  if (report.num_groups() > 0) {
    auto sizes = group_size_stats(report);
    stats.group_size_mean = sizes.mean;
    stats.group_size_median = sizes.median;
  }
  stats.train_fraction = train_fraction;
  stats.expected_cross_set_fraction =
      expected_cross_set_fraction(report, train_fraction);
  return stats;
}

SplitAudit audit_split(const DuplicationReport& report,
                       const SplitAssignment& split) {
  auto folds = folds_of_universe(report, split);
  SplitAudit audit;
  for (const auto& group : split_groups(report, split)) {
    if (group.train.size() >= 2) {
      audit.in_train.insert(audit.in_train.end(), group.train.begin(),
                            group.train.end());
    }
    if (group.test.size() >= 2) {
      audit.in_test.insert(audit.in_test.end(), group.test.begin(),
                           group.test.end());
    }
    if (!group.train.empty()) {
      audit.cross_set.insert(audit.cross_set.end(), group.test.begin(),
                             group.test.end());
    }
  }
  std::sort(audit.in_train.begin(), audit.in_train.end());
  std::sort(audit.in_test.begin(), audit.in_test.end());
  std::sort(audit.cross_set.begin(), audit.cross_set.end());

  auto test_files = std::count(folds.begin(), folds.end(), Fold::test);
  audit.test_cross_set_fraction =
      test_files == 0 ? 0.0
                      : static_cast<double>(audit.cross_set.size()) /
                            static_cast<double>(test_files);
  return audit;
}

std::string_view variant_name(TestVariant variant) {
  switch (variant) {
    case TestVariant::no_dups:
      return "no_dups";
    case TestVariant::cross_set_only:
      return "cross_set_only";
    case TestVariant::all_dups:
      return "all_dups";
  }
  return "?";
}

std::optional<TestVariant> parse_variant(std::string_view name) {
  for (auto v : {TestVariant::no_dups, TestVariant::cross_set_only,
                 TestVariant::all_dups}) {
    if (variant_name(v) == name) return v;
  }
  return std::nullopt;
}

std::vector<DocId> derive_test_variant(const DuplicationReport& report,
                                       const SplitAssignment& split,
                                       TestVariant variant) {
  auto groups = split_groups(report, split);
  std::vector<DocId> selected;
  for (const auto& [id, fold] : split) {
    if (fold == Fold::test && !report.group_index(id)) selected.push_back(id);
  }
  for (const auto& group : groups) {
    if (group.test.empty()) continue;
    const bool has_train_mate = !group.train.empty();
    switch (variant) {
      case TestVariant::all_dups:
        selected.insert(selected.end(), group.test.begin(), group.test.end());
        break;
      case TestVariant::cross_set_only:
        if (has_train_mate) {
          selected.insert(selected.end(), group.test.begin(), group.test.end());
        } else {
          selected.push_back(group.test.front());
        }
        break;
      case TestVariant::no_dups:
        if (!has_train_mate) selected.push_back(group.test.front());
        break;
    }
  }
  std::sort(selected.begin(), selected.end());
  return selected;
}

std::vector<DocId> select_representatives(const DuplicationReport& report) {
  std::vector<DocId> keep;
  keep.reserve(report.num_unique());
  for (const auto& id : report.universe()) {
    auto g = report.group_index(id);
    if (!g || report.groups()[*g].front() == id) keep.push_back(id);
  }
  return keep;
}

}  // namespace neardup
