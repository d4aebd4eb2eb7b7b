#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "neardup/corpus_io.hpp"
#include "neardup/report.hpp"

namespace neardup {

/// Corpus-level duplication statistics. Fractions are in [0, 1].
struct CorpusStats {
  std::size_t num_files = 0;
  std::size_t num_groups = 0;
  double duplication_factor = 0.0;
  /// Absent when the corpus has no duplicate groups.
  std::optional<double> group_size_mean;
  std::optional<double> group_size_median;
  double train_fraction = 0.6;
  double expected_cross_set_fraction = 0.0;
};

/// d = (|D| - |X|) / |D|. Throws DataError for an empty universe.
double duplication_factor(const DuplicationReport& report);

struct GroupSizeStats {
  double mean = 0.0;
  /// Lower-middle element for an even number of groups.
  double median = 0.0;
};
/// Over groups only (singletons excluded). Throws DataError without groups.
GroupSizeStats group_size_stats(const DuplicationReport& report);

/// Expected fraction of test files that have a group-mate in train when every
/// file independently lands in train with probability `train_fraction` and in
/// test otherwise: sum_g c_g (1 - q^(c_g - 1)) / |D| with q = 1 - p.
/// Throws UsageError unless 0 < p < 1, DataError for an empty universe.
double expected_cross_set_fraction(const DuplicationReport& report,
                                   double train_fraction);

/// Simulation of the same quantity: draws `trials` random train/test
/// assignments and returns (cross-set test files summed over trials) /
/// (test files summed over trials). Deterministic for a given seed.
double monte_carlo_cross_set(const DuplicationReport& report,
                             double train_fraction, std::size_t trials,
                             std::uint64_t seed);

CorpusStats corpus_stats(const DuplicationReport& report, double train_fraction);

/// Duplicated files classified by where their group-mates fall. The three
/// sets may overlap: a test file can have mates in both train and test.
struct SplitAudit {
  std::vector<DocId> in_train;   // train files with a mate in train
  std::vector<DocId> in_test;    // test files with a mate in test
  std::vector<DocId> cross_set;  // test files with a mate in train
  /// |cross_set| / |test fold within the universe|; 0 when that is empty.
  double test_cross_set_fraction = 0.0;
};

/// Split ids outside the universe are ignored. Throws DataError when a
/// universe id has no fold.
SplitAudit audit_split(const DuplicationReport& report,
                       const SplitAssignment& split);

enum class TestVariant {
  no_dups,         // unbiased test: no cross-set files, in-test groups collapsed
  cross_set_only,  // cross-set files kept, other in-test groups collapsed
  all_dups,        // the test fold as given
};
std::string_view variant_name(TestVariant variant);
std::optional<TestVariant> parse_variant(std::string_view name);

/// Test-fold ids (sorted) forming the requested evaluation set. A collapsed
/// group keeps its lexicographically smallest test member.
std::vector<DocId> derive_test_variant(const DuplicationReport& report,
                                       const SplitAssignment& split,
                                       TestVariant variant);

/// Every singleton plus the smallest id of each group, sorted. Size is |X|.
std::vector<DocId> select_representatives(const DuplicationReport& report);

}  // namespace neardup
