#include <cmath>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "neardup/analysis.hpp"
#include "neardup/errors.hpp"
#include "support/oracle.hpp"

using namespace neardup;
namespace nt = neardup::testing;

namespace {

std::vector<DocId> ids(const std::string& prefix, std::size_t n) {
  std::vector<DocId> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

// Ten files f0..f9 with groups {f0,f1,f2} and {f3,f4}.
DuplicationReport ten_files() {
  return DuplicationReport(ids("f", 10), {{"f0", "f1", "f2"}, {"f3", "f4"}});
}

DuplicationReport random_report(std::mt19937_64& rng, std::size_t n) {
  std::vector<DocId> universe;
  auto groups = nt::random_groups(rng, n, universe);
  return DuplicationReport(universe, groups);
}

}  // namespace

TEST(DuplicationFactor, Examples) {
  EXPECT_DOUBLE_EQ(duplication_factor(ten_files()), 0.3);
  EXPECT_DOUBLE_EQ(duplication_factor(DuplicationReport(ids("f", 5), {})), 0.0);
  EXPECT_DOUBLE_EQ(duplication_factor(DuplicationReport::from_groups({{"a", "b", "c", "d"}})), 0.75);
  EXPECT_THROW(duplication_factor(DuplicationReport()), DataError);
}

TEST(DuplicationFactor, EqualsSumOfRedundantCopies) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 500; ++trial) {
    auto report = random_report(rng, 1 + rng() % 60);
    double redundant = 0;
    for (const auto& g : report.groups()) redundant += static_cast<double>(g.size() - 1);
    EXPECT_NEAR(duplication_factor(report), redundant / static_cast<double>(report.num_files()), 1e-15);
  }
}

TEST(GroupSizeStats, Examples) {
  auto sizes = [](std::vector<std::size_t> s) {
    std::vector<std::vector<DocId>> groups;
    std::size_t next = 0;
    for (auto c : s) {
      std::vector<DocId> g;
      for (std::size_t i = 0; i < c; ++i) g.push_back("g" + std::to_string(next++));
      groups.push_back(g);
    }
    return group_size_stats(DuplicationReport::from_groups(groups));
  };
  auto a = sizes({2, 2, 6});
  EXPECT_DOUBLE_EQ(a.mean, 10.0 / 3.0);
  EXPECT_DOUBLE_EQ(a.median, 2.0);
  auto b = sizes({2});
  EXPECT_DOUBLE_EQ(b.mean, 2.0);
  EXPECT_DOUBLE_EQ(b.median, 2.0);
  EXPECT_DOUBLE_EQ(sizes({4, 2}).median, 2.0);
  EXPECT_THROW(group_size_stats(DuplicationReport(ids("f", 3), {})), DataError);
}

TEST(ExpectedCrossSet, Examples) {
  DuplicationReport pair(ids("f", 10), {{"f0", "f1"}});
  EXPECT_NEAR(expected_cross_set_fraction(pair, 0.6), 0.12, 1e-15);
  EXPECT_DOUBLE_EQ(expected_cross_set_fraction(DuplicationReport(ids("f", 4), {}), 0.6), 0.0);
  auto triple = DuplicationReport::from_groups({{"a", "b", "c"}});
  EXPECT_NEAR(expected_cross_set_fraction(triple, 0.6), 0.84, 1e-15);
  for (double p : {0.0, 1.0, -0.2, 1.5, std::nan("")}) {
    EXPECT_THROW(expected_cross_set_fraction(pair, p), UsageError) << p;
  }
}

TEST(MonteCarloCrossSet, Examples) {
  DuplicationReport pair(ids("f", 10), {{"f0", "f1"}});
  EXPECT_NEAR(monte_carlo_cross_set(pair, 0.6, 100000, 1), 0.12, 0.005);
  auto triple = DuplicationReport::from_groups({{"a", "b", "c"}});
  EXPECT_NEAR(monte_carlo_cross_set(triple, 0.6, 100000, 2), 0.84, 0.005);
  EXPECT_EQ(monte_carlo_cross_set(DuplicationReport(ids("f", 4), {}), 0.6, 1000, 3), 0.0);
  EXPECT_EQ(monte_carlo_cross_set(pair, 0.6, 5000, 42), monte_carlo_cross_set(pair, 0.6, 5000, 42));
  EXPECT_THROW(monte_carlo_cross_set(pair, 1.0, 10, 1), UsageError);
}

TEST(ExpectedCrossSet, BoundsAndPairClosedForm) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 300; ++trial) {
    auto report = random_report(rng, 2 + rng() % 50);
    double p = 0.05 + 0.9 * static_cast<double>(rng() % 1000) / 1000.0;
    double dup_frac = static_cast<double>(report.num_duplicated_files()) /
                      static_cast<double>(report.num_files());
    double e = expected_cross_set_fraction(report, p);
    EXPECT_GE(e, 0.0);
    EXPECT_LE(e, dup_frac + 1e-15);

    std::vector<std::vector<DocId>> pairs;
    for (const auto& g : report.groups()) pairs.push_back({g[0], g[1]});
    DuplicationReport paired(report.universe(), pairs);
    double paired_frac = static_cast<double>(paired.num_duplicated_files()) /
                         static_cast<double>(paired.num_files());
    EXPECT_NEAR(expected_cross_set_fraction(paired, p), p * paired_frac, 1e-12);
  }
}

TEST(ExpectedCrossSet, AgreesWithSimulationWithinThreeStandardErrors) {
  std::mt19937_64 rng(6);
  const std::size_t trials = 100000;
  const int repeats = 12;
  for (int trial = 0; trial < 4; ++trial) {
    auto report = random_report(rng, 20 + rng() % 40);
    double analytic = expected_cross_set_fraction(report, 0.6);
    // Standard error measured from independent repeats of the estimator.
    std::vector<double> runs;
    for (int r = 0; r < repeats; ++r) {
      runs.push_back(monte_carlo_cross_set(report, 0.6, trials,
                                           1000 * static_cast<std::uint64_t>(trial) + static_cast<std::uint64_t>(r)));
    }
    double mean = 0;
    for (double v : runs) mean += v / repeats;
    double var = 0;
    for (double v : runs) var += (v - mean) * (v - mean) / (repeats - 1);
    double se = std::sqrt(var);
    EXPECT_NEAR(runs.front(), analytic, 3 * se) << "trial " << trial;
    EXPECT_NEAR(mean, analytic, 3 * se / std::sqrt(static_cast<double>(repeats))) << "trial " << trial;
  }
}

TEST(CorpusStats, CarriesAllColumns) {
  auto stats = corpus_stats(ten_files(), 0.6);
  EXPECT_EQ(stats.num_files, 10u);
  EXPECT_EQ(stats.num_groups, 2u);
  EXPECT_DOUBLE_EQ(stats.duplication_factor, 0.3);
  EXPECT_DOUBLE_EQ(*stats.group_size_mean, 2.5);
  EXPECT_DOUBLE_EQ(*stats.group_size_median, 2.0);
  EXPECT_NEAR(stats.expected_cross_set_fraction, (3 * (1 - 0.16) + 2 * 0.6) / 10, 1e-15);

  auto bare = corpus_stats(DuplicationReport(ids("f", 3), {}), 0.6);
  EXPECT_FALSE(bare.group_size_mean.has_value());
  EXPECT_DOUBLE_EQ(bare.expected_cross_set_fraction, 0.0);
}

TEST(AuditSplit, Examples) {
  auto pair = DuplicationReport::from_groups({{"a1", "a2"}});
  auto a = audit_split(pair, {{"a1", Fold::train}, {"a2", Fold::test}});
  EXPECT_EQ(a.cross_set, (std::vector<DocId>{"a2"}));
  EXPECT_TRUE(a.in_train.empty());
  EXPECT_TRUE(a.in_test.empty());
  EXPECT_DOUBLE_EQ(a.test_cross_set_fraction, 1.0);

  auto triple = DuplicationReport::from_groups({{"a", "b", "c"}});
  auto b = audit_split(triple, {{"a", Fold::train}, {"b", Fold::train}, {"c", Fold::test}});
  EXPECT_EQ(b.in_train, (std::vector<DocId>{"a", "b"}));
  EXPECT_EQ(b.cross_set, (std::vector<DocId>{"c"}));
  EXPECT_TRUE(b.in_test.empty());

  DuplicationReport both(ids("f", 3), {{"f0", "f1"}});
  auto c = audit_split(both, {{"f0", Fold::test}, {"f1", Fold::test}, {"f2", Fold::train},
                              {"outside", Fold::train}});
  EXPECT_EQ(c.in_test, (std::vector<DocId>{"f0", "f1"}));
  EXPECT_TRUE(c.cross_set.empty());
  EXPECT_DOUBLE_EQ(c.test_cross_set_fraction, 0.0);

  // A test file with mates in both folds appears in two classes.
  auto mixed = DuplicationReport::from_groups({{"a", "b", "c"}});
  auto m = audit_split(mixed, {{"a", Fold::train}, {"b", Fold::test}, {"c", Fold::test}});
  EXPECT_EQ(m.in_test, (std::vector<DocId>{"b", "c"}));
  EXPECT_EQ(m.cross_set, (std::vector<DocId>{"b", "c"}));

  EXPECT_THROW(audit_split(both, {{"f0", Fold::test}}), DataError);
}

TEST(DeriveTestVariant, Examples) {
  DuplicationReport report({"a1", "a2", "c"}, {{"a1", "a2"}});
  SplitAssignment split{{"a1", Fold::train}, {"a2", Fold::test}, {"c", Fold::test}};
  EXPECT_EQ(derive_test_variant(report, split, TestVariant::no_dups), (std::vector<DocId>{"c"}));
  EXPECT_EQ(derive_test_variant(report, split, TestVariant::cross_set_only),
            (std::vector<DocId>{"a2", "c"}));
  EXPECT_EQ(derive_test_variant(report, split, TestVariant::all_dups),
            (std::vector<DocId>{"a2", "c"}));

  DuplicationReport plain(ids("f", 4), {});
  SplitAssignment s2{{"f0", Fold::test}, {"f1", Fold::train}, {"f2", Fold::test}, {"f3", Fold::validation}};
  for (auto v : {TestVariant::no_dups, TestVariant::cross_set_only, TestVariant::all_dups}) {
    EXPECT_EQ(derive_test_variant(plain, s2, v), (std::vector<DocId>{"f0", "f2"}));
  }

  DuplicationReport xy({"r", "x", "y"}, {{"x", "y"}});
  SplitAssignment s3{{"x", Fold::test}, {"y", Fold::test}, {"r", Fold::test}};
  EXPECT_EQ(derive_test_variant(xy, s3, TestVariant::no_dups), (std::vector<DocId>{"r", "x"}));
  EXPECT_EQ(derive_test_variant(xy, s3, TestVariant::cross_set_only), (std::vector<DocId>{"r", "x"}));
  EXPECT_EQ(derive_test_variant(xy, s3, TestVariant::all_dups), (std::vector<DocId>{"r", "x", "y"}));

  EXPECT_EQ(parse_variant("no_dups"), TestVariant::no_dups);
  EXPECT_EQ(parse_variant("bogus"), std::nullopt);
  EXPECT_EQ(variant_name(TestVariant::cross_set_only), "cross_set_only");
}

// Cross-set members all survive in cross_set_only while their in-test mates
// without train mates collapse.
TEST(DeriveTestVariant, CrossSetMembersKept) {
  auto report = DuplicationReport::from_groups({{"a", "b", "c", "d"}});
  SplitAssignment split{{"a", Fold::train}, {"b", Fold::test}, {"c", Fold::test}, {"d", Fold::test}};
  EXPECT_EQ(derive_test_variant(report, split, TestVariant::cross_set_only),
            (std::vector<DocId>{"b", "c", "d"}));
  EXPECT_TRUE(derive_test_variant(report, split, TestVariant::no_dups).empty());
}

TEST(DeriveTestVariant, VariantsAreNested) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 500; ++trial) {
    auto report = random_report(rng, 1 + rng() % 40);
    SplitAssignment split;
    for (const auto& id : report.universe()) split[id] = static_cast<Fold>(rng() % 3);
    auto no = derive_test_variant(report, split, TestVariant::no_dups);
    auto cross = derive_test_variant(report, split, TestVariant::cross_set_only);
    auto all = derive_test_variant(report, split, TestVariant::all_dups);
    EXPECT_TRUE(std::includes(cross.begin(), cross.end(), no.begin(), no.end()));
    EXPECT_TRUE(std::includes(all.begin(), all.end(), cross.begin(), cross.end()));
    // The unbiased variant holds no cross-set file and at most one file per group.
    auto audit = audit_split(report, split);
    std::set<std::size_t> seen_groups;
    for (const auto& id : no) {
      EXPECT_FALSE(std::binary_search(audit.cross_set.begin(), audit.cross_set.end(), id));
      if (auto g = report.group_index(id)) EXPECT_TRUE(seen_groups.insert(*g).second);
    }
  }
}

TEST(SelectRepresentatives, Examples) {
  EXPECT_EQ(select_representatives(DuplicationReport({"a", "b", "c"}, {{"b", "a"}})),
            (std::vector<DocId>{"a", "c"}));
  EXPECT_EQ(select_representatives(DuplicationReport(ids("f", 3), {})), ids("f", 3));
  EXPECT_EQ(select_representatives(DuplicationReport::from_groups({{"x2", "x1"}, {"y9", "y1"}})),
            (std::vector<DocId>{"x1", "y1"}));

  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 200; ++trial) {
    auto report = random_report(rng, 1 + rng() % 40);
    EXPECT_EQ(select_representatives(report).size(), report.num_unique());
  }
}
