#include <set>

#include <gtest/gtest.h>

#include "neardup/analysis.hpp"
#include "neardup/bias_lab.hpp"
#include "neardup/detector.hpp"
#include "neardup/errors.hpp"

using namespace neardup;

namespace {

LabGenConfig small_config(std::uint64_t seed) {
  LabGenConfig cfg;
  cfg.seed = seed;
  cfg.n_base = 100;
  cfg.vocab_size = 20000;
  cfg.dup_rate = 0.3;
  return cfg;
}

std::vector<std::string> numbered(const std::string& prefix, std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

}  // namespace

TEST(GenerateCorpus, NoDuplicationRate) {
  auto cfg = small_config(1);
  cfg.dup_rate = 0.0;
  auto corpus = generate_corpus(cfg);
  EXPECT_EQ(corpus.docs.size(), 100u);
  EXPECT_TRUE(corpus.truth.groups().empty());
  EXPECT_EQ(duplication_factor(corpus.truth), 0.0);
}

TEST(GenerateCorpus, SizeNearExpectation) {
  // 30 duplicated bases with 2 extra copies on average: |D| = 160 and
  // d = 60/160 in expectation (truncation at 10 copies barely matters).
  double total_docs = 0, total_d = 0;
  const int seeds = 200;
  for (int s = 0; s < seeds; ++s) {
    auto corpus = generate_corpus(small_config(static_cast<std::uint64_t>(s)));
    EXPECT_EQ(corpus.truth.num_groups(), 30u);
    total_docs += static_cast<double>(corpus.docs.size());
    total_d += duplication_factor(corpus.truth);
  }
  EXPECT_NEAR(total_docs / seeds, 160.0, 3.0);
  EXPECT_NEAR(total_d / seeds, 60.0 / 160.0, 0.02);
}

TEST(GenerateCorpus, DeterministicAndWellFormed) {
  auto a = generate_corpus(small_config(9));
  auto b = generate_corpus(small_config(9));
  ASSERT_EQ(a.docs.size(), b.docs.size());
  for (std::size_t i = 0; i < a.docs.size(); ++i) {
    EXPECT_EQ(a.docs[i].doc.id, b.docs[i].doc.id);
    EXPECT_EQ(a.docs[i].doc.tokens, b.docs[i].doc.tokens);
    EXPECT_EQ(a.docs[i].label, b.docs[i].label);
  }
  EXPECT_EQ(a.truth, b.truth);
  EXPECT_NE(generate_corpus(small_config(10)).docs[0].doc.tokens, a.docs[0].doc.tokens);

  for (std::size_t i = 1; i < a.docs.size(); ++i) EXPECT_LT(a.docs[i - 1].doc.id, a.docs[i].doc.id);
  // Copies carry their base's label.
  for (const auto& g : a.truth.groups()) {
    int label = -1;
    for (const auto& d : a.docs) {
      if (a.truth.group_index(d.doc.id) == a.truth.group_index(g.front())) {
        if (label < 0) label = d.label;
        EXPECT_EQ(d.label, label);
      }
    }
  }
}

TEST(GenerateCorpus, RejectsInfeasibleConfigs) {
  LabGenConfig cfg;
  cfg.vocab_size = 1000;  // 201 blocks of 4 tokens cannot hold 100-token docs
  EXPECT_THROW(generate_corpus(cfg), UsageError);
  cfg = LabGenConfig{};
  cfg.dup_rate = 1.5;
  EXPECT_THROW(generate_corpus(cfg), UsageError);
  cfg = LabGenConfig{};
  cfg.n_labels = 0;
  EXPECT_THROW(generate_corpus(cfg), UsageError);
}

TEST(GenerateCorpus, DetectionRecoversPlantedGroups) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    auto cfg = small_config(seed);
    cfg.perturb_rate = 0.05;
    auto corpus = generate_corpus(cfg);
    std::vector<TokenDocument> docs;
    for (const auto& d : corpus.docs) docs.push_back(d.doc);
    EXPECT_EQ(detect(docs, DetectionParams{}).report, corpus.truth) << "seed " << seed;
  }
}

TEST(Memorizer, Examples) {
  std::vector<LabeledDocument> training{
      {{"t2", numbered("a", 30)}, 2}, {{"t1", numbered("b", 30)}, 1}, {{"t3", numbered("c", 30)}, 3}};
  EXPECT_EQ(memorizer_predict(training, {"q", numbered("b", 30)}), 1);
  // No shared tokens: every similarity is 0, smallest id wins.
  EXPECT_EQ(memorizer_predict(training, {"q", numbered("z", 30)}), 1);
  Memorizer model(training);
  EXPECT_EQ(model.nearest({"q", numbered("z", 30)}), "t1");

  auto perturbed = numbered("c", 30);
  perturbed[3] = "fresh";
  EXPECT_EQ(model.predict({"q", perturbed}), 3);
  EXPECT_EQ(model.nearest({"q", perturbed}), "t3");

  EXPECT_THROW(memorizer_predict({}, {"q", {"x"}}), UsageError);
  std::vector<LabeledDocument> repeated{{{"t", {"a"}}, 0}, {{"t", {"b"}}, 1}};
  EXPECT_THROW(Memorizer{repeated}, UsageError);
}

TEST(Memorizer, TiesGoToSmallestId) {
  // q = {a, b}; t_b = {a}, t_a = {b}: both J = 1/2.
  std::vector<LabeledDocument> training{{{"tb", {"a"}}, 7}, {{"ta", {"b"}}, 4}};
  EXPECT_EQ(memorizer_predict(training, {"q", {"a", "b"}}), 4);
}

TEST(RunExperiment, NoDuplicatesMakesVariantsCoincide) {
  auto cfg = small_config(5);
  cfg.dup_rate = 0.0;
  auto r = run_experiment(cfg, 0.5, 0.1, 5);
  EXPECT_EQ(r.d, 0.0);
  EXPECT_EQ(r.unbiased_test_acc, r.cross_set_biased_acc);
  EXPECT_EQ(r.unbiased_test_acc, r.fully_biased_acc);
  EXPECT_EQ(r.unbiased_test_acc, r.fully_unbiased_acc);
  EXPECT_FALSE(r.cross_set_subset_acc.has_value());
}

TEST(RunExperiment, ExactCopiesAreAlwaysRecalled) {
  for (std::uint64_t seed : {1u, 2u, 3u, 4u}) {
    auto cfg = small_config(seed);
    cfg.perturb_rate = 0.0;
    auto r = run_experiment(cfg, 0.5, 0.1, seed);
    ASSERT_TRUE(r.cross_set_subset_acc.has_value());
    EXPECT_EQ(*r.cross_set_subset_acc, 1.0);
  }
}

TEST(RunExperiment, AccuraciesInRangeAndDeterministic) {
  LabGenConfig cfg;
  cfg.seed = 7;
  auto a = run_experiment(cfg, 0.5, 0.1, 7);
  auto b = run_experiment(cfg, 0.5, 0.1, 7, 4);
  for (double acc : {a.fully_unbiased_acc, a.unbiased_test_acc, a.cross_set_biased_acc, a.fully_biased_acc}) {
    EXPECT_GE(acc, 0.0);
    EXPECT_LE(acc, 1.0);
  }
  EXPECT_GT(a.cross_set_biased_acc, a.unbiased_test_acc);
  EXPECT_EQ(a.fully_unbiased_acc, b.fully_unbiased_acc);
  EXPECT_EQ(a.unbiased_test_acc, b.unbiased_test_acc);
  EXPECT_EQ(a.cross_set_biased_acc, b.cross_set_biased_acc);
  EXPECT_EQ(a.fully_biased_acc, b.fully_biased_acc);
  EXPECT_EQ(a.d, b.d);
  EXPECT_GE(a.no_dups_size, 1u);
  EXPECT_LE(a.no_dups_size, a.cross_set_only_size);
  EXPECT_LE(a.cross_set_only_size, a.all_dups_size);
}

TEST(RunExperiment, RejectsBadFractionsAndEmptyVariants) {
  LabGenConfig cfg;
  EXPECT_THROW(run_experiment(cfg, 0.0, 0.1, 1), UsageError);
  EXPECT_THROW(run_experiment(cfg, 0.6, 0.4, 1), UsageError);
  LabGenConfig tiny;
  tiny.n_base = 1;
  tiny.dup_rate = 0.0;
  tiny.vocab_size = 1000;
  // One file cannot fill both a training fold and a test fold.
  EXPECT_THROW(run_experiment(tiny, 0.5, 0.1, 3), DataError);
}
