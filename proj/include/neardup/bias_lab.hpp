#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "neardup/corpus_io.hpp"
#include "neardup/fingerprint.hpp"
#include "neardup/report.hpp"

namespace neardup {

/// Synthetic labeled corpus with planted duplicate groups.
///
/// Each base document draws its tokens from a private vocabulary block (and,
/// with probability `common_fraction` per token, from one block shared by all
/// documents). A `dup_rate` fraction of the bases receive extra copies whose
/// count follows a geometric law on {1, 2, ...} with the given mean, clamped
/// at `max_extra_copies`. Every copy replaces round(perturb_rate * doc_len)
/// token positions with lexemes that occur nowhere else, and keeps its base
/// document's label.
struct LabGenConfig {
  std::uint64_t seed = 0;
  std::size_t n_base = 200;
  std::size_t vocab_size = 100'000;
  std::size_t doc_len = 100;
  double dup_rate = 0.4;
  double mean_extra_copies = 2.0;
  std::size_t max_extra_copies = 10;
  double perturb_rate = 0.02;
  std::size_t n_labels = 10;
  double common_fraction = 0.0;

  /// Throws UsageError for out-of-range fields, including a vocabulary too
  /// small to give every base doc_len private tokens.
  void validate() const;
};

struct LabeledDocument {
  TokenDocument doc;
  int label = 0;
};

struct LabCorpus {
  /// Sorted by id; a base document's copies follow it.
  std::vector<LabeledDocument> docs;
  /// Planted groups (base plus its copies).
  DuplicationReport truth;
};

LabCorpus generate_corpus(const LabGenConfig& cfg);

/// 1-nearest-neighbour classifier by Jaccard similarity of distinct-token
/// sets. Ties go to the lexicographically smallest training id.
class Memorizer {
 public:
  /// Throws UsageError when `training` is empty or repeats an id.
  explicit Memorizer(std::span<const LabeledDocument> training);

  int predict(const TokenDocument& query) const;
  /// Id of the training document whose label predict() returns.
  const DocId& nearest(const TokenDocument& query) const;

 private:
  struct Entry {
    DocId id;
    int label;
    std::size_t distinct;
  };
  Vocabulary vocab_;
  std::vector<Entry> entries_;                       // sorted by id
  std::vector<std::vector<std::uint32_t>> postings_;  // token -> entries
};

int memorizer_predict(std::span<const LabeledDocument> training,
                      const TokenDocument& query);

struct LabResult {
  /// Deduplicated training (one train file per group), unbiased test.
  double fully_unbiased_acc = 0.0;
  /// Biased training on the three test variants.
  double unbiased_test_acc = 0.0;
  double cross_set_biased_acc = 0.0;
  double fully_biased_acc = 0.0;
  /// Biased-training accuracy restricted to cross-set test files, when any.
  std::optional<double> cross_set_subset_acc;
  /// Duplication factor of the detected report over the whole corpus.
  double d = 0.0;
  std::size_t num_docs = 0;
  std::size_t train_size = 0;
  std::size_t no_dups_size = 0;
  std::size_t cross_set_only_size = 0;
  std::size_t all_dups_size = 0;
};

/// Generates the corpus, splits files i.i.d. into train/valid/test with the
/// given fractions, runs near-duplicate detection (defaults), and scores the
/// memorizer on every test variant. Validation files are held out of
/// training. Throws UsageError for bad fractions and DataError when a test
/// variant or the deduplicated training set comes out empty.
LabResult run_experiment(const LabGenConfig& cfg, double train_fraction,
                         double valid_fraction, std::uint64_t seed,
                         unsigned jobs = 1);

}  // namespace neardup
