#include "neardup/bias_lab.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "neardup/analysis.hpp"
#include "neardup/detector.hpp"
#include "neardup/errors.hpp"

namespace neardup {

namespace {

__extension__ using u128 = unsigned __int128;

// Draws built directly on the engine's output so that a seed produces the
// same corpus on every standard library.
class LabRng {
 public:
  explicit LabRng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  std::size_t below(std::size_t n) {
    return static_cast<std::size_t>(
        (static_cast<u128>(engine_()) * n) >> 64);
  }

  // First k entries become a uniform random k-subset of `items`.
  template <typename T>
  void partial_shuffle(std::vector<T>& items, std::size_t k) {
    for (std::size_t i = 0; i < k && i < items.size(); ++i) {
      std::swap(items[i], items[i + below(items.size() - i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

std::string padded(std::size_t value, int width) {
  std::string digits = std::to_string(value);
  if (static_cast<int>(digits.size()) < width) {
    digits.insert(0, static_cast<std::size_t>(width) - digits.size(), '0');
  }
  return digits;
}

std::size_t num_blocks(const LabGenConfig& cfg) { return cfg.n_base + 1; }

double accuracy(const Memorizer& model, std::span<const DocId> ids,
                const std::unordered_map<DocId, const LabeledDocument*>& by_id) {
  if (ids.empty()) return 0.0;
  std::size_t correct = 0;
  for (const auto& id : ids) {
    const LabeledDocument& doc = *by_id.at(id);
    if (model.predict(doc.doc) == doc.label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(ids.size());
}

}  // namespace

void LabGenConfig::validate() const {
  auto in_unit = [](double x) { return x >= 0.0 && x <= 1.0; };
  if (n_base == 0) throw UsageError("n_base must be positive");
  if (doc_len == 0) throw UsageError("doc_len must be positive");
  if (n_labels == 0) throw UsageError("n_labels must be positive");
  if (!in_unit(dup_rate)) throw UsageError("dup_rate must lie in [0, 1]");
  if (!in_unit(perturb_rate)) throw UsageError("perturb_rate must lie in [0, 1]");
  if (!(common_fraction >= 0.0 && common_fraction < 1.0)) {
    throw UsageError("common_fraction must lie in [0, 1)");
  }
  if (!(mean_extra_copies >= 1.0) || !std::isfinite(mean_extra_copies)) {
    throw UsageError("mean_extra_copies must be at least 1");
  }
  if (max_extra_copies == 0) throw UsageError("max_extra_copies must be positive");
  if (vocab_size / num_blocks(*this) < doc_len) {
    throw UsageError("vocab_size " + std::to_string(vocab_size) +
                     " is too small to separate " + std::to_string(n_base) +
                     " base documents of " + std::to_string(doc_len) +
                     " tokens; need at least " +
                     std::to_string(num_blocks(*this) * doc_len));
  }
}

LabCorpus generate_corpus(const LabGenConfig& cfg) {
  cfg.validate();
  LabRng rng(cfg.seed);
  const std::size_t block = cfg.vocab_size / num_blocks(cfg);
  const int id_width = static_cast<int>(std::to_string(cfg.n_base - 1).size());
  const std::size_t num_perturbed = static_cast<std::size_t>(
      std::llround(cfg.perturb_rate * static_cast<double>(cfg.doc_len)));

  std::vector<std::size_t> bases(cfg.n_base);
  std::iota(bases.begin(), bases.end(), std::size_t{0});
  const auto num_duplicated = static_cast<std::size_t>(
      std::llround(cfg.dup_rate * static_cast<double>(cfg.n_base)));
  rng.partial_shuffle(bases, num_duplicated);
  std::vector<bool> duplicated(cfg.n_base, false);
  for (std::size_t i = 0; i < num_duplicated; ++i) duplicated[bases[i]] = true;

  LabCorpus corpus;
  std::vector<std::vector<DocId>> groups;
  std::vector<std::size_t> positions(cfg.doc_len);
  for (std::size_t b = 0; b < cfg.n_base; ++b) {
    LabeledDocument base;
    base.doc.id = "b" + padded(b, id_width);
    base.label = static_cast<int>(rng.below(cfg.n_labels));
    base.doc.tokens.reserve(cfg.doc_len);
    for (std::size_t t = 0; t < cfg.doc_len; ++t) {
      bool common = cfg.common_fraction > 0.0 && rng.uniform() < cfg.common_fraction;
      std::size_t pool = common ? 0 : b + 1;
      base.doc.tokens.push_back("t" + std::to_string(pool * block + rng.below(block)));
    }
    corpus.docs.push_back(base);
    if (!duplicated[b]) continue;

    // Geometric on {1, 2, ...} with the configured mean.
    const double stop = 1.0 / cfg.mean_extra_copies;
    std::size_t copies = 1;
    while (copies < cfg.max_extra_copies && rng.uniform() >= stop) ++copies;

    std::vector<DocId> group{base.doc.id};
    for (std::size_t c = 1; c <= copies; ++c) {
      LabeledDocument copy = base;
      copy.doc.id = base.doc.id + "_c" + padded(c, 2);
      std::iota(positions.begin(), positions.end(), std::size_t{0});
      rng.partial_shuffle(positions, num_perturbed);
      for (std::size_t k = 0; k < num_perturbed; ++k) {
        copy.doc.tokens[positions[k]] = "m" + copy.doc.id + "_" + std::to_string(k);
      }
      group.push_back(copy.doc.id);
      corpus.docs.push_back(std::move(copy));
    }
    groups.push_back(std::move(group));
  }

  std::vector<DocId> universe;
  universe.reserve(corpus.docs.size());
  for (const auto& d : corpus.docs) universe.push_back(d.doc.id);
  corpus.truth = DuplicationReport(std::move(universe), std::move(groups));
  return corpus;
}

Memorizer::Memorizer(std::span<const LabeledDocument> training) {
  if (training.empty()) throw UsageError("memorizer needs at least one training document");
  std::vector<const LabeledDocument*> sorted;
  sorted.reserve(training.size());
  for (const auto& d : training) sorted.push_back(&d);
  std::sort(sorted.begin(), sorted.end(),
            [](const auto* a, const auto* b) { return a->doc.id < b->doc.id; });

  std::vector<TokenId> ids;
  for (std::uint32_t e = 0; e < sorted.size(); ++e) {
    const auto& d = *sorted[e];
    if (e > 0 && sorted[e - 1]->doc.id == d.doc.id) {
      throw UsageError("duplicate training id \"" + d.doc.id + "\"");
    }
    ids.clear();
    for (const auto& tok : d.doc.tokens) ids.push_back(vocab_.intern(tok));
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    if (postings_.size() < vocab_.size()) postings_.resize(vocab_.size());
    for (TokenId t : ids) postings_[t].push_back(e);
    entries_.push_back({d.doc.id, d.label, ids.size()});
  }
}

const DocId& Memorizer::nearest(const TokenDocument& query) const {
  std::vector<TokenId> known;
  std::vector<std::string_view> unknown;
  for (const auto& tok : query.tokens) {
    if (auto id = vocab_.find(tok)) {
      known.push_back(*id);
    } else {
      unknown.push_back(tok);
    }
  }
  std::sort(known.begin(), known.end());
  known.erase(std::unique(known.begin(), known.end()), known.end());
  std::sort(unknown.begin(), unknown.end());
  unknown.erase(std::unique(unknown.begin(), unknown.end()), unknown.end());
  const std::uint64_t query_distinct = known.size() + unknown.size();

  std::vector<std::uint32_t> shared(entries_.size(), 0);
  for (TokenId t : known) {
    for (std::uint32_t e : postings_[t]) ++shared[e];
  }

  // Compare shared/union exactly; J(empty, empty) = 1.
  std::size_t best = 0;
  std::uint64_t best_num = 0;
  std::uint64_t best_den = 1;
  for (std::size_t e = 0; e < entries_.size(); ++e) {
    std::uint64_t num = shared[e];
    std::uint64_t den = entries_[e].distinct + query_distinct - num;
    if (den == 0) {
      num = 1;
      den = 1;
    }
    if (e == 0 || num * best_den > best_num * den) {
      best = e;
      best_num = num;
      best_den = den;
    }
  }
  return entries_[best].id;
}

int Memorizer::predict(const TokenDocument& query) const {
  const DocId& id = nearest(query);
  auto it = std::lower_bound(entries_.begin(), entries_.end(), id,
                             [](const Entry& e, const DocId& key) { return e.id < key; });
  return it->label;
}

int memorizer_predict(std::span<const LabeledDocument> training,
                      const TokenDocument& query) {
  return Memorizer(training).predict(query);
}

LabResult run_experiment(const LabGenConfig& cfg, double train_fraction,
                         double valid_fraction, std::uint64_t seed,
                         unsigned jobs) {
  if (!(train_fraction > 0.0) || !(valid_fraction > 0.0) ||
      !(train_fraction + valid_fraction < 1.0)) {
    throw UsageError("train and valid fractions must be positive with sum below 1");
  }
  LabCorpus corpus = generate_corpus(cfg);

  LabRng rng(seed);
  SplitAssignment split;
  for (const auto& d : corpus.docs) {
    double u = rng.uniform();
    Fold fold = u < train_fraction                    ? Fold::train
                : u < train_fraction + valid_fraction ? Fold::validation
                                                      : Fold::test;
    split.emplace(d.doc.id, fold);
  }

  std::vector<TokenDocument> token_docs;
  token_docs.reserve(corpus.docs.size());
  for (const auto& d : corpus.docs) token_docs.push_back(d.doc);
  DetectOptions options;
  options.jobs = jobs;
  DuplicationReport report = detect(token_docs, DetectionParams{}, options).report;

  std::unordered_map<DocId, const LabeledDocument*> by_id;
  for (const auto& d : corpus.docs) by_id.emplace(d.doc.id, &d);

  std::vector<LabeledDocument> biased_training;
  std::vector<LabeledDocument> unbiased_training;
  // Deduplicated training keeps one train-fold file per group: the smallest
  // id, since docs are in id order.
  std::vector<bool> group_seen(report.num_groups(), false);
  for (const auto& d : corpus.docs) {
    if (split.at(d.doc.id) != Fold::train) continue;
    biased_training.push_back(d);
    auto g = report.group_index(d.doc.id);
    if (!g) {
      unbiased_training.push_back(d);
    } else if (!group_seen[*g]) {
      group_seen[*g] = true;
      unbiased_training.push_back(d);
    }
  }
  if (biased_training.empty() || unbiased_training.empty()) {
    throw DataError("training fold is empty; increase n_base or train_fraction");
  }

  LabResult result;
  result.num_docs = corpus.docs.size();
  result.train_size = biased_training.size();
  result.d = duplication_factor(report);

  auto no_dups = derive_test_variant(report, split, TestVariant::no_dups);
  auto cross_only = derive_test_variant(report, split, TestVariant::cross_set_only);
  auto all_dups = derive_test_variant(report, split, TestVariant::all_dups);
  for (auto [variant, ids] : {std::pair{TestVariant::no_dups, &no_dups},
                              std::pair{TestVariant::cross_set_only, &cross_only},
                              std::pair{TestVariant::all_dups, &all_dups}}) {
    if (ids->empty()) {
      throw DataError("test variant " + std::string(variant_name(variant)) +
                      " is empty; increase n_base");
    }
  }
  result.no_dups_size = no_dups.size();
  result.cross_set_only_size = cross_only.size();
  result.all_dups_size = all_dups.size();

  Memorizer biased(biased_training);
  Memorizer unbiased(unbiased_training);
  result.unbiased_test_acc = accuracy(biased, no_dups, by_id);
  result.cross_set_biased_acc = accuracy(biased, cross_only, by_id);
  result.fully_biased_acc = accuracy(biased, all_dups, by_id);
  result.fully_unbiased_acc = accuracy(unbiased, no_dups, by_id);

  auto audit = audit_split(report, split);
  if (!audit.cross_set.empty()) {
    result.cross_set_subset_acc = accuracy(biased, audit.cross_set, by_id);
  }
  return result;
}

}  // namespace neardup
