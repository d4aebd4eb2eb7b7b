#pragma once

#include <span>
#include <utility>
#include <vector>

#include "neardup/corpus_io.hpp"
#include "neardup/fingerprint.hpp"
#include "neardup/report.hpp"

namespace neardup {

/// Unordered pair stored as (smaller id, larger id).
using IdPair = std::pair<DocId, DocId>;

/// Strategy knobs for the all-pairs join. None of them changes the result.
struct DetectOptions {
  /// Worker threads for the pair scan; 0 means one per hardware thread.
  unsigned jobs = 1;
  /// Skip pairs whose size ratios already rule out a match.
  bool size_pruning = true;
  /// Generate candidates from an inverted index over each document's rarest
  /// tokens (prefix filtering) instead of scanning every pair.
  bool token_index = true;
};

/// False only when the pair cannot pass is_near_duplicate:
/// J_set <= min/max of distinct counts, J_multiset <= min/max of totals.
bool candidate_admissible(const Fingerprint& a, const Fingerprint& b,
                          const DetectionParams& params);

/// All near-duplicate pairs, each as (min id, max id), sorted. Fingerprints
/// must share one Vocabulary and have unique ids. The output does not depend
/// on `options`.
std::vector<IdPair> detect_pairs(std::span<const Fingerprint> fingerprints,
                                 const DetectionParams& params,
                                 const DetectOptions& options = {});

/// Connected components (size >= 2) of the pair graph. Throws DataError when
/// a pair endpoint is not in `universe`.
DuplicationReport cluster(std::span<const IdPair> pairs,
                          std::vector<DocId> universe);

struct Detection {
  DuplicationReport report;
  /// In input order.
  std::vector<Undersized> undersized;
};

/// fingerprint -> detect_pairs -> cluster. The universe is the set of
/// documents that met the size floor. Throws DataError on duplicate ids.
Detection detect(std::span<const TokenDocument> corpus,
                 const DetectionParams& params,
                 const DetectOptions& options = {});

}  // namespace neardup
