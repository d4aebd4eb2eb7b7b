#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "neardup/corpus_io.hpp"
#include "neardup/threshold.hpp"

namespace neardup {

using TokenId = std::uint32_t;

/// Interns token lexemes into dense ids. Fingerprints that are compared with
/// each other must come from the same Vocabulary. Not thread-safe for
/// interning; lookups are safe once interning has finished.
class Vocabulary {
 public:
  TokenId intern(std::string_view lexeme);
  std::optional<TokenId> find(std::string_view lexeme) const;
  const std::string& lexeme(TokenId id) const { return lexemes_.at(id); }
  std::size_t size() const { return lexemes_.size(); }

 private:
  std::unordered_map<std::string, TokenId> ids_;
  std::vector<std::string> lexemes_;
};

struct TokenCount {
  TokenId token = 0;
  std::uint32_t count = 0;

  friend bool operator==(const TokenCount&, const TokenCount&) = default;
};

/// Detection thresholds. Defaults: t0 = 0.8 on the distinct-token set,
/// t1 = 0.7 on the token multiset, and files below 20 tokens are excluded.
struct DetectionParams {
  Threshold t0{4, 5};
  Threshold t1{7, 10};
  std::size_t min_tokens = 20;

  /// Throws UsageError when min_tokens is zero.
  void validate() const;
};

/// The token multiset T1 of one document, stored as (token, multiplicity)
/// sorted by token id. Its support is the distinct-token set T0.
class Fingerprint {
 public:
  /// Throws UsageError if `counts` is not strictly sorted by token or holds a
  /// zero multiplicity.
  Fingerprint(DocId doc_id, std::vector<TokenCount> counts);

  const DocId& doc_id() const { return doc_id_; }
  std::span<const TokenCount> counts() const { return counts_; }
  /// |T0|
  std::size_t distinct() const { return counts_.size(); }
  /// n, the total token count (sum of multiplicities).
  std::uint64_t total() const { return total_; }

 private:
  DocId doc_id_;
  std::vector<TokenCount> counts_;
  std::uint64_t total_ = 0;
};

/// A document excluded from detection because it has fewer than
/// `min_tokens` tokens.
struct Undersized {
  DocId doc_id;
  std::uint64_t n = 0;

  friend bool operator==(const Undersized&, const Undersized&) = default;
};

std::variant<Fingerprint, Undersized> build_fingerprint(
    const TokenDocument& doc, const DetectionParams& params, Vocabulary& vocab);

/// Intersection sizes of two fingerprints: |T0_i ∩ T0_j| and
/// sum_t min(T1_i(t), T1_j(t)).
struct Overlap {
  std::uint64_t shared_distinct = 0;
  std::uint64_t shared_total = 0;
};
Overlap overlap(const Fingerprint& a, const Fingerprint& b);

// Jaccard similarity; J(empty, empty) = 1.
double jaccard_set(const Fingerprint& a, const Fingerprint& b);
double jaccard_multiset(const Fingerprint& a, const Fingerprint& b);
double jaccard_set(const std::set<std::string>& a,
                   const std::set<std::string>& b);
/// sum min / sum max over multiplicities.
double jaccard_multiset(const std::map<std::string, std::uint64_t>& a,
                        const std::map<std::string, std::uint64_t>& b);

/// Both similarities reach their thresholds (inclusive). Decided on exact
/// integer counts.
bool is_near_duplicate(const Fingerprint& a, const Fingerprint& b,
                       const DetectionParams& params);

}  // namespace neardup
