#include "neardup/fingerprint.hpp"

#include <algorithm>
#include <utility>

#include "neardup/errors.hpp"

namespace neardup {

TokenId Vocabulary::intern(std::string_view lexeme) {
  auto [it, inserted] =
      ids_.try_emplace(std::string(lexeme), static_cast<TokenId>(lexemes_.size()));
  if (inserted) lexemes_.emplace_back(lexeme);
  return it->second;
}

std::optional<TokenId> Vocabulary::find(std::string_view lexeme) const {
  auto it = ids_.find(std::string(lexeme));
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

void DetectionParams::validate() const {
  if (min_tokens == 0) throw UsageError("min_tokens must be positive");
}

Fingerprint::Fingerprint(DocId doc_id, std::vector<TokenCount> counts)
    : doc_id_(std::move(doc_id)), counts_(std::move(counts)) {
  for (std::size_t i = 0; i < counts_.size(); ++i) {
    if (counts_[i].count == 0) {
      throw UsageError("fingerprint multiplicities must be positive");
    }
    if (i > 0 && counts_[i - 1].token >= counts_[i].token) {
      throw UsageError("fingerprint tokens must be strictly increasing");
    }
    total_ += counts_[i].count;
  }
}

std::variant<Fingerprint, Undersized> build_fingerprint(
    const TokenDocument& doc, const DetectionParams& params, Vocabulary& vocab) {
  if (doc.tokens.size() < params.min_tokens) {
    return Undersized{doc.id, doc.tokens.size()};
  }
  std::vector<TokenId> ids;
  ids.reserve(doc.tokens.size());
  for (const auto& token : doc.tokens) ids.push_back(vocab.intern(token));
  std::sort(ids.begin(), ids.end());

  std::vector<TokenCount> counts;
  for (TokenId id : ids) {
    if (!counts.empty() && counts.back().token == id) {
      ++counts.back().count;
    } else {
      counts.push_back({id, 1});
    }
  }
  return Fingerprint(doc.id, std::move(counts));
}

Overlap overlap(const Fingerprint& a, const Fingerprint& b) {
  Overlap result;
  auto x = a.counts();
  auto y = b.counts();
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < x.size() && j < y.size()) {
    if (x[i].token < y[j].token) {
      ++i;
    } else if (y[j].token < x[i].token) {
      ++j;
    } else {
      ++result.shared_distinct;
      result.shared_total += std::min(x[i].count, y[j].count);
      ++i;
      ++j;
    }
  }
  return result;
}

namespace {

double ratio_or_one(std::uint64_t part, std::uint64_t whole) {
  return whole == 0 ? 1.0 : static_cast<double>(part) / static_cast<double>(whole);
}

}  // namespace

double jaccard_set(const Fingerprint& a, const Fingerprint& b) {
  auto shared = overlap(a, b).shared_distinct;
  return ratio_or_one(shared, a.distinct() + b.distinct() - shared);
}

double jaccard_multiset(const Fingerprint& a, const Fingerprint& b) {
  auto shared = overlap(a, b).shared_total;
  return ratio_or_one(shared, a.total() + b.total() - shared);
}

double jaccard_set(const std::set<std::string>& a,
                   const std::set<std::string>& b) {
  std::uint64_t shared = 0;
  for (const auto& token : a) shared += b.count(token);
  return ratio_or_one(shared, a.size() + b.size() - shared);
}

double jaccard_multiset(const std::map<std::string, std::uint64_t>& a,
                        const std::map<std::string, std::uint64_t>& b) {
  std::uint64_t min_sum = 0;
  std::uint64_t max_sum = 0;
  auto lookup = [](const auto& m, const std::string& key) -> std::uint64_t {
    auto it = m.find(key);
    return it == m.end() ? 0 : it->second;
  };
  for (const auto& [token, count] : a) {
    std::uint64_t other = lookup(b, token);
    min_sum += std::min(count, other);
    max_sum += std::max(count, other);
  }
  for (const auto& [token, count] : b) {
    if (!a.contains(token)) max_sum += count;
  }
  return ratio_or_one(min_sum, max_sum);
}

bool is_near_duplicate(const Fingerprint& a, const Fingerprint& b,
                       const DetectionParams& params) {
  Overlap shared = overlap(a, b);
  std::uint64_t set_union = a.distinct() + b.distinct() - shared.shared_distinct;
  std::uint64_t multiset_union = a.total() + b.total() - shared.shared_total;
  return params.t0.admits(shared.shared_distinct, set_union) &&
         params.t1.admits(shared.shared_total, multiset_union);
}

}  // namespace neardup
