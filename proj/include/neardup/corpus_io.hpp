#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "neardup/report.hpp"

namespace neardup {

/// One file of a corpus: its id (usually a relative path) and the ordered
/// identifier/literal tokens extracted from it.
struct TokenDocument {
  DocId id;
  std::vector<std::string> tokens;

  friend bool operator==(const TokenDocument&, const TokenDocument&) = default;
};

/// A per-sample metric value f(x_i) keyed by file id.
struct MetricRecord {
  DocId id;
  double value = 0.0;
};

enum class Fold { train, validation, test };

/// File id -> fold. std::map keeps iteration order lexicographic.
using SplitAssignment = std::map<DocId, Fold>;

/// On-disk labels are "train", "valid" and "test".
std::string_view fold_label(Fold fold);
std::optional<Fold> parse_fold(std::string_view label);

// All readers accept UTF-8 JSONL, skip blank lines, and throw DataError for
// anything else that does not match the record schema. Error messages carry
// 1-based line numbers.

/// Lines of {"filename": string, "tokens": [string, ...]}.
std::vector<TokenDocument> read_token_documents(std::istream& in);
void write_token_documents(std::span<const TokenDocument> docs,
                           std::ostream& out);

/// Canonical cluster file: a JSON array of sorted id arrays, ordered by
/// smallest id, followed by a newline.
void write_clusters(const DuplicationReport& report, std::ostream& out);
/// The returned report's universe is the union of the group members; pair it
/// with the real universe via DuplicationReport's constructor when needed.
DuplicationReport read_clusters(std::istream& in);

/// Lines of {"filename": string, "fold": "train"|"valid"|"test"}.
SplitAssignment read_split(std::istream& in);
void write_split(const SplitAssignment& split, std::ostream& out);

/// Lines of {"filename": string, "value": number}; values must be finite.
std::vector<MetricRecord> read_metrics(std::istream& in);

}  // namespace neardup
