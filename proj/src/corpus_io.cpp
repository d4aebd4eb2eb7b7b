#include "neardup/corpus_io.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <unordered_map>
#include <utility>

#include <json.hpp>

#include "neardup/errors.hpp"

namespace neardup {

using nlohmann::json;

namespace {

bool is_blank(std::string_view line) {
  return line.find_first_not_of(" \t\r") == std::string_view::npos;
}

std::string at_line(std::size_t line_no) {
  return "line " + std::to_string(line_no) + ": ";
}

// Calls `handle(object, line_no)` for every non-blank line.
template <typename Handler>
void for_each_json_line(std::istream& in, Handler&& handle) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank(line)) continue;
    json object;
    try {
      object = json::parse(line);
    } catch (const json::exception& e) {
      throw DataError(at_line(line_no) + "malformed JSON (" + e.what() + ")");
    }
    if (!object.is_object()) {
      throw DataError(at_line(line_no) + "expected a JSON object");
    }
    handle(object, line_no);
  }
  if (in.bad()) throw DataError("read error after line " +
                                std::to_string(line_no));
}

const json& require(const json& object, const char* key, std::size_t line_no) {
  auto it = object.find(key);
  if (it == object.end()) {
    throw DataError(at_line(line_no) + "missing key \"" + key + "\"");
  }
  return *it;
}

std::string require_string(const json& object, const char* key,
                           std::size_t line_no) {
  const json& value = require(object, key, line_no);
  if (!value.is_string()) {
    throw DataError(at_line(line_no) + "key \"" + key + "\" must be a string");
  }
  return value.get<std::string>();
}

DocId require_filename(const json& object, std::size_t line_no) {
  DocId id = require_string(object, "filename", line_no);
  if (id.empty()) {
    throw DataError(at_line(line_no) + "\"filename\" must not be empty");
  }
  return id;
}

// Tracks the first line each id was seen on.
class IdLines {
 public:
  void claim(const DocId& id, std::size_t line_no) {
    auto [it, inserted] = first_line_.emplace(id, line_no);
    if (!inserted) {
      throw DataError("duplicate filename \"" + id + "\" on lines " +
                      std::to_string(it->second) + " and " +
                      std::to_string(line_no));
    }
  }

 private:
  std::unordered_map<DocId, std::size_t> first_line_;
};

}  // namespace

std::string_view fold_label(Fold fold) {
  switch (fold) {
    case Fold::train:
      return "train";
    case Fold::validation:
      return "valid";
    case Fold::test:
      return "test";
  }
  return "?";
}

std::optional<Fold> parse_fold(std::string_view label) {
  if (label == "train") return Fold::train;
  if (label == "valid") return Fold::validation;
  if (label == "test") return Fold::test;
  return std::nullopt;
}

std::vector<TokenDocument> read_token_documents(std::istream& in) {
  std::vector<TokenDocument> docs;
  IdLines seen;
  for_each_json_line(in, [&](const json& object, std::size_t line_no) {
    TokenDocument doc;
    doc.id = require_filename(object, line_no);
    const json& tokens = require(object, "tokens", line_no);
    if (!tokens.is_array()) {
      throw DataError(at_line(line_no) + "\"tokens\" must be an array");
    }
    doc.tokens.reserve(tokens.size());
    for (const auto& token : tokens) {
      if (!token.is_string()) {
        throw DataError(at_line(line_no) + "\"tokens\" must contain strings");
      }
      doc.tokens.push_back(token.get<std::string>());
    }
    seen.claim(doc.id, line_no);
    docs.push_back(std::move(doc));
  });
  return docs;
}

void write_token_documents(std::span<const TokenDocument> docs,
                           std::ostream& out) {
  for (const auto& doc : docs) {
    json object = {{"filename", doc.id}, {"tokens", doc.tokens}};
    out << object.dump() << '\n';
  }
}

void write_clusters(const DuplicationReport& report, std::ostream& out) {
  // Groups are already canonical inside the report.
  out << json(report.groups()).dump() << '\n';
}

DuplicationReport read_clusters(std::istream& in) {
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed cluster file (") + e.what() + ")");
  }
  if (!doc.is_array()) {
    throw DataError("cluster file must hold a JSON array of arrays");
  }
  std::vector<std::vector<DocId>> groups;
  groups.reserve(doc.size());
  for (const auto& group : doc) {
    if (!group.is_array()) {
      throw DataError("cluster file must hold a JSON array of arrays");
    }
    std::vector<DocId> members;
    for (const auto& id : group) {
      if (!id.is_string()) {
        throw DataError("cluster members must be strings");
      }
      members.push_back(id.get<std::string>());
    }
    if (members.size() < 2) {
      throw DataError("singleton cluster" +
                      (members.empty() ? std::string{}
                                       : " [\"" + members.front() + "\"]") +
                      "; every cluster needs at least 2 members");
    }
    groups.push_back(std::move(members));
  }
  return DuplicationReport::from_groups(std::move(groups));
}

SplitAssignment read_split(std::istream& in) {
  SplitAssignment split;
  IdLines seen;
  for_each_json_line(in, [&](const json& object, std::size_t line_no) {
    DocId id = require_filename(object, line_no);
    std::string label = require_string(object, "fold", line_no);
    auto fold = parse_fold(label);
    if (!fold) {
      throw DataError(at_line(line_no) + "unknown fold \"" + label +
                      "\" (expected train, valid or test)");
    }
    seen.claim(id, line_no);
    split.emplace(std::move(id), *fold);
  });
  return split;
}

void write_split(const SplitAssignment& split, std::ostream& out) {
  for (const auto& [id, fold] : split) {
    json object = {{"filename", id}, {"fold", fold_label(fold)}};
    out << object.dump() << '\n';
  }
}

std::vector<MetricRecord> read_metrics(std::istream& in) {
  std::vector<MetricRecord> records;
  for_each_json_line(in, [&](const json& object, std::size_t line_no) {
    MetricRecord record;
    record.id = require_filename(object, line_no);
    const json& value = require(object, "value", line_no);
    if (!value.is_number()) {
      throw DataError(at_line(line_no) + "\"value\" must be a number");
    }
    record.value = value.get<double>();
    if (!std::isfinite(record.value)) {
      throw DataError(at_line(line_no) + "\"value\" must be finite");
    }
    records.push_back(std::move(record));
  });
  return records;
}

}  // namespace neardup
