#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "neardup/corpus_io.hpp"
#include "neardup/errors.hpp"

namespace neardup {

enum class SourceLanguage { java, javascript, python, csharp };

inline constexpr SourceLanguage kAllLanguages[] = {
    SourceLanguage::java, SourceLanguage::javascript, SourceLanguage::python,
    SourceLanguage::csharp};

std::string_view language_name(SourceLanguage lang);
std::optional<SourceLanguage> parse_language(std::string_view name);
/// ".java", ".js", ".py" or ".cs".
std::string_view file_extension(SourceLanguage lang);

/// Reserved words whose occurrences are dropped from token streams. Literal
/// words (true, false, null, None, ...) are not in these lists; they are
/// emitted as literal tokens.
std::span<const std::string_view> keywords(SourceLanguage lang);
bool is_keyword(SourceLanguage lang, std::string_view word);

/// Raised for text that cannot be lexed: invalid UTF-8, an unterminated
/// string, comment or template. Positions are 1-based; the column counts bytes.
class LexError : public DataError {
 public:
  LexError(const std::string& what, std::size_t line, std::size_t column);
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// Identifier and literal tokens of `text`, in order of appearance.
///
/// Keywords, comments, operators and punctuation are dropped. String and
/// character literals contribute their contents without quotes and without
/// escape decoding; empty literals contribute nothing. Numeric literals keep
/// their lexeme verbatim. Interpolated strings (JS templates, Python
/// f-strings, C# $-strings) contribute their text fragments and the tokens of
/// their embedded expressions.
std::vector<std::string> tokenize_source(std::string_view text,
                                         SourceLanguage lang);

struct SkippedFile {
  std::string path;
  std::string reason;
};

struct ScanResult {
  /// Sorted by id.
  std::vector<TokenDocument> documents;
  /// Sorted by path.
  std::vector<SkippedFile> skipped;
};

/// Tokenizes every regular file under `root` with the language's extension.
/// Document ids are paths relative to `root` using '/' separators. Files that
/// cannot be read or lexed are reported in `skipped` and never abort the
/// scan. Throws DataError when `root` is not a readable directory.
ScanResult scan_tree(const std::filesystem::path& root, SourceLanguage lang,
                     unsigned jobs = 1);

}  // namespace neardup
