#include "neardup/lexer.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <iterator>
#include <sstream>
#include <thread>
#include <unordered_set>

#include "neardup/utf8.hpp"

namespace neardup {

namespace detail {
std::span<const std::string_view> keyword_table(SourceLanguage lang);
}

namespace {

const std::unordered_set<std::string_view>& keyword_set(SourceLanguage lang) {
  static const auto sets = [] {
    std::array<std::unordered_set<std::string_view>, std::size(kAllLanguages)> s;
    for (SourceLanguage l : kAllLanguages) {
      auto table = detail::keyword_table(l);
      s[static_cast<std::size_t>(l)].insert(table.begin(), table.end());
    }
    return s;
  }();
  return sets[static_cast<std::size_t>(lang)];
}

bool is_ascii_alpha(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}
bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

// Where a nested expression inside an interpolated string ends.
enum class Nesting {
  none,             // top level: runs to end of input
  template_expr,    // JS ${...}: ends at '}'
  fstring_expr,     // Python f"{...}": ends at '}', ':' or '!'
  interpolation,    // C# $"{...}": ends at '}', ':' or ','
};

class Lexer {
 public:
  Lexer(std::string_view src, SourceLanguage lang)
      : src_(src), lang_(lang), keywords_(keyword_set(lang)) {}

  std::vector<std::string> run() {
    if (src_.starts_with("\xEF\xBB\xBF")) pos_ = 3;
    if (lang_ == SourceLanguage::javascript && src_.substr(pos_).starts_with("#!")) {
      skip_line();
    }
    lex_code(Nesting::none);
    return std::move(tokens_);
  }

 private:
  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
  }
  bool at_end() const { return pos_ >= src_.size(); }

  [[noreturn]] void fail(const std::string& what, std::size_t at) const {
    std::size_t line = 1;
    std::size_t line_start = 0;
    for (std::size_t i = 0; i < at && i < src_.size(); ++i) {
      if (src_[i] == '\n') {
        ++line;
        line_start = i + 1;
      }
    }
    throw LexError(what, line, at - line_start + 1);
  }

  bool dollar_is_ident() const {
    return lang_ == SourceLanguage::java || lang_ == SourceLanguage::javascript;
  }
  bool is_ident_start(char c) const {
    return is_ascii_alpha(c) || c == '_' || static_cast<unsigned char>(c) >= 0x80 ||
           (c == '$' && dollar_is_ident());
  }
  bool is_ident_part(char c) const { return is_ident_start(c) || is_digit(c); }
  bool has_c_comments() const { return lang_ != SourceLanguage::python; }

  void emit(std::string_view lexeme) {
    if (!lexeme.empty()) tokens_.emplace_back(lexeme);
    prev_is_value_ = true;
  }

  void skip_line() {
    while (!at_end() && peek() != '\n') ++pos_;
  }

  // Main loop shared by top-level code and embedded expressions. In nested
  // mode it returns with pos_ on the terminating character.
  void lex_code(Nesting nesting) {
    const std::size_t nested_start = pos_;
    int depth = 0;
    while (!at_end()) {
      char c = peek();
      if (is_space(c)) {
        if (c == '\n') at_line_start_ = true;
        ++pos_;
        continue;
      }
      if (nesting != Nesting::none && depth == 0) {
        if (c == '}') return;
        if (nesting == Nesting::fstring_expr &&
            (c == ':' || (c == '!' && peek(1) != '='))) {
          return;
        }
        if (nesting == Nesting::interpolation && (c == ':' || c == ',')) return;
      }
      bool line_start = at_line_start_;
      at_line_start_ = false;

      if (has_c_comments() && c == '/' && peek(1) == '/') {
        skip_line();
        continue;
      }
      if (has_c_comments() && c == '/' && peek(1) == '*') {
        skip_block_comment();
        continue;
      }
      if (lang_ == SourceLanguage::python && c == '#') {
        skip_line();
        continue;
      }
      if (lang_ == SourceLanguage::csharp && c == '#' && line_start) {
        skip_line();  // preprocessor directive
        continue;
      }

      if (is_digit(c) || (c == '.' && is_digit(peek(1)))) {
        lex_number();
        continue;
      }
      if (lang_ == SourceLanguage::csharp && (c == '@' || c == '$') &&
          lex_csharp_prefixed()) {
        continue;
      }
      if (is_ident_start(c)) {
        lex_word();
        continue;
      }
      if (c == '"' || c == '\'') {
        lex_string_literal();
        continue;
      }
      if (c == '`' && lang_ == SourceLanguage::javascript) {
        lex_template();
        continue;
      }
      if (c == '/' && lang_ == SourceLanguage::javascript && !prev_is_value_) {
        lex_regex();
        continue;
      }

      // Punctuation and operators.
      if (c == '(' || c == '[' || c == '{') ++depth;
      if ((c == ')' || c == ']' || c == '}') && depth > 0) --depth;
      prev_is_value_ = (c == ')' || c == ']' || c == '}');
      ++pos_;
    }
    if (nesting != Nesting::none) {
      fail("unterminated interpolated expression", nested_start);
    }
  }

  void skip_block_comment() {
    std::size_t start = pos_;
    auto end = src_.find("*/", pos_ + 2);
    if (end == std::string_view::npos) fail("unterminated block comment", start);
    pos_ = end + 2;
  }

  void lex_number() {
    std::size_t start = pos_;
    char c = peek();
    char x = peek(1);
    if (c == '0' && (x == 'x' || x == 'X' || x == 'b' || x == 'B' || x == 'o' ||
                     x == 'O')) {
      pos_ += 2;
      while (std::isxdigit(static_cast<unsigned char>(peek())) || peek() == '_') ++pos_;
    } else {
      while (is_digit(peek()) || peek() == '_') ++pos_;
      if (peek() == '.' && peek(1) != '.' && !is_ident_start(peek(1))) {
        ++pos_;
        while (is_digit(peek()) || peek() == '_') ++pos_;
      }
      if ((peek() == 'e' || peek() == 'E') &&
          (is_digit(peek(1)) ||
           ((peek(1) == '+' || peek(1) == '-') && is_digit(peek(2))))) {
        pos_ += 2;
        while (is_digit(peek()) || peek() == '_') ++pos_;
      }
    }
    // Type suffixes (L, f, d, m, ul, n, j) and anything glued to the number.
    while (is_ascii_alpha(peek()) || is_digit(peek()) || peek() == '_') ++pos_;
    emit(src_.substr(start, pos_ - start));
  }

  void lex_word() {
    std::size_t start = pos_;
    while (!at_end() && is_ident_part(peek())) ++pos_;
    std::string_view word = src_.substr(start, pos_ - start);

    if (lang_ == SourceLanguage::python && (peek() == '"' || peek() == '\'') &&
        is_python_string_prefix(word)) {
      bool formatted = word.find_first_of("fF") != std::string_view::npos;
      lex_python_string(formatted);
      return;
    }
    if (keywords_.contains(word)) {
      // `this` and `super` end an operand, so a following '/' divides.
      prev_is_value_ = lang_ == SourceLanguage::javascript &&
                       (word == "this" || word == "super");
      return;
    }
    emit(word);
  }

  static bool is_python_string_prefix(std::string_view word) {
    if (word.size() > 2) return false;
    std::string lower;
    for (char c : word) lower += static_cast<char>(c | 0x20);
    static constexpr std::string_view kPrefixes[] = {"r",  "u",  "b",  "f",
                                                     "br", "rb", "fr", "rf"};
    return std::find(std::begin(kPrefixes), std::end(kPrefixes), lower) !=
           std::end(kPrefixes);
  }

  // Reads a quoted body starting after the opening quote and returns its raw
  // contents; pos_ ends after the closing quote.
  std::string_view read_quoted(char quote, std::size_t start, bool backslash_escapes,
                               bool doubled_quote_escapes, bool multiline) {
    std::size_t body = pos_;
    while (true) {
      if (at_end()) fail("unterminated string literal", start);
      char c = peek();
      if (c == '\\' && backslash_escapes) {
        if (pos_ + 1 >= src_.size()) fail("unterminated string literal", start);
        pos_ += 2;
        continue;
      }
      if (c == quote) {
        if (doubled_quote_escapes && peek(1) == quote) {
          pos_ += 2;
          continue;
        }
        std::string_view contents = src_.substr(body, pos_ - body);
        ++pos_;
        return contents;
      }
      if (c == '\n' && !multiline) fail("unterminated string literal", start);
      ++pos_;
    }
  }

  void lex_string_literal() {
    std::size_t start = pos_;
    char quote = peek();
    if (lang_ == SourceLanguage::python) {
      lex_python_string(false);
      return;
    }
    if (lang_ == SourceLanguage::java && src_.substr(pos_).starts_with("\"\"\"")) {
      lex_text_block();
      return;
    }
    ++pos_;
    emit(read_quoted(quote, start, true, false, false));
  }

  void lex_text_block() {
    std::size_t start = pos_;
    pos_ += 3;
    std::size_t body = pos_;
    while (true) {
      if (at_end()) fail("unterminated text block", start);
      if (peek() == '\\') {
        pos_ += 2;
        continue;
      }
      if (src_.substr(pos_).starts_with("\"\"\"")) break;
      ++pos_;
    }
    emit(src_.substr(body, pos_ - body));
    pos_ += 3;
  }

  // pos_ is on the opening quote (any prefix already consumed).
  void lex_python_string(bool formatted) {
    std::size_t start = pos_;
    char quote = peek();
    bool triple = peek(1) == quote && peek(2) == quote;
    pos_ += triple ? 3 : 1;
    if (formatted) {
      lex_interpolated(start, quote, triple, Nesting::fstring_expr);
      return;
    }
    std::size_t body = pos_;
    while (true) {
      if (at_end()) fail("unterminated string literal", start);
      char c = peek();
      if (c == '\\') {
        if (pos_ + 1 >= src_.size()) fail("unterminated string literal", start);
        pos_ += 2;
        continue;
      }
      if (c == quote && (!triple || (peek(1) == quote && peek(2) == quote))) {
        emit(src_.substr(body, pos_ - body));
        pos_ += triple ? 3 : 1;
        return;
      }
      if (c == '\n' && !triple) fail("unterminated string literal", start);
      ++pos_;
    }
  }

  // C# verbatim identifiers (@name) and verbatim/interpolated strings.
  // Returns false when the character is plain punctuation.
  bool lex_csharp_prefixed() {
    std::size_t start = pos_;
    char c = peek();
    char next = peek(1);
    if (c == '@' && next == '"') {
      pos_ += 2;
      emit(read_quoted('"', start, false, true, true));
      return true;
    }
    if ((c == '$' && next == '"')) {
      pos_ += 2;
      lex_interpolated(start, '"', false, Nesting::interpolation);
      return true;
    }
    if ((c == '$' && next == '@' && peek(2) == '"') ||
        (c == '@' && next == '$' && peek(2) == '"')) {
      pos_ += 3;
      verbatim_interpolation_ = true;
      lex_interpolated(start, '"', false, Nesting::interpolation);
      verbatim_interpolation_ = false;
      return true;
    }
    if (c == '@' && is_ident_start(next)) {
      ++pos_;
      std::size_t word = pos_;
      while (!at_end() && is_ident_part(peek())) ++pos_;
      emit(src_.substr(word, pos_ - word));  // never a keyword
      return true;
    }
    return false;
  }

  void lex_template() {
    std::size_t start = pos_;
    ++pos_;
    lex_interpolated(start, '`', false, Nesting::template_expr);
  }

  // Shared scanner for strings with embedded expressions. pos_ is just past
  // the opening delimiter. Text fragments are emitted as literal tokens.
  void lex_interpolated(std::size_t start, char quote, bool triple, Nesting kind) {
    const bool multiline = triple || kind == Nesting::template_expr ||
                           verbatim_interpolation_;
    const bool backslash = !verbatim_interpolation_;
    std::size_t fragment = pos_;
    auto flush = [&](std::size_t end) {
      if (end > fragment) tokens_.emplace_back(src_.substr(fragment, end - fragment));
    };
    while (true) {
      if (at_end()) fail("unterminated string literal", start);
      char c = peek();
      if (c == '\\' && backslash) {
        if (pos_ + 1 >= src_.size()) fail("unterminated string literal", start);
        pos_ += 2;
        continue;
      }
      if (c == quote) {
        if (verbatim_interpolation_ && peek(1) == quote) {
          pos_ += 2;
          continue;
        }
        if (!triple || (peek(1) == quote && peek(2) == quote)) {
          flush(pos_);
          pos_ += triple ? 3 : 1;
          prev_is_value_ = true;
          return;
        }
      }
      if (c == '\n' && !multiline) fail("unterminated string literal", start);

      bool opens = kind == Nesting::template_expr ? (c == '$' && peek(1) == '{')
                                                  : c == '{';
      if (kind != Nesting::template_expr && (c == '{' || c == '}') && peek(1) == c) {
        pos_ += 2;  // escaped brace
        continue;
      }
      if (!opens) {
        ++pos_;
        continue;
      }
      flush(pos_);
      pos_ += kind == Nesting::template_expr ? 2 : 1;
      lex_embedded(kind, start);
      fragment = pos_;
    }
  }

  // Lexes one embedded expression and its optional conversion/format parts,
  // leaving pos_ after the closing '}'.
  void lex_embedded(Nesting kind, std::size_t string_start) {
    const bool saved_verbatim = verbatim_interpolation_;
    verbatim_interpolation_ = false;
    lex_code(kind);
    verbatim_interpolation_ = saved_verbatim;

    if (kind == Nesting::interpolation && peek() == ',') {
      while (!at_end() && peek() != ':' && peek() != '}') ++pos_;  // alignment
    }
    if (kind == Nesting::fstring_expr && peek() == '!') {
      while (!at_end() && peek() != ':' && peek() != '}') ++pos_;  // conversion
    }
    if (peek() == ':') {
      ++pos_;
      // Format spec; Python allows nested replacement fields inside it.
      while (!at_end() && peek() != '}') {
        if (kind == Nesting::fstring_expr && peek() == '{') {
          ++pos_;
          lex_embedded(kind, string_start);
          continue;
        }
        if (peek() == '\n' && kind != Nesting::fstring_expr) break;
        ++pos_;
      }
    }
    if (peek() != '}') fail("unterminated interpolated expression", string_start);
    ++pos_;
  }

  void lex_regex() {
    std::size_t start = pos_;
    ++pos_;
    std::size_t body = pos_;
    bool in_class = false;
    while (true) {
      if (at_end() || peek() == '\n') fail("unterminated regular expression", start);
      char c = peek();
      if (c == '\\') {
        pos_ += 2;
        continue;
      }
      if (c == '[') in_class = true;
      if (c == ']') in_class = false;
      if (c == '/' && !in_class) break;
      ++pos_;
    }
    std::string_view pattern = src_.substr(body, pos_ - body);
    ++pos_;
    while (is_ascii_alpha(peek())) ++pos_;  // flags
    emit(pattern);
  }

  std::string_view src_;
  SourceLanguage lang_;
  const std::unordered_set<std::string_view>& keywords_;
  std::size_t pos_ = 0;
  std::vector<std::string> tokens_;
  bool prev_is_value_ = false;
  bool at_line_start_ = true;
  bool verbatim_interpolation_ = false;
};

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file");
  std::string contents((std::istreambuf_iterator<char>(in)),
                       std::istreambuf_iterator<char>());
  if (in.bad()) throw DataError("read error");
  return contents;
}

}  // namespace

LexError::LexError(const std::string& what, std::size_t line, std::size_t column)
    : DataError(std::to_string(line) + ":" + std::to_string(column) + ": " + what),
      line_(line),
      column_(column) {}

std::string_view language_name(SourceLanguage lang) {
  switch (lang) {
    case SourceLanguage::java:
      return "java";
    case SourceLanguage::javascript:
      return "javascript";
    case SourceLanguage::python:
      return "python";
    case SourceLanguage::csharp:
      return "csharp";
  }
  return "?";
}

std::optional<SourceLanguage> parse_language(std::string_view name) {
  for (SourceLanguage lang : kAllLanguages) {
    if (language_name(lang) == name) return lang;
  }
  return std::nullopt;
}

std::string_view file_extension(SourceLanguage lang) {
  switch (lang) {
    case SourceLanguage::java:
      return ".java";
    case SourceLanguage::javascript:
      return ".js";
    case SourceLanguage::python:
      return ".py";
    case SourceLanguage::csharp:
      return ".cs";
  }
  return "";
}

std::span<const std::string_view> keywords(SourceLanguage lang) {
  return detail::keyword_table(lang);
}

bool is_keyword(SourceLanguage lang, std::string_view word) {
  return keyword_set(lang).contains(word);
}

std::vector<std::string> tokenize_source(std::string_view text,
                                         SourceLanguage lang) {
  if (auto bad = find_invalid_utf8(text)) {
    std::size_t line = 1 + static_cast<std::size_t>(
                               std::count(text.begin(), text.begin() + *bad, '\n'));
    std::size_t line_start = text.rfind('\n', *bad == 0 ? 0 : *bad - 1);
    std::size_t column =
        line_start == std::string_view::npos || *bad == 0 ? *bad + 1 : *bad - line_start;
    throw LexError("invalid UTF-8", line, column);
  }
  return Lexer(text, lang).run();
}

ScanResult scan_tree(const std::filesystem::path& root, SourceLanguage lang,
                     unsigned jobs) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(root, ec)) {
    throw DataError("input root \"" + root.string() + "\" is not a readable directory");
  }

  struct Entry {
    std::string id;
    fs::path path;
  };
  std::vector<Entry> entries;
  ScanResult result;
  fs::recursive_directory_iterator it(root, fs::directory_options::skip_permission_denied, ec);
  if (ec) {
    throw DataError("cannot read \"" + root.string() + "\": " + ec.message());
  }
  for (; it != fs::recursive_directory_iterator(); it.increment(ec)) {
    if (ec) break;
    const auto& entry = *it;
    if (!entry.is_regular_file(ec) || entry.path().extension() != file_extension(lang)) {
      continue;
    }
    entries.push_back({entry.path().lexically_relative(root).generic_string(), entry.path()});
  }
  if (ec) throw DataError("error while walking \"" + root.string() + "\": " + ec.message());
  std::sort(entries.begin(), entries.end(),
            [](const Entry& a, const Entry& b) { return a.id < b.id; });

  std::vector<std::optional<std::vector<std::string>>> tokens(entries.size());
  std::vector<std::string> errors(entries.size());
  auto work = [&](std::size_t first, std::size_t stride) {
    for (std::size_t i = first; i < entries.size(); i += stride) {
      try {
        tokens[i] = tokenize_source(read_file(entries[i].path), lang);
      } catch (const DataError& e) {
        errors[i] = e.what();
      }
    }
  };
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  if (jobs <= 1 || entries.size() < 2) {
    work(0, 1);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < jobs; ++w) pool.emplace_back(work, w, jobs);
  }

  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (tokens[i]) {
      result.documents.push_back({entries[i].id, std::move(*tokens[i])});
    } else {
      result.skipped.push_back({entries[i].id, errors[i]});
    }
  }
  return result;
}

}  // namespace neardup
