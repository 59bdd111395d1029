#pragma once

#include <cctype>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace monoembed::java {

enum class TokenKind { identifier, keyword, string_literal, char_literal, number, op, end };

struct Token {
  TokenKind kind = TokenKind::end;
  std::string text;       // literal contents for string/char literals, lexeme otherwise
  std::size_t begin = 0;  // byte offsets into the source
  std::size_t end = 0;
  int line = 1;

  bool is(TokenKind k, std::string_view t) const { return kind == k && text == t; }
  bool is_op(std::string_view t) const { return kind == TokenKind::op && text == t; }
  bool is_kw(std::string_view t) const { return kind == TokenKind::keyword && text == t; }
};

class LexError : public std::runtime_error {
 public:
  LexError(const std::string& what, int line)
      : std::runtime_error(what + " at line " + std::to_string(line)), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

/// Reserved words plus the three literal keywords.
inline const std::unordered_set<std::string>& reserved_words() {
  static const std::unordered_set<std::string> words = {
      "abstract", "assert",     "boolean",   "break",     "byte",      "case",       "catch",
      "char",     "class",      "const",     "continue",  "default",   "do",         "double",
      "else",     "enum",       "extends",   "final",     "finally",   "float",      "for",
      "goto",     "if",         "implements", "import",   "instanceof", "int",       "interface",
      "long",     "native",     "new",       "package",   "private",   "protected",  "public",
      "return",   "short",      "static",    "strictfp",  "super",     "switch",     "synchronized",
      "this",     "throw",      "throws",    "transient", "try",       "void",       "volatile",
      "while",    "true",       "false",     "null"};
  return words;
}

inline bool is_primitive_type(std::string_view w) {
  return w == "boolean" || w == "byte" || w == "char" || w == "short" || w == "int" || w == "long" ||
         w == "float" || w == "double";
}

namespace detail {

inline bool ident_start(unsigned char c) { return std::isalpha(c) || c == '_' || c == '$' || c >= 0x80; }
inline bool ident_part(unsigned char c) { return std::isalnum(c) || c == '_' || c == '$' || c >= 0x80; }

}  // namespace detail

/// Tokenizes Java source. Comments and whitespace are dropped; unterminated
/// comments or literals raise LexError.
inline std::vector<Token> tokenize(std::string_view src) {
  static const char* const kOps[] = {">>>=", "<<=", ">>=", ">>>", "...", "->", "::", "++", "--", "&&",
                                     "||",   "==",  "!=",  "<=",  ">=",  "+=", "-=", "*=", "/=", "&=",
                                     "|=",   "^=",  "%=",  "<<"};
  std::vector<Token> out;
  std::size_t i = 0;
  int line = 1;
  const std::size_t n = src.size();

  auto push = [&](TokenKind kind, std::string text, std::size_t b, std::size_t e, int l) {
    out.push_back(Token{kind, std::move(text), b, e, l});
  };

  while (i < n) {
    const char c = src[i];
    if (c == '\n') {
      ++line;
      ++i;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (c == '/' && i + 1 < n && src[i + 1] == '/') {
      while (i < n && src[i] != '\n') ++i;
      continue;
    }
    if (c == '/' && i + 1 < n && src[i + 1] == '*') {
      const int start_line = line;
      i += 2;
      while (i + 1 < n && !(src[i] == '*' && src[i + 1] == '/')) {
        if (src[i] == '\n') ++line;
        ++i;
      }
      if (i + 1 >= n) throw LexError("unterminated block comment", start_line);
      i += 2;
      continue;
    }
    const std::size_t b = i;
    const int l = line;
    if (c == '"' && src.substr(i, 3) == "\"\"\"") {
      i += 3;
      std::string text;
      while (i + 2 < n && src.substr(i, 3) != "\"\"\"") {
        if (src[i] == '\\' && i + 1 < n) {
          text += src[i + 1];
          i += 2;
          continue;
        }
        if (src[i] == '\n') ++line;
        text += src[i++];
      }
      if (i + 2 >= n) throw LexError("unterminated text block", l);
      i += 3;
      push(TokenKind::string_literal, std::move(text), b, i, l);
      continue;
    }
    if (c == '"' || c == '\'') {
      const char quote = c;
      ++i;
      std::string text;
      while (i < n && src[i] != quote) {
        if (src[i] == '\n') throw LexError("newline in literal", l);
        if (src[i] == '\\' && i + 1 < n) {
          // Keep escapes as a separator so "a\nb" splits into two words.
          text += ' ';
          i += 2;
          continue;
        }
        text += src[i++];
      }
      if (i >= n) throw LexError("unterminated literal", l);
      ++i;
      push(quote == '"' ? TokenKind::string_literal : TokenKind::char_literal, std::move(text), b, i, l);
      continue;
    }
    if (detail::ident_start(static_cast<unsigned char>(c))) {
      while (i < n && detail::ident_part(static_cast<unsigned char>(src[i]))) ++i;
      std::string word(src.substr(b, i - b));
      const TokenKind kind = reserved_words().count(word) ? TokenKind::keyword : TokenKind::identifier;
      push(kind, std::move(word), b, i, l);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && i + 1 < n && std::isdigit(static_cast<unsigned char>(src[i + 1])))) {
      while (i < n && (std::isalnum(static_cast<unsigned char>(src[i])) || src[i] == '.' || src[i] == '_' ||
                       ((src[i] == '+' || src[i] == '-') && (src[i - 1] == 'e' || src[i - 1] == 'E') &&
                        !(src[b] == '0' && b + 1 < n && (src[b + 1] == 'x' || src[b + 1] == 'X'))))) {
        ++i;
      }
      push(TokenKind::number, std::string(src.substr(b, i - b)), b, i, l);
      continue;
    }
    bool matched = false;
    for (const char* op : kOps) {
      const std::string_view sv(op);
      if (src.substr(i, sv.size()) == sv) {
        // '>' runs are emitted one character at a time so nested generics close cleanly.
        if (sv[0] == '>') break;
        i += sv.size();
        push(TokenKind::op, std::string(sv), b, i, l);
        matched = true;
        break;
      }
    }
    if (matched) continue;
    ++i;
    push(TokenKind::op, std::string(1, c), b, i, l);
  }
  out.push_back(Token{TokenKind::end, "", n, n, line});
  return out;
}

}  // namespace monoembed::java
