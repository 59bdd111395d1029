#pragma once

#include <cctype>
#include <map>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "monoembed/java_lexer.hpp"

namespace monoembed {

/// Term multiset, ordered by token so serialization is deterministic.
using TermCounts = std::map<std::string, int>;

/// Version tag of the tokenizer + stopword policy below.
inline constexpr std::string_view kTermPolicyVersion = "terms-v1";

inline const std::unordered_set<std::string>& english_stopwords() {
  static const std::unordered_set<std::string> words = {
      "me",    "my",      "myself", "we",     "our",   "ours",  "ourselves", "you",     "your",   "yours",
      "yourself", "yourselves", "he", "him",  "his",   "himself", "she",     "her",     "hers",   "herself",
      "it",    "its",     "itself", "they",   "them",  "their", "theirs",   "themselves", "what", "which",
      "who",   "whom",    "these",  "those",  "am",    "is",    "are",      "was",     "were",   "be",
      "been",  "being",   "have",   "has",    "had",   "having", "does",    "did",     "doing",  "an",
      "the",   "and",     "but",    "or",     "because", "as",  "until",    "of",      "at",     "by",
      "with",  "about",   "against", "between", "into", "through", "during", "before", "after",  "above",
      "below", "to",      "from",   "up",     "down",  "in",    "out",      "on",      "off",    "over",
      "under", "again",   "further", "then",  "once",  "here",  "there",    "when",    "where",  "why",
      "how",   "all",     "any",    "both",   "each",  "few",   "more",     "most",    "other",  "some",
      "such",  "no",      "nor",    "not",    "only",  "own",   "same",     "so",      "than",   "too",
      "very",  "can",     "will",   "just",   "don",   "should", "now",     "that",    "if",     "do"};
  return words;
}

/// Optional extra stopwords for accessor/boilerplate noise; off unless requested.
inline const std::unordered_set<std::string>& boilerplate_stopwords() {
  static const std::unordered_set<std::string> words = {"get", "set", "impl", "util"};
  return words;
}

struct TermOptions {
  bool drop_boilerplate = false;
};

/// Splits an identifier on camelCase (acronym aware), snake_case and digit
/// boundaries, and lowercases each piece. No filtering.
inline std::vector<std::string> split_identifier(std::string_view ident) {
  std::vector<std::string> parts;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) parts.push_back(std::move(cur));
    cur.clear();
  };
  const std::size_t n = ident.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto c = static_cast<unsigned char>(ident[i]);
    if (!std::isalnum(c)) {
      flush();
      continue;
    }
    if (!cur.empty()) {
      const auto prev = static_cast<unsigned char>(ident[i - 1]);
      const bool digit_edge = (std::isdigit(c) != 0) != (std::isdigit(prev) != 0);
      const bool lower_to_upper = std::isupper(c) && std::islower(prev);
      // "HTTPResponse": the 'R' starts a new word because a lowercase follows.
      const bool acronym_end = std::isupper(c) && std::isupper(prev) && i + 1 < n &&
                               std::islower(static_cast<unsigned char>(ident[i + 1]));
      if (digit_edge || lower_to_upper || acronym_end) flush();
    }
    cur += static_cast<char>(std::tolower(c));
  }
  flush();
  return parts;
}

inline bool is_filtered_term(const std::string& t, const TermOptions& opts) {
  if (t.size() < 2) return true;
  if (java::reserved_words().count(t) || t == "var") return true;
  if (english_stopwords().count(t)) return true;
  if (opts.drop_boilerplate && boilerplate_stopwords().count(t)) return true;
  return false;
}

inline void add_terms(std::string_view word, TermCounts& out, const TermOptions& opts) {
  for (auto& piece : split_identifier(word)) {
    if (!is_filtered_term(piece, opts)) ++out[piece];
  }
}

/// Term multiset of raw Java text: every identifier plus the words inside
/// string literals, split and filtered. Falls back to a plain word scan when
/// the text does not tokenize.
inline TermCounts extract_terms(std::string_view source, const TermOptions& opts = {}) {
  TermCounts out;
  try {
    for (const auto& tok : java::tokenize(source)) {
      if (tok.kind == java::TokenKind::identifier || tok.kind == java::TokenKind::string_literal) {
        add_terms(tok.text, out, opts);
      }
    }
  } catch (const java::LexError&) {
    out.clear();
    add_terms(source, out, opts);
  }
  return out;
}

}  // namespace monoembed
