#pragma once

#include <string_view>
#include <vector>
#include <string>

namespace monoembed {

namespace detail {

inline bool glob_match_impl(std::string_view pat, std::string_view s) {
  while (!pat.empty()) {
    if (pat.substr(0, 2) == "**") {
      pat.remove_prefix(2);
      if (!pat.empty() && pat.front() == '/') {
        // "**/x" also matches "x" at the current level.
        if (glob_match_impl(pat.substr(1), s)) return true;
      }
      for (std::size_t i = 0; i <= s.size(); ++i) {
        if (glob_match_impl(pat, s.substr(i))) return true;
      }
      return false;
    }
    const char c = pat.front();
    if (c == '*') {
      pat.remove_prefix(1);
      for (std::size_t i = 0; i <= s.size(); ++i) {
        if (glob_match_impl(pat, s.substr(i))) return true;
        if (i < s.size() && s[i] == '/') break;
      }
      return false;
    }
    if (s.empty()) return false;
    if (c == '?' ? s.front() == '/' : c != s.front()) return false;
    pat.remove_prefix(1);
    s.remove_prefix(1);
  }
  return s.empty();
}

}  // namespace detail

/// Shell-style glob over '/'-separated paths: `*` and `?` stay within one
/// segment, `**` spans segments. A pattern without '/' is matched against the
/// file name as well as the full path.
inline bool glob_match(std::string_view pattern, std::string_view path) {
  if (detail::glob_match_impl(pattern, path)) return true;
  if (pattern.find('/') == std::string_view::npos) {
    const auto slash = path.rfind('/');
    if (slash != std::string_view::npos) return detail::glob_match_impl(pattern, path.substr(slash + 1));
  }
  return false;
}

inline bool glob_any(const std::vector<std::string>& patterns, std::string_view path) {
  for (const auto& p : patterns) {
    if (glob_match(p, path)) return true;
  }
  return false;
}

}  // namespace monoembed
