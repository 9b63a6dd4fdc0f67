#pragma once

// Small line-format parsing helpers shared by the grammar, model and
// lattice loaders.

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "latchart/core.hpp"

namespace latchart::detail {

inline std::vector<std::string> split_tokens(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

inline std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& tok, const char* module,
                           int line) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(tok, &pos);
  } catch (const std::exception&) {
    throw FileFormatError(module, line, "expected number, got '" + tok + "'");
  }
  if (pos != tok.size() || !std::isfinite(v))
    throw FileFormatError(module, line, "expected number, got '" + tok + "'");
  return v;
}

inline double parse_log_prob(const std::string& tok, const char* module,
                             int line) {
  double v = parse_double(tok, module, line);
  if (v > 0.0)
    throw FileFormatError(module, line,
                          "log-probability must be non-positive: " + tok);
  return v;
}

inline long parse_int(const std::string& tok, const char* module, int line) {
  std::size_t pos = 0;
  long v = 0;
  try {
    v = std::stol(tok, &pos);
  } catch (const std::exception&) {
    throw FileFormatError(module, line,
                          "expected integer, got '" + tok + "'");
  }
  if (pos != tok.size())
    throw FileFormatError(module, line,
                          "expected integer, got '" + tok + "'");
  return v;
}

// Strips a '#' comment and returns the trimmed remainder.
inline std::string strip_comment(const std::string& raw) {
  std::size_t hash = raw.find('#');
  return trim(hash == std::string::npos ? raw : raw.substr(0, hash));
}

inline std::vector<std::string> split_path(const std::string& s) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    std::size_t dot = s.find('.', start);
    if (dot == std::string::npos) {
      parts.push_back(s.substr(start));
      break;
    }
    parts.push_back(s.substr(start, dot - start));
    start = dot + 1;
  }
  return parts;
}

}  // namespace latchart::detail
