#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "reslin/gf2.hpp"

namespace reslin {

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ", column " +
                           std::to_string(column) + ": " + what),
        line(line),
        column(column) {}
  std::size_t line;
  std::size_t column;
};

namespace textio {

// Splits into lines; the trailing newline is optional. '\r' is not stripped,
// the formats are plain LF text.
inline std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) {
      if (start < text.size()) lines.push_back(text.substr(start));
      break;
    }
    lines.push_back(text.substr(start, end - start));
    start = end + 1;
  }
  return lines;
}

inline bool is_comment(std::string_view line) {
  return line == "c" || line.substr(0, 2) == "c ";
}

inline bool is_blank(std::string_view line) {
  return line.find_first_not_of(" \t") == std::string_view::npos;
}

inline std::vector<std::string_view> split_tokens(std::string_view line) {
  std::vector<std::string_view> toks;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
    if (j > i) toks.push_back(line.substr(i, j - i));
    i = j;
  }
  return toks;
}

inline long parse_int(std::string_view tok, std::size_t line, std::size_t col) {
  if (tok.empty()) throw ParseError(line, col, "expected a number");
  long v = 0;
  for (char c : tok) {
    if (c < '0' || c > '9') throw ParseError(line, col, "bad number '" + std::string(tok) + "'");
    v = v * 10 + (c - '0');
    if (v > 1'000'000'000L) throw ParseError(line, col, "number out of range");
  }
  return v;
}

// A form token is "i1+i2+...+ik" with strictly increasing 1-based variable
// indices; the single token "0" denotes the zero form.
inline BitVec parse_form(std::string_view tok, std::size_t nvars, std::size_t line,
                         std::size_t col) {
  BitVec form(nvars);
  if (tok == "0") return form;
  long prev = 0;
  std::size_t start = 0;
  while (start <= tok.size()) {
    std::size_t plus = tok.find('+', start);
    std::string_view part =
        plus == std::string_view::npos ? tok.substr(start) : tok.substr(start, plus - start);
    long idx = parse_int(part, line, col + start);
    if (idx < 1 || static_cast<std::size_t>(idx) > nvars)
      throw ParseError(line, col + start,
                       "variable index " + std::to_string(idx) + " out of range [1," +
                           std::to_string(nvars) + "]");
    if (idx <= prev)
      throw ParseError(line, col + start, "variable indices must be strictly increasing");
    prev = idx;
    form.set(static_cast<std::size_t>(idx - 1), true);
    if (plus == std::string_view::npos) break;
    start = plus + 1;
  }
  return form;
}

// A literal token is "<form>=<b>" with b in {0,1}.
inline LinEquation parse_literal(std::string_view tok, std::size_t nvars, std::size_t line,
                                 std::size_t col) {
  std::size_t eq = tok.find('=');
  if (eq == std::string_view::npos || eq + 2 != tok.size())
    throw ParseError(line, col, "bad literal '" + std::string(tok) + "'");
  char b = tok[eq + 1];
  if (b != '0' && b != '1')
    throw ParseError(line, col + eq + 1, "right-hand side must be 0 or 1");
  return LinEquation(parse_form(tok.substr(0, eq), nvars, line, col), b == '1');
}

inline std::string write_form(const BitVec& form) {
  if (form.none()) return "0";
  std::string s;
  for (std::size_t i = 0; i < form.size(); ++i) {
    if (!form.get(i)) continue;
    if (!s.empty()) s.push_back('+');
    s += std::to_string(i + 1);
  }
  return s;
}

inline std::string write_literal(const LinEquation& lit) {
  return write_form(lit.form) + "=" + (lit.rhs ? "1" : "0");
}

}  // namespace textio
}  // namespace reslin
