#include "fairalloc/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <utility>

#include "fairalloc/error.hpp"

namespace fairalloc {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

bool blank(const std::string& line) {
  return std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); });
}

[[noreturn]] void fail(std::size_t line_no, const std::string& what) {
  throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": " + what);
}

// Parses an unsigned index; rejects signs, fractions and trailing junk.
std::size_t parse_index(const std::string& token, std::size_t line_no) {
  if (token.empty() || !std::all_of(token.begin(), token.end(),
                                    [](unsigned char c) { return std::isdigit(c); })) {
    fail(line_no, "bad index '" + token + "'");
  }
  try {
    return static_cast<std::size_t>(std::stoull(token));
  } catch (const std::exception&) {
    fail(line_no, "index out of range '" + token + "'");
  }
}

double parse_value(const std::string& token, std::size_t line_no) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(token, &used);
  } catch (const std::exception&) {
    fail(line_no, "bad value '" + token + "'");
  }
  if (used != token.size()) fail(line_no, "bad value '" + token + "'");
  if (!std::isfinite(v)) fail(line_no, "non-finite value");
  return v;
}

std::vector<std::string> tokens(const std::string& line) {
  std::istringstream ss(line);
  std::vector<std::string> out;
  std::string t;
  while (ss >> t) out.push_back(t);
  return out;
}

}  // namespace

RawMatrix read_matrix_market(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw Error(ErrorCode::ParseError, "empty input");
  ++line_no;
  const std::vector<std::string> header = tokens(lower(line));
  if (header.size() != 5 || header[0] != "%%matrixmarket" || header[1] != "matrix") {
    fail(line_no, "expected a %%MatrixMarket matrix header");
  }
  if (header[2] != "coordinate" || header[3] != "real" || header[4] != "general") {
    throw Error(ErrorCode::UnsupportedStructure,
                "only 'coordinate real general' MatrixMarket files are supported");
  }

  RawMatrix out;
  std::size_t declared = 0;
  bool have_size = false;
  std::set<std::pair<std::size_t, std::size_t>> seen;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (blank(line) || line[0] == '%') continue;
    const std::vector<std::string> t = tokens(line);
    if (!have_size) {
      if (t.size() != 3) fail(line_no, "expected 'rows cols entries'");
      out.rows = parse_index(t[0], line_no);
      out.cols = parse_index(t[1], line_no);
      declared = parse_index(t[2], line_no);
      if (out.rows == 0 || out.cols == 0) fail(line_no, "dimensions must be positive");
      have_size = true;
      continue;
    }
    if (t.size() != 3) fail(line_no, "expected 'row col value'");
    if (out.entries.size() == declared) fail(line_no, "more entries than declared");
    const std::size_t i = parse_index(t[0], line_no);
    const std::size_t j = parse_index(t[1], line_no);
    const double v = parse_value(t[2], line_no);
    if (i < 1 || i > out.rows || j < 1 || j > out.cols) fail(line_no, "index out of range");
    if (v == 0.0) {
      throw Error(ErrorCode::DomainError,
                  "line " + std::to_string(line_no) + ": explicit zero entries are not allowed");
    }
    if (v < 0.0) {
      throw Error(ErrorCode::NegativeEntry, "line " + std::to_string(line_no) + ": negative entry");
    }
    if (!seen.emplace(i, j).second) {
      throw Error(ErrorCode::DuplicateEntry, "line " + std::to_string(line_no) + ": entry (" +
                                                 t[0] + ", " + t[1] + ") repeated");
    }
    out.entries.push_back({i - 1, j - 1, v});
  }
  if (!have_size) throw Error(ErrorCode::ParseError, "missing size line");
  if (out.entries.size() != declared) {
    throw Error(ErrorCode::ParseError, "declared " + std::to_string(declared) + " entries, found " +
                                           std::to_string(out.entries.size()));
  }
  return out;
}

RawMatrix read_matrix_market_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  return read_matrix_market(in);
}

void write_matrix_market(std::ostream& out, const RawMatrix& matrix) {
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << matrix.rows << ' ' << matrix.cols << ' ' << matrix.entries.size() << '\n';
  char buf[64];
  for (const Entry& e : matrix.entries) {
    std::snprintf(buf, sizeof buf, "%.17g", e.value);
    out << e.row + 1 << ' ' << e.col + 1 << ' ' << buf << '\n';
  }
}

}  // namespace fairalloc
