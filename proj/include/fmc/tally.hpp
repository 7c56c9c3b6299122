#pragma once

#include <array>
#include <cctype>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "fmc/errors.hpp"

namespace fmc {

/// One evaluation record: true label and the two predictions for the same
/// example.
struct Record {
  std::uint8_t z;
  std::uint8_t l1;
  std::uint8_t l2;

  friend bool operator==(const Record&, const Record&) = default;
};

using PairedLabels = std::vector<Record>;

/// A function of the triple (z, l1, l2), represented as its value on each of
/// the 8 cells. Index = z*4 + l1*2 + l2.
using CellFunction = std::array<double, 8>;

constexpr int cell_index(int z, int l1, int l2) noexcept {
  return z * 4 + l1 * 2 + l2;
}

/// Builds the lookup table of `f` over the 8 triples.
template <typename F>
CellFunction make_cell_function(F&& f) {
  CellFunction g{};
  for (int z = 0; z < 2; ++z)
    for (int l1 = 0; l1 < 2; ++l1)
      for (int l2 = 0; l2 < 2; ++l2)
        g[cell_index(z, l1, l2)] = static_cast<double>(f(z, l1, l2));
  return g;
}

namespace detail {
inline void check_algorithm(int a) {
  if (a != 1 && a != 2)
    throw std::invalid_argument("algorithm index must be 1 or 2");
}
inline int prediction_of(int a, int l1, int l2) {
  check_algorithm(a);
  return a == 1 ? l1 : l2;
}
}  // namespace detail

/// Indicator of a true positive for algorithm `a` (1 or 2).
inline CellFunction tp_indicator(int a) {
  return make_cell_function(
      [a](int z, int l1, int l2) { return z * detail::prediction_of(a, l1, l2); });
}

/// Indicator of a false positive for algorithm `a`.
inline CellFunction fp_indicator(int a) {
  return make_cell_function([a](int z, int l1, int l2) {
    return detail::prediction_of(a, l1, l2) * (1 - z);
  });
}

/// Indicator of a false negative for algorithm `a`.
inline CellFunction fn_indicator(int a) {
  return make_cell_function([a](int z, int l1, int l2) {
    return z * (1 - detail::prediction_of(a, l1, l2));
  });
}

/// Indicator that algorithm `a` disagrees with the truth (FP or FN).
inline CellFunction disagreement_indicator(int a) {
  return make_cell_function([a](int z, int l1, int l2) {
    const int l = detail::prediction_of(a, l1, l2);
    return l * (1 - z) + z * (1 - l);
  });
}

/// The 2x2x2 contingency tally over (Z, L1, L2). Sufficient statistic for
/// every moment of functions of the triple, so all estimation downstream
/// consumes this instead of raw records. Immutable value; all operations on
/// it are pure.
struct JointCounts {
  std::array<std::uint64_t, 8> cells{};
  std::uint64_t n = 0;

  static JointCounts from_cells(const std::array<std::uint64_t, 8>& cells) {
    JointCounts c;
    c.cells = cells;
    for (auto v : cells) c.n += v;
    if (c.n == 0) throw EmptyInput("tally has no records");
    return c;
  }

  std::uint64_t cell(int z, int l1, int l2) const {
    return cells[cell_index(z, l1, l2)];
  }

  std::uint64_t tp(int a) const {
    detail::check_algorithm(a);
    return a == 1 ? cell(1, 1, 0) + cell(1, 1, 1) : cell(1, 0, 1) + cell(1, 1, 1);
  }
  std::uint64_t fp(int a) const {
    detail::check_algorithm(a);
    return a == 1 ? cell(0, 1, 0) + cell(0, 1, 1) : cell(0, 0, 1) + cell(0, 1, 1);
  }
  std::uint64_t fn(int a) const {
    detail::check_algorithm(a);
    return a == 1 ? cell(1, 0, 0) + cell(1, 0, 1) : cell(1, 0, 0) + cell(1, 1, 0);
  }
  std::uint64_t tn(int a) const { return n - tp(a) - fp(a) - fn(a); }

  /// Cell-wise sum; tallying shards and merging equals tallying the
  /// concatenated stream.
  friend JointCounts operator+(const JointCounts& a, const JointCounts& b) {
    JointCounts out;
    for (int i = 0; i < 8; ++i) out.cells[i] = a.cells[i] + b.cells[i];
    out.n = a.n + b.n;
    return out;
  }

  friend bool operator==(const JointCounts&, const JointCounts&) = default;
};

inline JointCounts tally_from_records(const PairedLabels& records) {
  if (records.empty()) throw EmptyInput("no records to tally");
  JointCounts counts;
  for (const Record& r : records) {
    if (r.z > 1 || r.l1 > 1 || r.l2 > 1)
      throw BadValue("record fields must be 0 or 1");
    ++counts.cells[cell_index(r.z, r.l1, r.l2)];
  }
  counts.n = records.size();
  return counts;
}

/// Sample mean of g over the tally: sum(count * g) / n.
inline double mean(const JointCounts& counts, const CellFunction& g) {
  double acc = 0.0;
  for (int i = 0; i < 8; ++i)
    acc += static_cast<double>(counts.cells[i]) * g[i];
  return acc / static_cast<double>(counts.n);
}

/// Sample covariance of g and h (population convention, divide by n).
/// Centered form: symmetric in (g,h) bit for bit, and cov(g,g) is a sum of
/// nonnegative terms.
inline double cov(const JointCounts& counts, const CellFunction& g,
                  const CellFunction& h) {
  const double mg = mean(counts, g);
  const double mh = mean(counts, h);
  double acc = 0.0;
  for (int i = 0; i < 8; ++i)
    acc += static_cast<double>(counts.cells[i]) * ((g[i] - mg) * (h[i] - mh));
  return acc / static_cast<double>(counts.n);
}

namespace detail {

inline std::string to_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

/// Splits file content into lines, accepting LF or CRLF, dropping the final
/// empty segment produced by a trailing newline.
inline std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t nl = text.find('\n', start);
    if (nl == std::string_view::npos) {
      lines.push_back(text.substr(start));
      break;
    }
    lines.push_back(text.substr(start, nl - start));
    start = nl + 1;
  }
  if (!lines.empty() && lines.back().empty()) lines.pop_back();
  for (auto& line : lines)
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return lines;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open file: " + path, 0);
  std::ostringstream buf;
  buf << in.rdbuf();
  return std::move(buf).str();
}

}  // namespace detail

/// Parses paired labels from CSV text. Header must be exactly `z,l1,l2`
/// (case-insensitive); extra columns are rejected rather than ignored so a
/// misaligned export fails loudly. Body tokens must be exactly "0" or "1".
inline PairedLabels parse_labels_csv(std::string_view text) {
  const auto lines = detail::split_lines(text);
  if (lines.empty()) throw MissingHeader("expected header z,l1,l2");

  const auto header = detail::split_fields(lines[0]);
  static constexpr const char* kExpected[] = {"z", "l1", "l2"};
  if (header.size() != 3) throw MissingHeader("expected header z,l1,l2");
  for (int i = 0; i < 3; ++i) {
    if (detail::to_lower(detail::trim(header[i])) != kExpected[i])
      throw MissingHeader("expected header z,l1,l2");
  }

  PairedLabels records;
  records.reserve(lines.size() - 1);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    const auto fields = detail::split_fields(lines[i]);
    if (fields.size() != 3)
      throw ParseError("expected 3 fields, got " + std::to_string(fields.size()),
                       line_no);
    std::uint8_t bits[3];
    for (int j = 0; j < 3; ++j) {
      if (fields[j] == "0") {
        bits[j] = 0;
      } else if (fields[j] == "1") {
        bits[j] = 1;
      } else {
        throw ParseError("field '" + std::string(fields[j]) + "' is not 0 or 1",
                         line_no);
      }
    }
    records.push_back({bits[0], bits[1], bits[2]});
  }
  if (records.empty()) throw EmptyInput("CSV has a header but no records");
  return records;
}

inline PairedLabels read_csv(const std::string& path) {
  return parse_labels_csv(detail::read_file(path));
}

}  // namespace fmc
