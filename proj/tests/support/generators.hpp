// Deterministic input generators for the property and oracle tests. All
// randomness flows through the library's own counter-based engine so a test
// failure always reproduces.
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "fmc/montecarlo.hpp"
#include "fmc/pipeline.hpp"
#include "fmc/rng.hpp"
#include "fmc/tally.hpp"

namespace gen {

/// Random tally with cells uniform on [0, max_cell] and the (1,1,1) cell
/// forced positive so both algorithms have TP >= 1.
inline fmc::JointCounts random_tally(fmc::Philox4x32& rng,
                                     std::uint64_t max_cell) {
  std::array<std::uint64_t, 8> cells{};
  for (auto& c : cells) c = rng.next_below(max_cell + 1);
  cells[fmc::cell_index(1, 1, 1)] = 1 + rng.next_below(max_cell + 1);
  return fmc::JointCounts::from_cells(cells);
}

/// Uniform random record stream over the 8 triples.
inline fmc::PairedLabels random_records(fmc::Philox4x32& rng,
                                        std::size_t count) {
  fmc::PairedLabels records;
  records.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const auto bits = rng.next_below(8);
    records.push_back({static_cast<std::uint8_t>(bits >> 2 & 1),
                       static_cast<std::uint8_t>(bits >> 1 & 1),
                       static_cast<std::uint8_t>(bits & 1)});
  }
  return records;
}

/// Joint pmf from the class rate and the per-class prediction table:
/// q1/q2 are P(L_a=1 | Z=z) and both11 is P(L1=1, L2=1 | Z=z). Choosing
/// both11 above q1*q2 couples the rules positively, below it negatively.
struct ClassConditional {
  double q1;
  double q2;
  double both11;
};

inline fmc::JointPmf make_pmf(double positive_rate,
                              const ClassConditional& given_positive,
                              const ClassConditional& given_negative) {
  std::array<double, 8> p{};
  const ClassConditional* cond[2] = {&given_negative, &given_positive};
  const double pz[2] = {1.0 - positive_rate, positive_rate};
  for (int z = 0; z < 2; ++z) {
    const auto& c = *cond[z];
    p[fmc::cell_index(z, 1, 1)] = pz[z] * c.both11;
    p[fmc::cell_index(z, 1, 0)] = pz[z] * (c.q1 - c.both11);
    p[fmc::cell_index(z, 0, 1)] = pz[z] * (c.q2 - c.both11);
    p[fmc::cell_index(z, 0, 0)] = pz[z] * (1.0 - c.q1 - c.q2 + c.both11);
  }
  return fmc::JointPmf::from_probabilities(p);
}

/// Standard normal via Box-Muller (two uniforms per call).
inline double normal(fmc::Philox4x32& rng) {
  const double u1 = 1.0 - rng.next_unit();
  const double u2 = rng.next_unit();
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * 3.14159265358979323846 * u2);
}

/// Two overlapping Gaussian blobs. Class centers sit `separation` apart on
/// every axis, so the blobs overlap enough that the trained rules stay
/// imperfect and correlated.
inline fmc::Dataset make_blobs(std::size_t rows, double positive_fraction,
                               std::size_t dims, double separation,
                               std::uint64_t seed) {
  fmc::Dataset data;
  data.n_features = dims;
  for (std::size_t j = 0; j < dims; ++j)
    data.feature_names.push_back("x" + std::to_string(j));
  fmc::Philox4x32 rng(seed);
  const auto positives = static_cast<std::size_t>(
      std::llround(positive_fraction * static_cast<double>(rows)));
  std::vector<double> row(dims);
  for (std::size_t i = 0; i < rows; ++i) {
    const std::uint8_t label = i < positives ? 1 : 0;
    for (std::size_t j = 0; j < dims; ++j)
      row[j] = (label ? separation : 0.0) + normal(rng);
    data.append_row(row, label);
  }
  return data;
}

/// CSV rendering of a dataset, for tests that exercise file-based entry
/// points.
inline std::string to_csv(const fmc::Dataset& data,
                          const std::string& label_column) {
  std::string out;
  for (const auto& name : data.feature_names) out += name + ",";
  out += label_column + "\n";
  char buf[40];
  for (std::size_t i = 0; i < data.rows(); ++i) {
    const auto row = data.row(i);
    for (double v : row) {
      std::snprintf(buf, sizeof buf, "%.17g", v);
      out += buf;
      out += ',';
    }
    out += data.labels[i] ? "1\n" : "0\n";
  }
  return out;
}

}  // namespace gen
