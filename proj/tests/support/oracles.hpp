// Independent reference implementations the tests check the library
// against. Everything here recomputes results from first principles with
// its own arithmetic; nothing calls the code paths under test.
#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "fmc/tally.hpp"

namespace oracle {

using TripleFn = std::function<double(int z, int l1, int l2)>;

// ---------------------------------------------------------------------------
// Record-level moments: iterate the raw stream instead of the 8-cell tally.

inline double record_mean(const fmc::PairedLabels& records, const TripleFn& g) {
  double sum = 0.0;
  for (const auto& r : records) sum += g(r.z, r.l1, r.l2);
  return sum / static_cast<double>(records.size());
}

inline double record_cov(const fmc::PairedLabels& records, const TripleFn& g,
                         const TripleFn& h) {
  double sum_g = 0.0, sum_h = 0.0, sum_gh = 0.0;
  for (const auto& r : records) {
    const double gv = g(r.z, r.l1, r.l2);
    const double hv = h(r.z, r.l1, r.l2);
    sum_g += gv;
    sum_h += hv;
    sum_gh += gv * hv;
  }
  const double n = static_cast<double>(records.size());
  return sum_gh / n - (sum_g / n) * (sum_h / n);
}

// ---------------------------------------------------------------------------
// Straight-line transcription of the covariance formula, with its own
// uncentered moment arithmetic over the 8 cells.

inline double cell_mean(const fmc::JointCounts& c, const TripleFn& g) {
  double acc = 0.0;
  for (int z = 0; z < 2; ++z)
    for (int l1 = 0; l1 < 2; ++l1)
      for (int l2 = 0; l2 < 2; ++l2)
        acc += static_cast<double>(c.cell(z, l1, l2)) * g(z, l1, l2);
  return acc / static_cast<double>(c.n);
}

inline double cell_cov(const fmc::JointCounts& c, const TripleFn& g,
                       const TripleFn& h) {
  const TripleFn gh = [&](int z, int l1, int l2) {
    return g(z, l1, l2) * h(z, l1, l2);
  };
  return cell_mean(c, gh) - cell_mean(c, g) * cell_mean(c, h);
}

/// Cov(f_a, f_b) written out term by term exactly as the formula reads, with
/// plug-in sample values for tau and kappa.
inline double straight_line_cov(const fmc::JointCounts& c, int a, int b) {
  const auto pred = [](int a, int l1, int l2) { return a == 1 ? l1 : l2; };
  const TripleFn tp_a = [&](int z, int l1, int l2) { return double(z * pred(a, l1, l2)); };
  const TripleFn tp_b = [&](int z, int l1, int l2) { return double(z * pred(b, l1, l2)); };
  const TripleFn fp_a = [&](int z, int l1, int l2) { return double(pred(a, l1, l2) * (1 - z)); };
  const TripleFn fp_b = [&](int z, int l1, int l2) { return double(pred(b, l1, l2) * (1 - z)); };
  const TripleFn fn_a = [&](int z, int l1, int l2) { return double(z * (1 - pred(a, l1, l2))); };
  const TripleFn fn_b = [&](int z, int l1, int l2) { return double(z * (1 - pred(b, l1, l2))); };
  const TripleFn dis_a = [&](int z, int l1, int l2) {
    return fp_a(z, l1, l2) + fn_a(z, l1, l2);
  };
  const TripleFn dis_b = [&](int z, int l1, int l2) {
    return fp_b(z, l1, l2) + fn_b(z, l1, l2);
  };

  const double tau_a =
      2.0 * double(c.tp(a)) / double(2 * c.tp(a) + c.fp(a) + c.fn(a));
  const double tau_b =
      2.0 * double(c.tp(b)) / double(2 * c.tp(b) + c.fp(b) + c.fn(b));
  const double kap_a = 1.0 / tau_a - 1.0;
  const double kap_b = 1.0 / tau_b - 1.0;

  const double bracket = cell_cov(c, dis_a, fp_b) + cell_cov(c, dis_a, fn_b) -
                         kap_a * cell_cov(c, tp_a, dis_b) -
                         kap_b * cell_cov(c, tp_b, dis_a) +
                         kap_a * kap_b * cell_cov(c, tp_a, tp_b);
  return tau_a * tau_a * tau_b * tau_b * bracket /
         (double(c.n) * 4.0 * cell_mean(c, tp_a) * cell_mean(c, tp_b));
}

// ---------------------------------------------------------------------------
// Reference Philox4x32-10 block, transcribed from the published algorithm
// with the multiply/xor schedule written longhand.

inline std::array<std::uint32_t, 4> philox_block(
    std::array<std::uint32_t, 4> ctr, std::array<std::uint32_t, 2> key) {
  const auto mulhilo = [](std::uint32_t a, std::uint32_t b, std::uint32_t& lo,
                          std::uint32_t& hi) {
    const std::uint64_t product = static_cast<std::uint64_t>(a) * b;
    lo = static_cast<std::uint32_t>(product);
    hi = static_cast<std::uint32_t>(product >> 32);
  };
  for (int i = 0; i < 10; ++i) {
    std::uint32_t lo0, hi0, lo1, hi1;
    mulhilo(0xD2511F53u, ctr[0], lo0, hi0);
    mulhilo(0xCD9E8D57u, ctr[2], lo1, hi1);
    const std::array<std::uint32_t, 4> next = {
        hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    ctr = next;
    key[0] += 0x9E3779B9u;
    key[1] += 0xBB67AE85u;
  }
  return ctr;
}

// ---------------------------------------------------------------------------
// Brute-force classifiers.

/// Nearest neighbor by exhaustive scan over min-max-scaled features,
/// recomputing the scaling itself. Ties go to the lowest training index via
/// the strict comparison.
inline int brute_force_1nn(const std::vector<std::vector<double>>& train_rows,
                           const std::vector<int>& train_labels,
                           std::span<const double> query) {
  const std::size_t d = query.size();
  std::vector<double> lo(d, 1e300), hi(d, -1e300);
  for (const auto& row : train_rows)
    for (std::size_t j = 0; j < d; ++j) {
      if (row[j] < lo[j]) lo[j] = row[j];
      if (row[j] > hi[j]) hi[j] = row[j];
    }
  const auto scale = [&](double v, std::size_t j) {
    return hi[j] > lo[j] ? (v - lo[j]) / (hi[j] - lo[j]) : 0.0;
  };
  int best_label = train_labels[0];
  double best = 1e300;
  for (std::size_t i = 0; i < train_rows.size(); ++i) {
    double dist = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      const double diff = scale(train_rows[i][j], j) - scale(query[j], j);
      dist += diff * diff;
    }
    if (dist < best) {
      best = dist;
      best_label = train_labels[i];
    }
  }
  return best_label;
}

/// Minimum training error over every (feature, midpoint, polarity) rule,
/// counting misclassifications one row at a time.
inline std::uint64_t brute_force_stump_error(
    const std::vector<std::vector<double>>& rows,
    const std::vector<int>& labels) {
  const std::size_t d = rows.at(0).size();
  std::uint64_t best = ~std::uint64_t{0};
  for (std::size_t j = 0; j < d; ++j) {
    std::vector<double> values;
    values.reserve(rows.size());
    for (const auto& r : rows) values.push_back(r[j]);
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    for (std::size_t k = 0; k + 1 < values.size(); ++k) {
      const double t = values[k] + (values[k + 1] - values[k]) / 2.0;
      for (const bool positive_above : {true, false}) {
        std::uint64_t errors = 0;
        for (std::size_t i = 0; i < rows.size(); ++i) {
          const int predicted = (rows[i][j] > t) == positive_above ? 1 : 0;
          if (predicted != labels[i]) ++errors;
        }
        if (errors < best) best = errors;
      }
    }
  }
  return best;
}

}  // namespace oracle
