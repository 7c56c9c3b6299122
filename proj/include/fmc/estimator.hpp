#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>

#include "fmc/errors.hpp"
#include "fmc/tally.hpp"

namespace fmc {

enum class Method { jvesr, independent };

inline const char* to_string(Method m) {
  return m == Method::jvesr ? "jvesr" : "independent";
}

inline Method method_from_string(const std::string& s) {
  if (s == "jvesr") return Method::jvesr;
  if (s == "independent") return Method::independent;
  throw BadValue("unknown method '" + s + "' (expected jvesr or independent)");
}

/// Var(f1 - f2) at or below this is treated as exactly zero; identical
/// prediction columns cancel to rounding noise, not to a clean 0.
inline constexpr double kDegenerateVarDiff = 1e-15;

/// Small-sample flag thresholds: the asymptotics degrade with few true
/// positives or an F-measure near either boundary. Estimates are not
/// altered, only flagged.
inline constexpr std::uint64_t kSmallSampleTpThreshold = 5;
inline constexpr double kSmallSampleFLow = 0.05;
inline constexpr double kSmallSampleFHigh = 0.95;

/// F-measure 2TP/(2TP+FP+FN). Zero when TP=0 with errors present; undefined
/// (0/0) when all three counts are zero.
inline double f_measure(std::uint64_t tp, std::uint64_t fp, std::uint64_t fn) {
  const std::uint64_t denom = 2 * tp + fp + fn;
  if (denom == 0)
    throw UndefinedStatistic("F-measure is 0/0 when TP=FP=FN=0");
  return static_cast<double>(2 * tp) / static_cast<double>(denom);
}

/// The complement ratio kappa = 1/F - 1 = (FP+FN)/(2TP), the quantity the
/// covariance formula is built around.
inline double kappa(std::uint64_t tp, std::uint64_t fp, std::uint64_t fn) {
  if (tp == 0)
    throw UndefinedStatistic("kappa undefined when TP=0");
  return static_cast<double>(fp + fn) / static_cast<double>(2 * tp);
}

/// Two-sided standard-normal tail probability of |z|.
inline double normal_two_sided_p(double z) {
  return std::erfc(std::abs(z) / std::sqrt(2.0));
}

/// Plug-in asymptotic covariance of (kappa_1, kappa_2), the delta-method
/// intermediate:
///
///   Cov(k_a, k_b) = [ Cov(D_a, FP_b) + Cov(D_a, FN_b)
///                     - k_a Cov(T_a, D_b) - k_b Cov(T_b, D_a)
///                     + k_a k_b Cov(T_a, T_b) ] / (4 n E(T_a) E(T_b))
///
/// with T the true-positive indicator, FP/FN the error indicators, and
/// D = FP + FN. All moments are sample analogues from the tally. The
/// expression is symmetric in (a, b); arguments are canonicalized so both
/// orders run the identical float sequence.
inline double kappa_cov(const JointCounts& counts, int a, int b) {
  detail::check_algorithm(a);
  detail::check_algorithm(b);
  if (a > b) std::swap(a, b);
  if (counts.tp(a) == 0 || counts.tp(b) == 0)
    throw InfiniteVariance("zero true positives for algorithm " +
                           std::to_string(counts.tp(a) == 0 ? a : b));

  const CellFunction t_a = tp_indicator(a);
  const CellFunction t_b = tp_indicator(b);
  const CellFunction d_a = disagreement_indicator(a);
  const CellFunction d_b = disagreement_indicator(b);
  const double k_a = kappa(counts.tp(a), counts.fp(a), counts.fn(a));
  const double k_b = kappa(counts.tp(b), counts.fp(b), counts.fn(b));

  const double bracket = cov(counts, d_a, fp_indicator(b)) +
                         cov(counts, d_a, fn_indicator(b)) -
                         k_a * cov(counts, t_a, d_b) -
                         k_b * cov(counts, t_b, d_a) +
                         (k_a * k_b) * cov(counts, t_a, t_b);
  const double scale = 4.0 * static_cast<double>(counts.n) *
                       (mean(counts, t_a) * mean(counts, t_b));
  return bracket / scale;
}

/// Plug-in asymptotic covariance of the two F-measures,
/// Cov(f_a, f_b) = f_a^2 f_b^2 Cov(k_a, k_b). With a == b this is the
/// single-algorithm variance. Symmetric in (a, b) bit for bit.
inline double jvesr_cov(const JointCounts& counts, int a, int b) {
  const double f_a = f_measure(counts.tp(a), counts.fp(a), counts.fn(a));
  const double f_b = f_measure(counts.tp(b), counts.fp(b), counts.fn(b));
  return (f_a * f_a) * (f_b * f_b) * kappa_cov(counts, a, b);
}

/// Per-algorithm summary. `f`, `kappa`, `var` are disengaged only in the
/// degenerate cases a lenient comparison can encounter (no positive class at
/// all, or zero true positives).
struct FStats {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;
  std::optional<double> f;
  std::optional<double> kappa;
  std::optional<double> var;
  bool small_sample = false;
};

enum class ComparisonStatus { ok, infinite_variance, degenerate_difference };

inline const char* to_string(ComparisonStatus s) {
  switch (s) {
    case ComparisonStatus::ok: return "ok";
    case ComparisonStatus::infinite_variance: return "infinite_variance";
    default: return "degenerate_difference";
  }
}

struct ComparisonReport {
  FStats stats1;
  FStats stats2;
  std::optional<double> cov12;
  std::optional<double> corr;
  std::optional<double> var_diff;
  std::optional<double> z;
  std::optional<double> p_value;
  std::optional<bool> significant;
  Method method = Method::jvesr;
  double alpha = 0.05;
  std::uint64_t n = 0;
  ComparisonStatus status = ComparisonStatus::ok;
};

namespace detail {

inline FStats algorithm_stats(const JointCounts& counts, int a) {
  FStats s;
  s.tp = counts.tp(a);
  s.fp = counts.fp(a);
  s.fn = counts.fn(a);
  if (s.tp + s.fp + s.fn > 0) s.f = f_measure(s.tp, s.fp, s.fn);
  if (s.tp > 0) {
    s.kappa = kappa(s.tp, s.fp, s.fn);
    s.var = jvesr_cov(counts, a, a);
  }
  s.small_sample = s.tp < kSmallSampleTpThreshold ||
                   (s.f && (*s.f < kSmallSampleFLow || *s.f > kSmallSampleFHigh));
  return s;
}

}  // namespace detail

/// Comparison that never throws for statistical degeneracies: the report is
/// always populated as far as the data allows, with `status` saying what is
/// missing. Used by the CLI so a degenerate comparison still prints.
inline ComparisonReport try_compare(const JointCounts& counts, Method method,
                                    double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("alpha must be in (0,1)");
  ComparisonReport report;
  report.method = method;
  report.alpha = alpha;
  report.n = counts.n;
  report.stats1 = detail::algorithm_stats(counts, 1);
  report.stats2 = detail::algorithm_stats(counts, 2);

  if (!report.stats1.var || !report.stats2.var) {
    report.status = ComparisonStatus::infinite_variance;
    return report;
  }

  const double var1 = *report.stats1.var;
  const double var2 = *report.stats2.var;
  const double cov12 =
      method == Method::jvesr ? jvesr_cov(counts, 1, 2) : 0.0;
  report.cov12 = cov12;
  if (method == Method::independent) {
    report.corr = 0.0;
  } else if (var1 > 0.0 && var2 > 0.0) {
    report.corr = cov12 / std::sqrt(var1 * var2);
  }
  const double var_diff = var1 + var2 - 2.0 * cov12;
  report.var_diff = var_diff;

  if (var_diff <= kDegenerateVarDiff) {
    report.status = ComparisonStatus::degenerate_difference;
    return report;
  }

  const double z =
      (*report.stats1.f - *report.stats2.f) / std::sqrt(var_diff);
  report.z = z;
  report.p_value = normal_two_sided_p(z);
  report.significant = *report.p_value < alpha;
  return report;
}

/// Full paired comparison of the two algorithms on one tally. Throws
/// InfiniteVariance when either algorithm has zero true positives and
/// DegenerateDifference when Var(f1 - f2) vanishes (e.g. identical
/// prediction columns), in line with the exclusion rules the Monte-Carlo
/// harness applies.
inline ComparisonReport compare(const JointCounts& counts, Method method,
                                double alpha) {
  ComparisonReport report = try_compare(counts, method, alpha);
  if (report.status == ComparisonStatus::infinite_variance)
    throw InfiniteVariance("zero true positives; variance is infinite");
  if (report.status == ComparisonStatus::degenerate_difference)
    throw DegenerateDifference("Var(f1 - f2) is zero within tolerance");
  return report;
}

}  // namespace fmc
