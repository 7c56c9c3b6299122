#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <thread>
#include <vector>

#include "fmc/errors.hpp"
#include "fmc/estimator.hpp"
#include "fmc/rng.hpp"
#include "fmc/tally.hpp"

#include "json.hpp"

namespace fmc {

/// Joint distribution of (Z, L1, L2) over the 8 triples, indexed like
/// JointCounts cells.
struct JointPmf {
  std::array<double, 8> p{};

  /// Validates and renormalizes. Sums farther than 1e-9 from 1 are rejected
  /// as data errors; anything inside that band is treated as rounding from
  /// whoever wrote the file and scaled to sum exactly to 1.
  static JointPmf from_probabilities(const std::array<double, 8>& raw) {
    double sum = 0.0;
    for (double v : raw) {
      if (!(v >= 0.0) || !std::isfinite(v))
        throw BadValue("pmf entries must be finite and >= 0");
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-9)
      throw BadValue("pmf sums to " + std::to_string(sum) +
                     ", outside 1 +/- 1e-9");
    JointPmf pmf;
    for (int i = 0; i < 8; ++i) pmf.p[i] = raw[i] / sum;
    return pmf;
  }

  double cell(int z, int l1, int l2) const { return p[cell_index(z, l1, l2)]; }

  /// P(Z=1, L_a=1): the mass whose absence makes the variance infinite.
  double positive_rate(int a) const {
    detail::check_algorithm(a);
    return a == 1 ? cell(1, 1, 0) + cell(1, 1, 1)
                  : cell(1, 0, 1) + cell(1, 1, 1);
  }

  double mean(const CellFunction& g) const {
    double acc = 0.0;
    for (int i = 0; i < 8; ++i) acc += p[i] * g[i];
    return acc;
  }

  double cov(const CellFunction& g, const CellFunction& h) const {
    const double mg = mean(g), mh = mean(h);
    double acc = 0.0;
    for (int i = 0; i < 8; ++i) acc += p[i] * ((g[i] - mg) * (h[i] - mh));
    return acc;
  }
};

/// Parses the pmf file format: a JSON object keyed by the three digits
/// (z, l1, l2), e.g. {"101": 0.25, ...}. Missing keys mean zero mass.
inline JointPmf parse_pmf_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw BadValue(std::string("pmf file is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw BadValue("pmf file must be a JSON object");
  std::array<double, 8> raw{};
  for (const auto& [key, value] : doc.items()) {
    if (key.size() != 3 ||
        key.find_first_not_of("01") != std::string::npos)
      throw BadValue("unknown pmf key '" + key +
                     "' (expected three 0/1 digits z,l1,l2)");
    if (!value.is_number())
      throw BadValue("pmf value for '" + key + "' is not a number");
    raw[cell_index(key[0] - '0', key[1] - '0', key[2] - '0')] =
        value.get<double>();
  }
  return JointPmf::from_probabilities(raw);
}

inline JointPmf load_pmf(const std::string& path) {
  return parse_pmf_json(detail::read_file(path));
}

/// True F-measure of algorithm `a` under the distribution.
inline double asymptotic_f_measure(const JointPmf& pmf, int a) {
  const double tp = pmf.mean(tp_indicator(a));
  const double fp = pmf.mean(fp_indicator(a));
  const double fn = pmf.mean(fn_indicator(a));
  if (2.0 * tp + fp + fn == 0.0)
    throw UndefinedStatistic("F-measure is 0/0 under this distribution");
  return 2.0 * tp / (2.0 * tp + fp + fn);
}

/// The covariance formula evaluated at the exact distribution rather than a
/// sampled tally: the large-n limit the plug-in estimator is chasing. Used
/// as the analytic side of the Monte-Carlo validation.
inline double asymptotic_cov(const JointPmf& pmf, std::uint64_t n, int a,
                             int b) {
  detail::check_algorithm(a);
  detail::check_algorithm(b);
  if (a > b) std::swap(a, b);
  if (pmf.positive_rate(a) == 0.0 || pmf.positive_rate(b) == 0.0)
    throw InfiniteVariance("distribution gives zero true-positive mass");

  const CellFunction t_a = tp_indicator(a);
  const CellFunction t_b = tp_indicator(b);
  const CellFunction d_a = disagreement_indicator(a);
  const CellFunction d_b = disagreement_indicator(b);
  const double e_a = pmf.mean(t_a);
  const double e_b = pmf.mean(t_b);
  const double k_a = pmf.mean(d_a) / (2.0 * e_a);
  const double k_b = pmf.mean(d_b) / (2.0 * e_b);
  const double f_a = asymptotic_f_measure(pmf, a);
  const double f_b = asymptotic_f_measure(pmf, b);

  const double bracket = pmf.cov(d_a, fp_indicator(b)) +
                         pmf.cov(d_a, fn_indicator(b)) -
                         k_a * pmf.cov(t_a, d_b) -
                         k_b * pmf.cov(t_b, d_a) +
                         (k_a * k_b) * pmf.cov(t_a, t_b);
  const double scale = 4.0 * static_cast<double>(n) * (e_a * e_b);
  return (f_a * f_a) * (f_b * f_b) * bracket / scale;
}

/// One i.i.d. test set of size n, tallied. Counts are multinomial(n, pmf).
/// Deterministic given (pmf, n, engine state); records are drawn by CDF
/// inversion in cell-index order, one uniform per record.
inline JointCounts sample_test_set(const JointPmf& pmf, std::uint64_t n,
                                   Philox4x32& rng) {
  if (n == 0) throw EmptyInput("test set size must be >= 1");
  std::array<double, 8> cdf{};
  double acc = 0.0;
  for (int i = 0; i < 8; ++i) {
    acc += pmf.p[i];
    cdf[i] = acc;
  }
  cdf[7] = 1.0;  // guard against accumulated rounding; next_unit() < 1

  JointCounts counts;
  counts.n = n;
  for (std::uint64_t k = 0; k < n; ++k) {
    const double u = rng.next_unit();
    int cell = 0;
    while (u >= cdf[cell]) ++cell;
    ++counts.cells[cell];
  }
  return counts;
}

inline JointCounts sample_test_set(const JointPmf& pmf, std::uint64_t n,
                                   std::uint64_t seed) {
  Philox4x32 rng(seed);
  return sample_test_set(pmf, n, rng);
}

/// n records drawn uniformly with replacement from the pool, tallied.
inline JointCounts subsample_pool(const PairedLabels& pool, std::uint64_t n,
                                  std::uint64_t seed) {
  if (pool.empty()) throw EmptyInput("pool is empty");
  if (n == 0) throw EmptyInput("subsample size must be >= 1");
  Philox4x32 rng(seed);
  JointCounts counts;
  counts.n = n;
  for (std::uint64_t k = 0; k < n; ++k) {
    const Record& r = pool[rng.next_below(pool.size())];
    ++counts.cells[cell_index(r.z, r.l1, r.l2)];
  }
  return counts;
}

/// Aggregated simulation output: empirical ("simulated") moments of the
/// paired F-measures next to the averaged analytic estimates over the same
/// retained draws. Undefined entries (e.g. a correlation when a variance is
/// zero) are NaN and serialize as null.
struct SimResult {
  std::uint64_t reps_total = 0;
  std::uint64_t reps_retained = 0;
  double mean_f1 = std::numeric_limits<double>::quiet_NaN();
  double mean_f2 = std::numeric_limits<double>::quiet_NaN();
  double emp_var1 = std::numeric_limits<double>::quiet_NaN();
  double emp_var2 = std::numeric_limits<double>::quiet_NaN();
  double emp_cov = std::numeric_limits<double>::quiet_NaN();
  double emp_corr = std::numeric_limits<double>::quiet_NaN();
  double emp_z = std::numeric_limits<double>::quiet_NaN();
  double mean_analytic_var1 = std::numeric_limits<double>::quiet_NaN();
  double mean_analytic_var2 = std::numeric_limits<double>::quiet_NaN();
  double mean_analytic_cov = std::numeric_limits<double>::quiet_NaN();
  double mean_analytic_corr = std::numeric_limits<double>::quiet_NaN();
  double mean_z_analytic = std::numeric_limits<double>::quiet_NaN();
};

namespace detail {

struct ReplicateOutcome {
  bool retained = false;
  bool corr_defined = false;
  bool z_defined = false;
  double f1 = 0, f2 = 0;
  double var1 = 0, var2 = 0, cov12 = 0;
  double corr = 0, z = 0;
};

inline ReplicateOutcome evaluate_replicate(const JointCounts& counts) {
  ReplicateOutcome out;
  if (counts.tp(1) == 0 || counts.tp(2) == 0) return out;
  out.retained = true;
  out.f1 = f_measure(counts.tp(1), counts.fp(1), counts.fn(1));
  out.f2 = f_measure(counts.tp(2), counts.fp(2), counts.fn(2));
  out.var1 = jvesr_cov(counts, 1, 1);
  out.var2 = jvesr_cov(counts, 2, 2);
  out.cov12 = jvesr_cov(counts, 1, 2);
  if (out.var1 > 0.0 && out.var2 > 0.0) {
    out.corr_defined = true;
    out.corr = out.cov12 / std::sqrt(out.var1 * out.var2);
  }
  const double var_diff = out.var1 + out.var2 - 2.0 * out.cov12;
  if (var_diff > kDegenerateVarDiff) {
    out.z_defined = true;
    out.z = (out.f1 - out.f2) / std::sqrt(var_diff);
  }
  return out;
}

/// Runs `work(i)` for i in [0, count) across `threads` contiguous chunks.
/// Work items must be independent; the caller reduces in index order.
template <typename Work>
void parallel_for(std::uint64_t count, int threads, Work&& work) {
  const int width = std::max(1, threads);
  if (width == 1 || count < 2) {
    for (std::uint64_t i = 0; i < count; ++i) work(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(width);
  const std::uint64_t chunk = (count + width - 1) / width;
  for (int t = 0; t < width; ++t) {
    const std::uint64_t begin = chunk * t;
    const std::uint64_t end = std::min(count, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&work, begin, end] {
      for (std::uint64_t i = begin; i < end; ++i) work(i);
    });
  }
  for (auto& th : pool) th.join();
}

/// Index-ordered reduction of per-replicate outcomes; identical result for
/// any execution order of the replicates themselves.
inline SimResult reduce_outcomes(const std::vector<ReplicateOutcome>& reps) {
  SimResult result;
  result.reps_total = reps.size();

  std::uint64_t retained = 0, corr_count = 0, z_count = 0;
  double sum_f1 = 0, sum_f2 = 0;
  double sum_var1 = 0, sum_var2 = 0, sum_cov = 0;
  double sum_corr = 0, sum_z = 0;
  for (const auto& r : reps) {
    if (!r.retained) continue;
    ++retained;
    sum_f1 += r.f1;
    sum_f2 += r.f2;
    sum_var1 += r.var1;
    sum_var2 += r.var2;
    sum_cov += r.cov12;
    if (r.corr_defined) {
      ++corr_count;
      sum_corr += r.corr;
    }
    if (r.z_defined) {
      ++z_count;
      sum_z += r.z;
    }
  }
  result.reps_retained = retained;
  if (retained == 0) throw NoRetainedReps("every draw had zero true positives");

  const double m = static_cast<double>(retained);
  result.mean_f1 = sum_f1 / m;
  result.mean_f2 = sum_f2 / m;
  result.mean_analytic_var1 = sum_var1 / m;
  result.mean_analytic_var2 = sum_var2 / m;
  result.mean_analytic_cov = sum_cov / m;
  if (corr_count > 0)
    result.mean_analytic_corr = sum_corr / static_cast<double>(corr_count);
  if (z_count > 0)
    result.mean_z_analytic = sum_z / static_cast<double>(z_count);

  if (retained >= 2) {
    double ss1 = 0, ss2 = 0, ss12 = 0;
    for (const auto& r : reps) {
      if (!r.retained) continue;
      const double d1 = r.f1 - result.mean_f1;
      const double d2 = r.f2 - result.mean_f2;
      ss1 += d1 * d1;
      ss2 += d2 * d2;
      ss12 += d1 * d2;
    }
    // The meta-experiment treats the retained draws as the sample, hence the
    // unbiased divide-by-(m-1) convention here, unlike the plug-in moments.
    result.emp_var1 = ss1 / (m - 1.0);
    result.emp_var2 = ss2 / (m - 1.0);
    result.emp_cov = ss12 / (m - 1.0);
    if (result.emp_var1 > 0.0 && result.emp_var2 > 0.0)
      result.emp_corr =
          result.emp_cov / std::sqrt(result.emp_var1 * result.emp_var2);
    const double emp_var_diff =
        result.emp_var1 + result.emp_var2 - 2.0 * result.emp_cov;
    if (emp_var_diff > 0.0)
      result.emp_z = (result.mean_f1 - result.mean_f2) / std::sqrt(emp_var_diff);
  }
  return result;
}

}  // namespace detail

/// Draws `reps` test sets of size n from the pmf and summarizes both the
/// empirical moments of (f1, f2) and the averaged analytic estimates over
/// the retained draws. Draws where either algorithm has zero true positives
/// are excluded from every average (their variance is infinite); the
/// retained count is reported. Replicate r uses
/// derive_seed(seed, kSeedDomainReplicate, r), so the result is a pure
/// function of (pmf, n, reps, seed) regardless of `threads`.
inline SimResult run_validation(const JointPmf& pmf, std::uint64_t n,
                                std::uint64_t reps, std::uint64_t seed,
                                int threads = 1) {
  if (reps < 2) throw std::invalid_argument("reps must be >= 2");
  std::vector<detail::ReplicateOutcome> outcomes(reps);
  detail::parallel_for(reps, threads, [&](std::uint64_t r) {
    const JointCounts counts =
        sample_test_set(pmf, n, derive_seed(seed, kSeedDomainReplicate, r));
    outcomes[r] = detail::evaluate_replicate(counts);
  });
  return detail::reduce_outcomes(outcomes);
}

}  // namespace fmc
