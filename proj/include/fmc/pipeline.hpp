#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "fmc/errors.hpp"
#include "fmc/estimator.hpp"
#include "fmc/montecarlo.hpp"
#include "fmc/rng.hpp"
#include "fmc/tally.hpp"

namespace fmc {

/// Tabular data with numeric features and a binary label per row.
/// Row-major, rows() x n_features.
struct Dataset {
  std::size_t n_features = 0;
  std::vector<double> features;
  std::vector<std::uint8_t> labels;
  std::vector<std::string> feature_names;

  std::size_t rows() const { return labels.size(); }

  std::span<const double> row(std::size_t i) const {
    return {features.data() + i * n_features, n_features};
  }

  void append_row(std::span<const double> values, std::uint8_t label) {
    features.insert(features.end(), values.begin(), values.end());
    labels.push_back(label);
  }

  bool has_both_classes() const {
    bool seen[2] = {false, false};
    for (auto l : labels) seen[l] = true;
    return seen[0] && seen[1];
  }
};

namespace detail {

inline double parse_feature(std::string_view token, std::size_t line_no) {
  token = trim(token);
  double value = 0.0;
  const char* begin = token.data();
  const char* end = begin + token.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end || !std::isfinite(value))
    throw ParseError("feature value '" + std::string(token) +
                     "' is not a finite number", line_no);
  return value;
}

}  // namespace detail

/// Loads a dataset CSV. All columns except `label_column` are numeric
/// features; the label column must hold 0/1.
inline Dataset parse_dataset_csv(std::string_view text,
                                 const std::string& label_column) {
  const auto lines = detail::split_lines(text);
  if (lines.empty()) throw MissingHeader("dataset file has no header row");

  const auto header = detail::split_fields(lines[0]);
  std::size_t label_idx = header.size();
  Dataset data;
  for (std::size_t i = 0; i < header.size(); ++i) {
    const std::string name(detail::trim(header[i]));
    if (name == label_column) {
      if (label_idx != header.size())
        throw MissingHeader("label column '" + label_column +
                            "' appears more than once");
      label_idx = i;
    } else {
      data.feature_names.push_back(name);
    }
  }
  if (label_idx == header.size())
    throw MissingHeader("label column '" + label_column + "' not found");
  if (data.feature_names.empty())
    throw MissingHeader("dataset has no feature columns");
  data.n_features = data.feature_names.size();

  std::vector<double> row(data.n_features);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    const auto fields = detail::split_fields(lines[i]);
    if (fields.size() != header.size())
      throw ParseError("expected " + std::to_string(header.size()) +
                       " fields, got " + std::to_string(fields.size()), line_no);
    std::uint8_t label = 0;
    std::size_t f = 0;
    for (std::size_t j = 0; j < fields.size(); ++j) {
      if (j == label_idx) {
        const auto token = detail::trim(fields[j]);
        if (token == "0") label = 0;
        else if (token == "1") label = 1;
        else
          throw ParseError("label '" + std::string(token) + "' is not 0 or 1",
                           line_no);
      } else {
        row[f++] = detail::parse_feature(fields[j], line_no);
      }
    }
    data.append_row(row, label);
  }
  if (data.rows() == 0) throw EmptyInput("dataset has a header but no rows");
  return data;
}

inline Dataset load_dataset_csv(const std::string& path,
                                const std::string& label_column) {
  return parse_dataset_csv(detail::read_file(path), label_column);
}

/// Deterministic shuffle by seed, then a contiguous cut: the first
/// rows stay as training data, the final round(test_fraction * rows) become
/// the test pool.
inline std::pair<Dataset, Dataset> split(const Dataset& data,
                                         double test_fraction,
                                         std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    throw std::invalid_argument("test_fraction must be in (0,1)");
  const std::size_t total = data.rows();
  const auto test_size = static_cast<std::size_t>(
      std::llround(test_fraction * static_cast<double>(total)));
  if (test_size == 0 || test_size >= total)
    throw SplitError("split leaves an empty train or test part");

  std::vector<std::size_t> order(total);
  std::iota(order.begin(), order.end(), 0);
  Philox4x32 rng(seed);
  for (std::size_t i = total - 1; i > 0; --i)
    std::swap(order[i], order[rng.next_below(i + 1)]);

  Dataset train, test;
  train.n_features = test.n_features = data.n_features;
  train.feature_names = test.feature_names = data.feature_names;
  const std::size_t train_size = total - test_size;
  for (std::size_t i = 0; i < total; ++i) {
    Dataset& part = i < train_size ? train : test;
    part.append_row(data.row(order[i]), data.labels[order[i]]);
  }
  if (!train.has_both_classes())
    throw SplitError("training part lacks one of the classes");
  return {std::move(train), std::move(test)};
}

/// 1-nearest-neighbor on min-max-scaled features (scaling fit on the
/// training data). Distance ties go to the lowest training-row index.
class NearestNeighborClassifier {
 public:
  static NearestNeighborClassifier train(const Dataset& train_data) {
    if (train_data.rows() == 0 || !train_data.has_both_classes())
      throw std::invalid_argument("1-NN needs training rows of both classes");
    NearestNeighborClassifier c;
    const std::size_t d = train_data.n_features;
    c.n_features_ = d;
    c.mins_.assign(d, std::numeric_limits<double>::infinity());
    std::vector<double> maxs(d, -std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < train_data.rows(); ++i) {
      const auto row = train_data.row(i);
      for (std::size_t j = 0; j < d; ++j) {
        c.mins_[j] = std::min(c.mins_[j], row[j]);
        maxs[j] = std::max(maxs[j], row[j]);
      }
    }
    c.inv_ranges_.resize(d);
    for (std::size_t j = 0; j < d; ++j) {
      const double range = maxs[j] - c.mins_[j];
      c.inv_ranges_[j] = range > 0.0 ? 1.0 / range : 0.0;  // constant feature
    }
    c.rows_.resize(train_data.rows() * d);
    for (std::size_t i = 0; i < train_data.rows(); ++i) {
      const auto row = train_data.row(i);
      for (std::size_t j = 0; j < d; ++j)
        c.rows_[i * d + j] = (row[j] - c.mins_[j]) * c.inv_ranges_[j];
    }
    c.labels_ = train_data.labels;
    return c;
  }

  int predict(std::span<const double> x) const {
    std::vector<double> scaled(n_features_);
    for (std::size_t j = 0; j < n_features_; ++j)
      scaled[j] = (x[j] - mins_[j]) * inv_ranges_[j];
    std::size_t best = 0;
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < labels_.size(); ++i) {
      double dist = 0.0;
      for (std::size_t j = 0; j < n_features_; ++j) {
        const double diff = rows_[i * n_features_ + j] - scaled[j];
        dist += diff * diff;
      }
      if (dist < best_dist) {
        best_dist = dist;
        best = i;
      }
    }
    return labels_[best];
  }

 private:
  std::size_t n_features_ = 0;
  std::vector<double> rows_;
  std::vector<std::uint8_t> labels_;
  std::vector<double> mins_;
  std::vector<double> inv_ranges_;
};

/// Single-feature threshold rule fit by exhaustive scan: candidate
/// thresholds are the midpoints of consecutive distinct values of each
/// feature, each tried with both polarities. Candidates are visited in
/// (feature, threshold, positive-above-first) order and only a strictly
/// smaller training error replaces the incumbent, so ties resolve to the
/// lowest feature index, then the lowest threshold. Degenerate training
/// data (uniform labels, or all features constant) yields a constant rule.
class DecisionStump {
 public:
  static DecisionStump train(const Dataset& train_data) {
    if (train_data.rows() == 0)
      throw std::invalid_argument("stump needs a non-empty training set");
    DecisionStump stump;
    const std::size_t rows = train_data.rows();
    const auto total_pos = static_cast<std::uint64_t>(
        std::count(train_data.labels.begin(), train_data.labels.end(), 1));
    const std::uint64_t total_neg = rows - total_pos;

    if (total_pos == 0 || total_neg == 0) {
      stump.constant_ = true;
      stump.constant_label_ = total_pos > 0 ? 1 : 0;
      stump.training_errors_ = 0;
      return stump;
    }

    std::uint64_t best_errors = std::numeric_limits<std::uint64_t>::max();
    std::vector<std::pair<double, std::uint8_t>> column(rows);
    for (std::size_t j = 0; j < train_data.n_features; ++j) {
      for (std::size_t i = 0; i < rows; ++i)
        column[i] = {train_data.row(i)[j], train_data.labels[i]};
      std::sort(column.begin(), column.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });

      std::uint64_t pos_below = 0;  // positives with value <= candidate threshold
      for (std::size_t i = 0; i + 1 < rows; ++i) {
        pos_below += column[i].second;
        if (column[i].first == column[i + 1].first) continue;
        const double threshold =
            column[i].first + (column[i + 1].first - column[i].first) / 2.0;
        const std::uint64_t below = i + 1;
        const std::uint64_t neg_below = below - pos_below;
        const std::uint64_t errors_above =      // predict 1 iff value > threshold
            pos_below + (total_neg - neg_below);
        const std::uint64_t errors_below =      // predict 1 iff value <= threshold
            neg_below + (total_pos - pos_below);
        if (errors_above < best_errors) {
          best_errors = errors_above;
          stump.feature_ = j;
          stump.threshold_ = threshold;
          stump.positive_above_ = true;
        }
        if (errors_below < best_errors) {
          best_errors = errors_below;
          stump.feature_ = j;
          stump.threshold_ = threshold;
          stump.positive_above_ = false;
        }
      }
    }

    if (best_errors == std::numeric_limits<std::uint64_t>::max()) {
      // Every feature is constant; fall back to the majority class.
      stump.constant_ = true;
      stump.constant_label_ = total_pos >= total_neg ? 1 : 0;
      stump.training_errors_ = std::min(total_pos, total_neg);
      return stump;
    }
    stump.training_errors_ = best_errors;
    return stump;
  }

  int predict(std::span<const double> x) const {
    if (constant_) return constant_label_;
    const bool above = x[feature_] > threshold_;
    return above == positive_above_ ? 1 : 0;
  }

  bool is_constant() const { return constant_; }
  int constant_label() const { return constant_label_; }
  std::size_t feature() const { return feature_; }
  double threshold() const { return threshold_; }
  bool positive_above() const { return positive_above_; }
  std::uint64_t training_errors() const { return training_errors_; }

 private:
  bool constant_ = false;
  int constant_label_ = 0;
  std::size_t feature_ = 0;
  double threshold_ = 0.0;
  bool positive_above_ = true;
  std::uint64_t training_errors_ = 0;
};

/// Evaluates both classifiers over the test pool, producing the raw paired
/// records the subsampling step draws from.
template <typename Classifier1, typename Classifier2>
PairedLabels label_pool(const Dataset& test_pool, const Classifier1& c1,
                        const Classifier2& c2) {
  PairedLabels pool;
  pool.reserve(test_pool.rows());
  for (std::size_t i = 0; i < test_pool.rows(); ++i) {
    const auto row = test_pool.row(i);
    pool.push_back({test_pool.labels[i],
                    static_cast<std::uint8_t>(c1.predict(row)),
                    static_cast<std::uint8_t>(c2.predict(row))});
  }
  return pool;
}

/// One column group of the aggregated report: either averaged analytic
/// estimates under a method, or the empirical ("simulated") counterparts.
/// NaN marks entries undefined on every retained draw.
struct HarnessBlock {
  double f1 = std::numeric_limits<double>::quiet_NaN();
  double f2 = std::numeric_limits<double>::quiet_NaN();
  double var1 = std::numeric_limits<double>::quiet_NaN();
  double var2 = std::numeric_limits<double>::quiet_NaN();
  double corr = std::numeric_limits<double>::quiet_NaN();
  double var_diff = std::numeric_limits<double>::quiet_NaN();
  double z = std::numeric_limits<double>::quiet_NaN();
};

struct HarnessReport {
  std::uint64_t c = 0;
  std::uint64_t c_minus = 0;
  std::uint64_t n = 0;
  std::uint64_t train_size = 0;
  std::uint64_t pool_size = 0;
  HarnessBlock simulated;
  HarnessBlock jvesr;
  HarnessBlock independent;
};

/// Subsamples the paired pool c times (size n, with replacement) and
/// aggregates per-draw comparisons under both methods next to the empirical
/// moments of the retained (f1, f2) pairs. Draw r uses
/// derive_seed(seed, kSeedDomainSubsample, r); deterministic for any
/// `threads`.
inline HarnessReport run_harness_on_pool(const PairedLabels& pool,
                                         std::uint64_t c, std::uint64_t n,
                                         std::uint64_t seed, int threads = 1) {
  if (c < 2) throw std::invalid_argument("subsample count c must be >= 2");
  std::vector<detail::ReplicateOutcome> outcomes(c);
  detail::parallel_for(c, threads, [&](std::uint64_t r) {
    const JointCounts counts =
        subsample_pool(pool, n, derive_seed(seed, kSeedDomainSubsample, r));
    outcomes[r] = detail::evaluate_replicate(counts);
  });

  HarnessReport report;
  report.c = c;
  report.n = n;
  report.pool_size = pool.size();

  std::uint64_t retained = 0, corr_count = 0, zj_count = 0, zi_count = 0;
  double sum_f1 = 0, sum_f2 = 0, sum_var1 = 0, sum_var2 = 0;
  double sum_corr_j = 0, sum_vd_j = 0, sum_z_j = 0;
  double sum_vd_i = 0, sum_z_i = 0;
  for (const auto& r : outcomes) {
    if (!r.retained) continue;
    ++retained;
    sum_f1 += r.f1;
    sum_f2 += r.f2;
    sum_var1 += r.var1;
    sum_var2 += r.var2;
    if (r.corr_defined) {
      ++corr_count;
      sum_corr_j += r.corr;
    }
    sum_vd_j += r.var1 + r.var2 - 2.0 * r.cov12;
    if (r.z_defined) {
      ++zj_count;
      sum_z_j += r.z;
    }
    const double vd_i = r.var1 + r.var2;
    sum_vd_i += vd_i;
    if (vd_i > kDegenerateVarDiff) {
      ++zi_count;
      sum_z_i += (r.f1 - r.f2) / std::sqrt(vd_i);
    }
  }
  report.c_minus = retained;
  if (retained == 0)
    throw NoRetainedReps("every subsample had zero true positives");

  const double m = static_cast<double>(retained);
  report.jvesr.f1 = report.independent.f1 = sum_f1 / m;
  report.jvesr.f2 = report.independent.f2 = sum_f2 / m;
  report.jvesr.var1 = report.independent.var1 = sum_var1 / m;
  report.jvesr.var2 = report.independent.var2 = sum_var2 / m;
  if (corr_count > 0) report.jvesr.corr = sum_corr_j / static_cast<double>(corr_count);
  report.independent.corr = 0.0;
  report.jvesr.var_diff = sum_vd_j / m;
  report.independent.var_diff = sum_vd_i / m;
  if (zj_count > 0) report.jvesr.z = sum_z_j / static_cast<double>(zj_count);
  if (zi_count > 0) report.independent.z = sum_z_i / static_cast<double>(zi_count);

  report.simulated.f1 = report.jvesr.f1;
  report.simulated.f2 = report.jvesr.f2;
  if (retained >= 2) {
    double ss1 = 0, ss2 = 0, ss12 = 0;
    for (const auto& r : outcomes) {
      if (!r.retained) continue;
      const double d1 = r.f1 - report.simulated.f1;
      const double d2 = r.f2 - report.simulated.f2;
      ss1 += d1 * d1;
      ss2 += d2 * d2;
      ss12 += d1 * d2;
    }
    report.simulated.var1 = ss1 / (m - 1.0);
    report.simulated.var2 = ss2 / (m - 1.0);
    const double emp_cov = ss12 / (m - 1.0);
    if (report.simulated.var1 > 0.0 && report.simulated.var2 > 0.0)
      report.simulated.corr =
          emp_cov / std::sqrt(report.simulated.var1 * report.simulated.var2);
    report.simulated.var_diff =
        report.simulated.var1 + report.simulated.var2 - 2.0 * emp_cov;
    if (report.simulated.var_diff > 0.0)
      report.simulated.z = (report.simulated.f1 - report.simulated.f2) /
                           std::sqrt(report.simulated.var_diff);
  }
  return report;
}

/// The full comparative experiment: shuffle/split, train both rules once,
/// label the held-out pool, then subsample/evaluate/aggregate.
inline HarnessReport run_harness(const Dataset& data, double test_fraction,
                                 std::uint64_t c, std::uint64_t n,
                                 std::uint64_t seed, int threads = 1) {
  const auto [train, test] =
      split(data, test_fraction, derive_seed(seed, kSeedDomainSplit, 0));
  const auto nn = NearestNeighborClassifier::train(train);
  const auto stump = DecisionStump::train(train);
  const PairedLabels pool = label_pool(test, nn, stump);
  HarnessReport report = run_harness_on_pool(pool, c, n, seed, threads);
  report.train_size = train.rows();
  return report;
}

}  // namespace fmc
