#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "fmc/errors.hpp"
#include "fmc/estimator.hpp"
#include "fmc/montecarlo.hpp"
#include "fmc/pipeline.hpp"
#include "fmc/report_io.hpp"
#include "fmc/tally.hpp"

namespace fmc {

enum class OutputFormat { table, json };

inline OutputFormat format_from_string(const std::string& s) {
  if (s == "table") return OutputFormat::table;
  if (s == "json") return OutputFormat::json;
  throw BadValue("unknown format '" + s + "' (expected table or json)");
}

/// Exit codes are a stable contract: 0 success, 1 input error, 2 the
/// comparison is statistically degenerate (still reported, with nulls).
inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 1;
inline constexpr int kExitDegenerate = 2;

struct CompareOptions {
  std::string input;
  Method method = Method::jvesr;
  double alpha = 0.05;
  OutputFormat format = OutputFormat::table;
};

struct SimulateOptions {
  std::string pmf_path;
  std::uint64_t n = 1000;
  std::uint64_t reps = 1200;
  std::optional<std::uint64_t> seed;
  int threads = 1;
  OutputFormat format = OutputFormat::table;
};

struct PipelineOptions {
  std::string data_path;
  std::string label_column;
  double test_fraction = 0.5;
  std::uint64_t c = 1200;
  std::uint64_t n = 1000;
  std::optional<std::uint64_t> seed;
  int threads = 1;
  OutputFormat format = OutputFormat::table;
};

namespace detail {

/// Commands without an explicit seed draw one and echo it in the envelope,
/// so any run can be reproduced from its own output.
inline std::uint64_t resolve_seed(const std::optional<std::uint64_t>& seed) {
  if (seed) return *seed;
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) | rd();
}

inline void small_sample_warnings(const ComparisonReport& report,
                                  std::vector<std::string>& warnings) {
  const FStats* stats[2] = {&report.stats1, &report.stats2};
  for (int a = 1; a <= 2; ++a) {
    const FStats& s = *stats[a - 1];
    if (!s.small_sample) continue;
    warnings.push_back("SmallSampleWarning: algorithm " + std::to_string(a) +
                       " (tp=" + std::to_string(s.tp) +
                       ", f=" + format_real(s.f) +
                       "); asymptotic variance may be inaccurate");
  }
}

inline void emit(const JsonValue& envelope, const std::string& table,
                 const std::vector<std::string>& warnings, OutputFormat format,
                 std::ostream& out, std::ostream& err) {
  if (format == OutputFormat::json) {
    out << envelope.dump() << "\n";
  } else {
    out << table;
    for (const auto& w : warnings) err << "warning: " << w << "\n";
  }
}

}  // namespace detail

inline int cmd_compare(const CompareOptions& opts, std::ostream& out,
                       std::ostream& err) {
  try {
    const PairedLabels records = read_csv(opts.input);
    const JointCounts counts = tally_from_records(records);
    const ComparisonReport report =
        try_compare(counts, opts.method, opts.alpha);

    std::vector<std::string> warnings;
    detail::small_sample_warnings(report, warnings);
    const JsonValue envelope = make_envelope(
        "compare", std::nullopt, warnings, to_json(report));
    detail::emit(envelope, render_table(report), warnings, opts.format, out,
                 err);
    if (report.status != ComparisonStatus::ok) {
      err << "comparison degenerate: " << to_string(report.status) << "\n";
      return kExitDegenerate;
    }
    return kExitOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }
}

inline int cmd_simulate(const SimulateOptions& opts, std::ostream& out,
                        std::ostream& err) {
  const std::uint64_t seed = detail::resolve_seed(opts.seed);
  try {
    const JointPmf pmf = load_pmf(opts.pmf_path);
    SimResult result;
    bool exhausted = false;
    try {
      result = run_validation(pmf, opts.n, opts.reps, seed, opts.threads);
    } catch (const NoRetainedReps&) {
      exhausted = true;
      result.reps_total = opts.reps;
      result.reps_retained = 0;
    }

    std::vector<std::string> warnings;
    if (result.reps_retained < result.reps_total)
      warnings.push_back(
          "excluded " +
          std::to_string(result.reps_total - result.reps_retained) + " of " +
          std::to_string(result.reps_total) +
          " draws (zero true positives give infinite variance)");
    const JsonValue envelope = make_envelope(
        "simulate", seed, warnings, to_json(result, pmf, opts.n));
    detail::emit(envelope, render_table(result, opts.n), warnings, opts.format,
                 out, err);
    if (exhausted) {
      err << "no retained draws: every test set had zero true positives\n";
      return kExitDegenerate;
    }
    return kExitOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }
}

inline int cmd_pipeline(const PipelineOptions& opts, std::ostream& out,
                        std::ostream& err) {
  const std::uint64_t seed = detail::resolve_seed(opts.seed);
  try {
    const Dataset data = load_dataset_csv(opts.data_path, opts.label_column);
    HarnessReport report;
    bool exhausted = false;
    try {
      report = run_harness(data, opts.test_fraction, opts.c, opts.n, seed,
                           opts.threads);
    } catch (const NoRetainedReps&) {
      exhausted = true;
      report.c = opts.c;
      report.c_minus = 0;
      report.n = opts.n;
    }

    std::vector<std::string> warnings;
    if (report.c_minus < report.c)
      warnings.push_back("excluded " +
                         std::to_string(report.c - report.c_minus) + " of " +
                         std::to_string(report.c) +
                         " subsamples (zero true positives give infinite "
                         "variance)");
    const JsonValue envelope =
        make_envelope("pipeline", seed, warnings,
                      to_json(report, opts.test_fraction, opts.label_column));
    detail::emit(envelope, render_table(report), warnings, opts.format, out,
                 err);
    if (exhausted) {
      err << "no retained subsamples: every draw had zero true positives\n";
      return kExitDegenerate;
    }
    return kExitOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }
}

}  // namespace fmc
