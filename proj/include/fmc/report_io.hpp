#pragma once

#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "fmc/estimator.hpp"
#include "fmc/json_writer.hpp"
#include "fmc/montecarlo.hpp"
#include "fmc/pipeline.hpp"
#include "fmc/version.hpp"

namespace fmc {

namespace detail {

/// 17-significant-digit rendering shared by tables and warning strings, so
/// the table format carries exactly the numbers the JSON does.
inline std::string format_real(double v) {
  if (!std::isfinite(v)) return "n/a";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string format_real(const std::optional<double>& v) {
  return v ? format_real(*v) : "n/a";
}

inline std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

}  // namespace detail

/// Wraps a payload in the output envelope. `seed` is null for commands with
/// no randomness (compare).
inline JsonValue make_envelope(const std::string& command,
                               std::optional<std::uint64_t> seed,
                               const std::vector<std::string>& warnings,
                               JsonValue payload) {
  JsonValue warn = JsonValue::array();
  for (const auto& w : warnings) warn.push(JsonValue::string(w));
  JsonValue env = JsonValue::object();
  env.add("tool_version", JsonValue::string(kToolVersion));
  env.add("command", JsonValue::string(command));
  env.add("seed", seed ? JsonValue::integer(*seed) : JsonValue::null());
  env.add("warnings", std::move(warn));
  env.add("payload", std::move(payload));
  return env;
}

inline JsonValue to_json(const FStats& s) {
  JsonValue v = JsonValue::object();
  v.add("tp", JsonValue::integer(s.tp));
  v.add("fp", JsonValue::integer(s.fp));
  v.add("fn", JsonValue::integer(s.fn));
  v.add("f", JsonValue::number(s.f));
  v.add("kappa", JsonValue::number(s.kappa));
  v.add("var", JsonValue::number(s.var));
  v.add("small_sample", JsonValue::boolean(s.small_sample));
  return v;
}

inline JsonValue to_json(const ComparisonReport& r) {
  JsonValue v = JsonValue::object();
  v.add("type", JsonValue::string("comparison_report"));
  v.add("method", JsonValue::string(to_string(r.method)));
  v.add("alpha", JsonValue::number(r.alpha));
  v.add("n", JsonValue::integer(r.n));
  v.add("status", JsonValue::string(to_string(r.status)));
  v.add("algorithm1", to_json(r.stats1));
  v.add("algorithm2", to_json(r.stats2));
  v.add("cov", JsonValue::number(r.cov12));
  v.add("corr", JsonValue::number(r.corr));
  v.add("var_diff", JsonValue::number(r.var_diff));
  v.add("z", JsonValue::number(r.z));
  v.add("p_value", JsonValue::number(r.p_value));
  v.add("significant", JsonValue::boolean(r.significant));
  return v;
}

inline JsonValue to_json(const SimResult& r, const JointPmf& pmf,
                         std::uint64_t n) {
  JsonValue probs = JsonValue::array();
  for (double p : pmf.p) probs.push(JsonValue::number(p));
  JsonValue v = JsonValue::object();
  v.add("type", JsonValue::string("sim_result"));
  v.add("pmf", std::move(probs));
  v.add("n", JsonValue::integer(n));
  v.add("reps_total", JsonValue::integer(r.reps_total));
  v.add("reps_retained", JsonValue::integer(r.reps_retained));
  v.add("mean_f1", JsonValue::number(r.mean_f1));
  v.add("mean_f2", JsonValue::number(r.mean_f2));
  v.add("emp_var1", JsonValue::number(r.emp_var1));
  v.add("emp_var2", JsonValue::number(r.emp_var2));
  v.add("emp_cov", JsonValue::number(r.emp_cov));
  v.add("emp_corr", JsonValue::number(r.emp_corr));
  v.add("emp_z", JsonValue::number(r.emp_z));
  v.add("mean_analytic_var1", JsonValue::number(r.mean_analytic_var1));
  v.add("mean_analytic_var2", JsonValue::number(r.mean_analytic_var2));
  v.add("mean_analytic_cov", JsonValue::number(r.mean_analytic_cov));
  v.add("mean_analytic_corr", JsonValue::number(r.mean_analytic_corr));
  v.add("mean_z_analytic", JsonValue::number(r.mean_z_analytic));
  return v;
}

inline JsonValue to_json(const HarnessBlock& b) {
  JsonValue v = JsonValue::object();
  v.add("f1", JsonValue::number(b.f1));
  v.add("f2", JsonValue::number(b.f2));
  v.add("var1", JsonValue::number(b.var1));
  v.add("var2", JsonValue::number(b.var2));
  v.add("corr", JsonValue::number(b.corr));
  v.add("var_diff", JsonValue::number(b.var_diff));
  v.add("z", JsonValue::number(b.z));
  return v;
}

inline JsonValue to_json(const HarnessReport& r, double test_fraction,
                         const std::string& label_column) {
  JsonValue v = JsonValue::object();
  v.add("type", JsonValue::string("harness_report"));
  v.add("label_column", JsonValue::string(label_column));
  v.add("test_fraction", JsonValue::number(test_fraction));
  v.add("c", JsonValue::integer(r.c));
  v.add("c_minus", JsonValue::integer(r.c_minus));
  v.add("n", JsonValue::integer(r.n));
  v.add("train_size", JsonValue::integer(r.train_size));
  v.add("pool_size", JsonValue::integer(r.pool_size));
  v.add("simulated", to_json(r.simulated));
  v.add("jvesr", to_json(r.jvesr));
  v.add("independent", to_json(r.independent));
  return v;
}

inline std::string render_table(const ComparisonReport& r) {
  using detail::format_real;
  using detail::pad;
  std::string out;
  out += "paired F-measure comparison  (method=" +
         std::string(to_string(r.method)) +
         ", n=" + std::to_string(r.n) + ", alpha=" + format_real(r.alpha) +
         ")\n";
  out += "status: " + std::string(to_string(r.status)) + "\n\n";
  const std::size_t kLabel = 14, kCol = 26;
  out += pad("", kLabel) + pad("algorithm 1", kCol) + "algorithm 2\n";
  auto row = [&](const char* name, const std::string& a, const std::string& b) {
    out += pad(name, kLabel) + pad(a, kCol) + b + "\n";
  };
  row("tp", std::to_string(r.stats1.tp), std::to_string(r.stats2.tp));
  row("fp", std::to_string(r.stats1.fp), std::to_string(r.stats2.fp));
  row("fn", std::to_string(r.stats1.fn), std::to_string(r.stats2.fn));
  row("f", format_real(r.stats1.f), format_real(r.stats2.f));
  row("kappa", format_real(r.stats1.kappa), format_real(r.stats2.kappa));
  row("var", format_real(r.stats1.var), format_real(r.stats2.var));
  row("small_sample", r.stats1.small_sample ? "yes" : "no",
      r.stats2.small_sample ? "yes" : "no");
  out += "\n";
  auto single = [&](const char* name, const std::string& v) {
    out += pad(name, kLabel) + v + "\n";
  };
  single("cov", format_real(r.cov12));
  single("corr", format_real(r.corr));
  single("var_diff", format_real(r.var_diff));
  single("z", format_real(r.z));
  single("p_value", format_real(r.p_value));
  single("significant",
         r.significant ? (*r.significant ? "yes" : "no") : "n/a");
  return out;
}

inline std::string render_table(const SimResult& r, std::uint64_t n) {
  using detail::format_real;
  using detail::pad;
  std::string out;
  out += "Monte-Carlo validation  (n=" + std::to_string(n) +
         ", reps=" + std::to_string(r.reps_total) +
         ", retained=" + std::to_string(r.reps_retained) + ")\n\n";
  const std::size_t kLabel = 12, kCol = 26;
  out += pad("", kLabel) + pad("simulated", kCol) + "analytic (avg)\n";
  auto row = [&](const char* name, double sim, double ana) {
    out += pad(name, kLabel) + pad(format_real(sim), kCol) + format_real(ana) +
           "\n";
  };
  out += pad("f1", kLabel) + format_real(r.mean_f1) + "\n";
  out += pad("f2", kLabel) + format_real(r.mean_f2) + "\n";
  row("var1", r.emp_var1, r.mean_analytic_var1);
  row("var2", r.emp_var2, r.mean_analytic_var2);
  row("cov", r.emp_cov, r.mean_analytic_cov);
  row("corr", r.emp_corr, r.mean_analytic_corr);
  row("z", r.emp_z, r.mean_z_analytic);
  return out;
}

inline std::string render_table(const HarnessReport& r) {
  using detail::format_real;
  using detail::pad;
  std::string out;
  out += "comparative experiment  (c=" + std::to_string(r.c) +
         ", c_minus=" + std::to_string(r.c_minus) +
         ", n=" + std::to_string(r.n) +
         ", train=" + std::to_string(r.train_size) +
         ", pool=" + std::to_string(r.pool_size) + ")\n\n";
  const std::size_t kLabel = 12, kCol = 26;
  out += pad("", kLabel) + pad("simulated", kCol) + pad("jvesr", kCol) +
         "independent\n";
  auto row = [&](const char* name, double s, double j, double i) {
    out += pad(name, kLabel) + pad(format_real(s), kCol) +
           pad(format_real(j), kCol) + format_real(i) + "\n";
  };
  row("f1", r.simulated.f1, r.jvesr.f1, r.independent.f1);
  row("f2", r.simulated.f2, r.jvesr.f2, r.independent.f2);
  row("var1", r.simulated.var1, r.jvesr.var1, r.independent.var1);
  row("var2", r.simulated.var2, r.jvesr.var2, r.independent.var2);
  row("corr", r.simulated.corr, r.jvesr.corr, r.independent.corr);
  row("var_diff", r.simulated.var_diff, r.jvesr.var_diff,
      r.independent.var_diff);
  row("z", r.simulated.z, r.jvesr.z, r.independent.z);
  return out;
}

}  // namespace fmc
