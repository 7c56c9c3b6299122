// Command-line surface for the paired F-measure comparison library:
//   compare   - analytic comparison of two prediction columns in a CSV
//   simulate  - Monte-Carlo validation of the analytic formulas for a pmf
//   pipeline  - full comparative experiment on a tabular dataset
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "fmc/cli.hpp"
#include "fmc/version.hpp"

namespace {

void add_format_option(CLI::App* cmd, std::string& format) {
  cmd->add_option("--format", format, "Output format: table or json")
      ->check(CLI::IsMember({"table", "json"}))
      ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string(fmc::kToolName) +
               " - statistically correct comparison of paired F-measures"};
  app.set_version_flag("--version", fmc::kToolVersion);
  app.require_subcommand(1);

  // compare
  std::string compare_input;
  std::string compare_method = "jvesr";
  double compare_alpha = 0.05;
  std::string compare_format = "table";
  auto* compare = app.add_subcommand(
      "compare", "Compare two classifiers from a z,l1,l2 CSV");
  compare->add_option("input", compare_input, "CSV file with header z,l1,l2")
      ->required();
  compare->add_option("--method", compare_method,
                      "Covariance treatment: jvesr or independent")
      ->check(CLI::IsMember({"jvesr", "independent"}))
      ->capture_default_str();
  compare->add_option("--alpha", compare_alpha, "Significance level in (0,1)")
      ->capture_default_str();
  add_format_option(compare, compare_format);

  // simulate
  std::string sim_pmf;
  std::uint64_t sim_n = 1000;
  std::uint64_t sim_reps = 1200;
  std::optional<std::uint64_t> sim_seed;
  int sim_threads = 1;
  std::string sim_format = "table";
  auto* simulate = app.add_subcommand(
      "simulate", "Monte-Carlo validation of the analytic estimator");
  simulate->add_option("--pmf", sim_pmf, "JSON pmf over (z,l1,l2) triples")
      ->required();
  simulate->add_option("--n", sim_n, "Test-set size per draw")
      ->capture_default_str();
  simulate->add_option("--reps", sim_reps, "Number of draws")
      ->capture_default_str();
  simulate->add_option("--seed", sim_seed,
                       "Master seed (random and echoed if omitted)");
  simulate->add_option("--threads", sim_threads,
                       "Worker threads (does not affect results)")
      ->capture_default_str();
  add_format_option(simulate, sim_format);

  // pipeline
  std::string pipe_data;
  std::string pipe_label;
  double pipe_fraction = 0.5;
  std::uint64_t pipe_c = 1200;
  std::uint64_t pipe_n = 1000;
  std::optional<std::uint64_t> pipe_seed;
  int pipe_threads = 1;
  std::string pipe_format = "table";
  auto* pipeline = app.add_subcommand(
      "pipeline", "Comparative experiment on a feature/label CSV");
  pipeline->add_option("--data", pipe_data, "Dataset CSV")->required();
  pipeline->add_option("--label-col", pipe_label, "Name of the 0/1 label column")
      ->required();
  pipeline
      ->add_option("--test-fraction", pipe_fraction,
                   "Fraction of rows held out as the test pool")
      ->required();
  pipeline->add_option("--c", pipe_c, "Number of subsamples")
      ->capture_default_str();
  pipeline->add_option("--n", pipe_n, "Subsample size")->capture_default_str();
  pipeline->add_option("--seed", pipe_seed,
                       "Master seed (random and echoed if omitted)");
  pipeline->add_option("--threads", pipe_threads,
                       "Worker threads (does not affect results)")
      ->capture_default_str();
  add_format_option(pipeline, pipe_format);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : fmc::kExitInputError;
  }

  if (compare->parsed()) {
    fmc::CompareOptions opts;
    opts.input = compare_input;
    opts.method = fmc::method_from_string(compare_method);
    opts.alpha = compare_alpha;
    opts.format = fmc::format_from_string(compare_format);
    return fmc::cmd_compare(opts, std::cout, std::cerr);
  }
  if (simulate->parsed()) {
    fmc::SimulateOptions opts;
    opts.pmf_path = sim_pmf;
    opts.n = sim_n;
    opts.reps = sim_reps;
    opts.seed = sim_seed;
    opts.threads = sim_threads;
    opts.format = fmc::format_from_string(sim_format);
    return fmc::cmd_simulate(opts, std::cout, std::cerr);
  }
  fmc::PipelineOptions opts;
  opts.data_path = pipe_data;
  opts.label_column = pipe_label;
  opts.test_fraction = pipe_fraction;
  opts.c = pipe_c;
  opts.n = pipe_n;
  opts.seed = pipe_seed;
  opts.threads = pipe_threads;
  opts.format = fmc::format_from_string(pipe_format);
  return fmc::cmd_pipeline(opts, std::cout, std::cerr);
}
