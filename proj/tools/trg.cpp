// trg: command-line front end.
//
//   trg sample --config exp.cfg --out graphs/
//   trg rate-exact --config exp.cfg --out rates.csv
//   trg verify

#include <CLI11.hpp>
#include <iostream>

#include "trg/commands.hpp"
#include "trg/error.hpp"
#include "trg/graph.hpp"

namespace {

trg::ExperimentConfig default_measure_config() {
  // only the schedule matters for `measure`
  return trg::ExperimentConfig{};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coloured random graphs: sampling, exact and Monte Carlo rates, Legendre duality checks"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::string out;
  std::string format = "csv";
  std::vector<std::string> inputs;
  bool omit_runtime = false;

  const auto add_common = [&](CLI::App* sub, bool needs_config) {
    auto* opt = sub->add_option("--config", config_path, "experiment config file")->check(CLI::ExistingFile);
    if (needs_config) opt->required();
    sub->add_option("--seed", seed, "master seed (overrides the config)");
    sub->add_option("--workers", workers, "logical workers / threads")->check(CLI::Range(1, 4096));
    sub->add_option("--out", out, "output path (directory for sample)");
    sub->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_flag("--no-runtime", omit_runtime, "print runtime_seconds as 0");
  };

  auto* sample = app.add_subcommand("sample", "sample graphs and write them with a summary");
  auto* measure = app.add_subcommand("measure", "empirical measures of graph files");
  auto* rate_exact = app.add_subcommand("rate-exact", "exact event rates per n");
  auto* rate_mc = app.add_subcommand("rate-mc", "Monte Carlo event rates per n");
  auto* legendre = app.add_subcommand("legendre", "Kullback action against its Legendre supremum");
  auto* mcmillan = app.add_subcommand("mcmillan-count", "exact log-cardinality of a ball against n times the entropy");
  auto* verify = app.add_subcommand("verify", "run the full verification suite");
  for (auto* sub : {sample, rate_exact, rate_mc, legendre, mcmillan}) add_common(sub, true);
  add_common(measure, false);
  measure->add_option("graphs", inputs, "graph files")->required()->check(CLI::ExistingFile);
  verify->add_option("--workers", workers, "threads")->check(CLI::Range(1, 4096));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : static_cast<int>(trg::ExitCode::Validation);
  }

  trg::CommandOptions opts;
  opts.seed = seed;
  opts.workers = workers;
  opts.out = out;
  opts.format = format == "json" ? trg::OutputFormat::Json : trg::OutputFormat::Csv;
  opts.inputs = inputs;
  opts.omit_runtime = omit_runtime;

  try {
    if (verify->parsed()) return static_cast<int>(trg::cmd_verify(opts, std::cout));
    const trg::ExperimentConfig cfg =
        config_path.empty() ? default_measure_config() : trg::load_config(config_path);
    trg::ExitCode rc = trg::ExitCode::Ok;
    if (sample->parsed()) rc = trg::cmd_sample(cfg, opts, std::cout);
    if (measure->parsed()) rc = trg::cmd_measure(cfg, opts, std::cout);
    if (rate_exact->parsed()) rc = trg::cmd_rate_exact(cfg, opts, std::cout);
    if (rate_mc->parsed()) rc = trg::cmd_rate_mc(cfg, opts, std::cout);
    if (legendre->parsed()) rc = trg::cmd_legendre(cfg, opts, std::cout);
    if (mcmillan->parsed()) rc = trg::cmd_mcmillan(cfg, opts, std::cout);
    return static_cast<int>(rc);
  } catch (const trg::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(trg::ExitCode::Validation);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(trg::ExitCode::Runtime);
  }
}
