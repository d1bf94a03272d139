#pragma once

// Implementations of the CLI subcommands. Each writes its report to `out`
// (or to options.out when set) and returns the process exit code.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "trg/config.hpp"

namespace trg {

enum class ExitCode : int { Ok = 0, Validation = 1, Runtime = 2 };

enum class OutputFormat { Csv, Json };

struct CommandOptions {
  std::optional<std::uint64_t> seed;  ///< overrides [run] seed
  std::optional<int> workers;         ///< overrides [run] workers
  std::string out;                    ///< output path; empty means the `out` stream
  OutputFormat format = OutputFormat::Csv;
  std::vector<std::string> inputs;    ///< graph files for `measure`
  bool omit_runtime = false;          ///< print runtime_seconds as 0 (byte-stable output)
};

ExitCode cmd_sample(const ExperimentConfig& cfg, const CommandOptions& opts, std::ostream& out);
ExitCode cmd_measure(const ExperimentConfig& cfg, const CommandOptions& opts, std::ostream& out);
ExitCode cmd_rate_exact(const ExperimentConfig& cfg, const CommandOptions& opts, std::ostream& out);
ExitCode cmd_rate_mc(const ExperimentConfig& cfg, const CommandOptions& opts, std::ostream& out);
ExitCode cmd_legendre(const ExperimentConfig& cfg, const CommandOptions& opts, std::ostream& out);
ExitCode cmd_mcmillan(const ExperimentConfig& cfg, const CommandOptions& opts, std::ostream& out);
/// Runs the full invariant suite, printing one line per check.
ExitCode cmd_verify(const CommandOptions& opts, std::ostream& out);

}  // namespace trg
