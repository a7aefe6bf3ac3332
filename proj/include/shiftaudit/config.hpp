#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "shiftaudit/audit.hpp"
#include "shiftaudit/sweeps.hpp"

namespace shiftaudit {

/// Everything one config file describes. Sections:
///   [audit]          statistic, run counts, partition, seed, ...
///   [learner]        algorithm and its hyperparameters
///   [learner.<alg>]  hyperparameters for <alg> on a learner sweep
///   [dist.<name>]    named distributions referenced by other keys
///   [sweep]          optional sweep axis and grid
///   [output]         output directory
struct ExperimentConfig {
  AuditConfig audit;
  std::optional<SweepSpec> sweep;
  std::filesystem::path output_dir = "shift-audit-out";
};

/// Reads an INI config. Relative CSV paths resolve against `base_dir`.
/// Unknown sections or keys, bad values and missing references raise
/// ConfigError; CSV problems surface as ParseError or SchemaMismatch.
ExperimentConfig parse_experiment_config(std::istream& in, const std::filesystem::path& base_dir,
                                         std::optional<std::uint64_t> seed_override = std::nullopt);
ExperimentConfig load_experiment_config(const std::filesystem::path& path,
                                        std::optional<std::uint64_t> seed_override = std::nullopt);

/// Text reference of every accepted key, generated from the parser's tables.
std::string config_reference();

}  // namespace shiftaudit
