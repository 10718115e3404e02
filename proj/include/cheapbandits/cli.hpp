#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cheapbandits/error.hpp"
#include "cheapbandits/harness.hpp"

namespace cheapbandits {

enum class Verb { GenGraph, Ingest, Run, Report };

Verb parse_verb(std::string_view name);

struct Command {
  Verb verb = Verb::Run;
  std::optional<std::filesystem::path> config;
  std::filesystem::path out = ".";
  std::optional<std::uint64_t> seed;
  std::optional<std::vector<PolicyKind>> policies;
  std::optional<int> runs;
  std::optional<CostModel> cost_model;
};

/// Raised for unreadable or incomplete configuration files.
class ConfigError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// Experiment settings from a flat JSON config; relative paths resolve
/// against `base_dir`. Command-line overrides are applied afterwards.
ExperimentConfig load_experiment_config(const std::string& json_text,
                                        const std::filesystem::path& base_dir);

/// Runs one verb. Returns 0 on success, 1 on errors (diagnostic written to
/// `err`), 2 when `run` completes but verification fails.
int execute(const Command& cmd, std::ostream& log, std::ostream& err);

}  // namespace cheapbandits
