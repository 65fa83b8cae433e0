// Flat-sectioned key-value experiment configs.
//
// Grammar (line oriented):
//   [section]            section header
//   key = value          keys match [A-Za-z0-9_.]+; '#' starts a comment
// Unknown sections or keys are rejected, as are duplicates. Lists are
// comma-separated. See README for the full key reference.
#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "shus/bias.hpp"
#include "shus/kernel.hpp"
#include "shus/sampler.hpp"

namespace shus {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RawConfig {
  std::map<std::string, std::map<std::string, std::string>> sections;
};

RawConfig parse_raw_config(const std::string& text);
RawConfig read_raw_config(const std::filesystem::path& path);

struct RunSection {
  std::uint64_t steps = 0;
  std::uint64_t seed = 0;
  std::uint64_t stride = 1;
  std::uint64_t theta_stride = 1000;
  bool verify = false;
  bool record_is_weight = false;
  Schedule schedule = Schedule::shus;
  double powerlaw_c = 1.0;
  Point2 x0{-1.0, 0.0};
  int x0_state = 0;  // 0-based internally; 1-based in files
  std::optional<double> exit_x1;
  std::optional<int> exit_state;  // 0-based internally
};

struct ExperimentSection {
  std::vector<double> grid;
  int replicas = 100;
  std::uint64_t cap = 0;  // 0 -> model-dependent default
  std::string fit = "none";  // exp | loglog | none
  // Fit abscissa: grid (the raw value), inverse (1/value) or log_inverse
  // (ln(1/value)). Defaults: grid for two_well, inverse for toy.
  std::string fit_x;
  std::vector<double> a_list;  // optional sweep over rho exponents
  std::vector<double> a_grid;  // EF scan grid; default 0,0.1,...,1
};

struct OutputSection {
  std::string dir = "out";
};

/// Effective configuration with all defaults applied.
struct AppConfig {
  ModelSpec model;
  BiasSpec bias;
  ProposalSpec proposal{0.01};
  RunSection run;
  ExperimentSection experiment;
  OutputSection output;
  bool has_run = false;
  bool has_experiment = false;
};

/// Sections a subcommand references; resolution fails if one is missing.
struct SectionNeeds {
  bool run = false;
  bool experiment = false;
};

/// Validates every present section strictly (types, ranges, no unknown keys)
/// and requires the needed ones. Throws ConfigError with a one-line message.
AppConfig resolve_config(const RawConfig& raw, const SectionNeeds& needs);

AppConfig load_config(const std::filesystem::path& path,
                      const SectionNeeds& needs);

/// Renders the effective config back into the same format; the result parses
/// to an equivalent AppConfig.
std::string echo_config(const AppConfig& cfg);

/// SamplerConfig for a single run of the configured model.
SamplerConfig make_sampler_config(const AppConfig& cfg);

}  // namespace shus
