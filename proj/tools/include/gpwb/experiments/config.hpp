#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>

#include "gpwb/fixture.hpp"
#include "gpwb/lattice.hpp"

namespace gpwb::experiments {

enum class Mode { kempf_ness, vortex_threshold, pair, triple, coherent_system, twisted_triple, higgs, invariant_suite };

inline constexpr Mode kAllModes[] = {Mode::kempf_ness,      Mode::vortex_threshold, Mode::pair,
                                     Mode::triple,          Mode::coherent_system,  Mode::twisted_triple,
                                     Mode::higgs,           Mode::invariant_suite};

std::string to_string(Mode mode);
// Throws ConfigError for unknown names.
Mode mode_from_string(const std::string& name);
// Fixture kind run by a flow mode; throws for kempf_ness, vortex_threshold and invariant_suite.
ExampleKind fixture_kind(Mode mode);

// Invalid configuration.  line is 1-based, 0 when unknown.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(int line, std::string field, const std::string& what);
  int line() const noexcept { return line_; }
  const std::string& field() const noexcept { return field_; }

 private:
  int line_;
  std::string field_;
};

struct ExperimentConfig {
  Mode mode = Mode::invariant_suite;
  std::uint64_t seed = 1;
  int lattice_size = 16;
  // Single fixture to run; the mode's built-in fixtures otherwise.
  std::optional<CurveFixture> fixture;
  // Number of random samples (kempf_ness) or suite scale factor (invariant_suite).
  int samples = 100;
  // vortex_threshold: line bundle degree, scan range and target bracket width,
  // all levels in units of 2*pi.
  int degree = 1;
  double scan_lo = 0.1;
  double scan_hi = 3.0;
  double bracket_width = 0.05;
  LatticeFlowOptions flow;
  std::filesystem::path out_dir = "gpwb_out";
  int workers = 1;
};

// Defaults for a mode (vortex_threshold uses N = 32).
ExperimentConfig default_config(Mode mode);
// YAML text; `mode` may be omitted when `expected` is given and must match it otherwise.
ExperimentConfig parse_config(const std::string& text, std::optional<Mode> expected = std::nullopt);
ExperimentConfig load_config(const std::filesystem::path& path, std::optional<Mode> expected = std::nullopt);
// Canonical YAML rendering; parse_config(to_yaml(c)) reproduces c.  Without
// runtime fields, workers and the output directory are left out so reports
// do not depend on them.
std::string to_yaml(const ExperimentConfig& config, bool runtime_fields = true);

}  // namespace gpwb::experiments
