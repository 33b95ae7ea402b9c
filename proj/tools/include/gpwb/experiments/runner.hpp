#pragma once

#include <string>
#include <utility>
#include <vector>

#include "gpwb/experiments/config.hpp"
#include "gpwb/experiments/report.hpp"

namespace gpwb::experiments {

// Wall-clock seconds per named phase, kept out of the report.
using Timings = std::vector<std::pair<std::string, double>>;

// Runs one experiment.  The report depends only on the config (not on the
// worker count), so a fixed seed gives byte-identical output.
Report run(const ExperimentConfig& config, Timings* timings = nullptr);

}  // namespace gpwb::experiments
