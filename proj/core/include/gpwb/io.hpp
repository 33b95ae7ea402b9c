#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "gpwb/fixture.hpp"
#include "gpwb/lattice.hpp"

namespace gpwb {

// Versioned first line of snapshot and fixture files.
inline constexpr const char* kFormatHeader = "GPWB1";

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Header line followed by a JSON document; see docs/formats.md.
void write_snapshot(std::ostream& out, const LatticePairState& state);
LatticePairState read_snapshot(std::istream& in);
void save_snapshot(const std::filesystem::path& path, const LatticePairState& state);
LatticePairState load_snapshot(const std::filesystem::path& path);

void write_fixture(std::ostream& out, const CurveFixture& fx);
CurveFixture read_fixture(std::istream& in);

inline constexpr const char* kTrajectoryHeader = "iteration,l2_residual,linf_residual,sup_log_metric";

// One row per accepted step, shortest round-trip decimals, LF endings.
void write_trajectory_csv(std::ostream& out, const std::vector<TrajectoryRow>& rows);
std::vector<TrajectoryRow> read_trajectory_csv(std::istream& in);
void save_trajectory_csv(const std::filesystem::path& path, const std::vector<TrajectoryRow>& rows);

// Shortest decimal that parses back to the same double.
std::string format_double(double x);

}  // namespace gpwb
