#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "gpwb/lattice.hpp"

namespace gpwb::experiments {

// Ordered key = value lines plus named trajectory CSVs.  Contains no timing,
// so it is byte-identical for a fixed seed.
class Report {
 public:
  void set(const std::string& key, const std::string& value);
  void set(const std::string& key, const char* value) { set(key, std::string(value)); }
  void set(const std::string& key, double value);
  void set(const std::string& key, int value);
  void set(const std::string& key, std::size_t value);
  void set(const std::string& key, bool value);
  // Multi-line text (such as the config echo) stored as indented lines under key.
  void set_block(const std::string& key, const std::string& text);
  void add_csv(const std::string& name, std::vector<TrajectoryRow> rows);
  // Appends another report with every key prefixed.
  void merge(const std::string& prefix, const Report& other);

  const std::vector<std::pair<std::string, std::string>>& entries() const noexcept { return entries_; }
  const std::vector<std::pair<std::string, std::vector<TrajectoryRow>>>& csvs() const noexcept { return csvs_; }
  // Value for key; throws std::out_of_range when absent.
  const std::string& at(const std::string& key) const;
  std::string text() const;
  // report.txt and one CSV per trajectory; returns the files written.
  std::vector<std::filesystem::path> write(const std::filesystem::path& dir) const;

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
  std::vector<std::pair<std::string, std::vector<TrajectoryRow>>> csvs_;
};

}  // namespace gpwb::experiments
