#include "gpwb/experiments/report.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "gpwb/io.hpp"

namespace gpwb::experiments {

void Report::set(const std::string& key, const std::string& value) {
  for (auto& [k, v] : entries_)
    if (k == key) {
      v = value;
      return;
    }
  entries_.emplace_back(key, value);
}

void Report::set(const std::string& key, double value) { set(key, format_double(value)); }
void Report::set(const std::string& key, int value) { set(key, std::to_string(value)); }
void Report::set(const std::string& key, std::size_t value) { set(key, std::to_string(value)); }
void Report::set(const std::string& key, bool value) { set(key, std::string(value ? "true" : "false")); }

void Report::set_block(const std::string& key, const std::string& text) {
  std::istringstream in(text);
  std::string line, joined;
  while (std::getline(in, line)) joined += "\n  " + line;
  set(key, joined);
}

void Report::add_csv(const std::string& name, std::vector<TrajectoryRow> rows) {
  csvs_.emplace_back(name, std::move(rows));
}

void Report::merge(const std::string& prefix, const Report& other) {
  for (const auto& [k, v] : other.entries_) set(prefix + k, v);
  for (const auto& c : other.csvs_) csvs_.push_back(c);
}

const std::string& Report::at(const std::string& key) const {
  for (const auto& [k, v] : entries_)
    if (k == key) return v;
  throw std::out_of_range("no report key " + key);
}

std::string Report::text() const {
  std::string out;
  for (const auto& [k, v] : entries_) {
    out += k;
    out += v.starts_with('\n') ? " =" : " = ";
    out += v;
    out += '\n';
  }
  return out;
}

std::vector<std::filesystem::path> Report::write(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> files;
  const auto report = dir / "report.txt";
  {
    std::ofstream out(report, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + report.string() + " for writing");
    out << text();
    if (!out) throw std::runtime_error("write failed: " + report.string());
  }
  files.push_back(report);
  for (const auto& [name, rows] : csvs_) {
    files.push_back(dir / name);
    save_trajectory_csv(files.back(), rows);
  }
  return files;
}

}  // namespace gpwb::experiments
