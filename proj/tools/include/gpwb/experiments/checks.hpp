#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace gpwb::experiments {

struct CheckResult {
  std::string name;
  // Criteria met and finished within budget.
  bool passed = false;
  // Criteria met, ignoring time.
  bool criteria_met = false;
  double seconds = 0.0;
  // Wall-clock limit; a check that runs over it fails.
  double budget_seconds = 0.0;
  std::vector<std::pair<std::string, std::string>> details;
};

// Sample counts and lattice sizes for one run of the checks.
struct CheckScale {
  int moment_instances = 200;
  int kempf_ness_fixtures = 100;
  int functional_instances = 50;
  int vortex_lattice = 32;
  int trace_configs = 20;
  int twisted_fixtures = 100;
  int ssc_fixtures = 50;
  int ssc_samples = 1000;
  int section_lattice = 32;

  static CheckScale full() { return {}; }
  // Reduced sizes for a quick health check.
  static CheckScale quick();
};

CheckResult check_moment_maps(const CheckScale& scale, std::uint64_t seed);
CheckResult check_kempf_ness(const CheckScale& scale, std::uint64_t seed, int workers);
CheckResult check_functional(const CheckScale& scale, std::uint64_t seed);
CheckResult check_vortex_threshold(const CheckScale& scale, std::uint64_t seed, int workers);
CheckResult check_coherent_systems(const CheckScale& scale, std::uint64_t seed);
CheckResult check_higgs(const CheckScale& scale, std::uint64_t seed);
CheckResult check_twisted_triples(const CheckScale& scale, std::uint64_t seed);
CheckResult check_ssc_reduction(const CheckScale& scale, std::uint64_t seed, int workers);
CheckResult check_flow_hygiene(const CheckScale& scale, std::uint64_t seed);
CheckResult check_section_dimension(const CheckScale& scale);

// All of the above in order.
std::vector<CheckResult> run_checks(const CheckScale& scale, std::uint64_t seed, int workers);

}  // namespace gpwb::experiments
