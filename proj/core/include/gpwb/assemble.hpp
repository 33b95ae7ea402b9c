#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>

#include "gpwb/fixture.hpp"
#include "gpwb/lattice.hpp"

namespace gpwb {

// Holomorphic sections of L(d) on an N x N torus, computed once per (N, d).
// Safe to share between threads.
class SectionCache {
 public:
  // Unit-norm basis of the kernel; empty for d < 0, the constant for d = 0.
  const std::vector<SectionField>& sections(int n, int degree);

 private:
  std::mutex mutex_;
  std::map<std::pair<int, int>, std::vector<SectionField>> cache_;
};

struct AssemblyParams {
  int lattice_size = 16;
  std::uint64_t seed = 1;
  // Picks one kernel vector instead of a random combination of all of them.
  std::optional<int> section_index;
  // Scale of the random complex coefficient of each supported component.
  double amplitude = 1.0;
};

// Lattice pair for a decomposable fixture: split bundles per factor, the
// fixture's representation and factor modes, levels scaled by 2*pi, and a
// section whose supported components are holomorphic sections of the
// corresponding line bundles.  Throws when a supported component has
// negative degree; constraint violations become warnings.
LatticePairState assemble_example(const CurveFixture& fx, const AssemblyParams& params, SectionCache& cache);

}  // namespace gpwb
