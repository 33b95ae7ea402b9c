#include "gpwb/assemble.hpp"

#include <numbers>
#include <stdexcept>

#include <fmt/format.h>

#include "gpwb/random.hpp"
#include "gpwb/stability.hpp"

namespace gpwb {

const std::vector<SectionField>& SectionCache::sections(int n, int degree) {
  std::lock_guard lock(mutex_);
  const auto key = std::make_pair(n, degree);
  if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  const TorusLattice lat(n);
  std::vector<SectionField> out;
  if (degree == 0) {
    out.push_back(SectionField(lat.sites(), CVector::Ones(1)));
  } else if (degree > 0) {
    const ProductGroupSpec spec({1});
    LatticePairState line{lat,
                          {make_constant_curvature_line_bundle(lat, degree)},
                          SectionField(lat.sites(), CVector::Zero(1)),
                          RepSpec::standard(1),
                          SubgroupSetting::all_full(spec, {0.0}),
                          0.0,
                          {}};
    out = holomorphic_sections(line, degree, true).sections;
  }
  return cache_.emplace(key, std::move(out)).first->second;
}

LatticePairState assemble_example(const CurveFixture& fx, const AssemblyParams& params, SectionCache& cache) {
  fx.validate();
  const TorusLattice lat(params.lattice_size);
  const ProductGroupSpec spec = fx.group();
  const RepSpec rep = fx.rep();
  std::vector<double> levels;
  for (const auto& c : fx.levels) levels.push_back(2.0 * std::numbers::pi * to_double(c));
  SubgroupSetting setting(spec, fx.modes(), levels);

  std::vector<LatticeBundle> factors;
  for (const auto& d : fx.degrees) factors.push_back(make_split_bundle(lat, d));

  Rng rng(params.seed);
  SectionField section(lat.sites(), CVector::Zero(rep.dim()));
  for (const auto& m : fx.support) {
    const int d = fx.component_degree(m);
    if (d < 0)
      throw std::invalid_argument(
          fmt::format("supported component has degree {} and no holomorphic sections", d));
    const auto& basis = cache.sections(lat.size(), d);
    SectionField comp(lat.sites(), CVector::Zero(1));
    if (params.section_index) {
      if (*params.section_index < 0 || *params.section_index >= static_cast<int>(basis.size()))
        throw std::invalid_argument(fmt::format("section index {} out of range for degree {}", *params.section_index, d));
      comp = basis[*params.section_index];
    } else {
      for (const auto& b : basis) {
        const Complex w = random_complex(rng);
        for (int s = 0; s < lat.sites(); ++s) comp[s] += w * b[s];
      }
    }
    const Complex coeff = params.amplitude * random_complex(rng);
    const int idx = fx.flat_index(m);
    for (int s = 0; s < lat.sites(); ++s) section[s](idx) += coeff * comp[s](0);
  }

  LatticePairState state{lat, std::move(factors), std::move(section), rep, std::move(setting), 0.0, {}};
  state.construction_tolerance = holomorphicity_defect(state);

  if (fx.kind == ExampleKind::coherent_system || fx.kind == ExampleKind::twisted_triple ||
      fx.kind == ExampleKind::higgs) {
    if (fixture_stable(fx).constraint_violated)
      state.warnings.push_back("levels violate the degree constraint; the flow cannot converge");
  }
  return state;
}

}  // namespace gpwb
