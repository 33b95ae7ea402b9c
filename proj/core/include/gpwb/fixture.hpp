#pragma once

#include <string>
#include <vector>

#include <boost/rational.hpp>

#include "gpwb/algebra.hpp"
#include "gpwb/moment_maps.hpp"

namespace gpwb {

// Exact arithmetic for slopes: degrees are integers in units of 2*pi.
using Rational = boost::rational<long long>;

// Parses "3", "-7/2" or a finite decimal such as "1.25".
Rational parse_rational(const std::string& text);
std::string to_string(const Rational& r);
double to_double(const Rational& r);

enum class ExampleKind { pair_tensor, triple_fixed_e2, coherent_system, twisted_triple, higgs };

std::string to_string(ExampleKind kind);
ExampleKind example_kind_from_string(const std::string& name);

// A decomposable configuration on an elliptic curve.  Each factor bundle is a
// direct sum of line bundles; the summands form the basis of that factor's
// slots.  A support entry names one summand per slot of the representation.
struct CurveFixture {
  ExampleKind kind = ExampleKind::pair_tensor;
  std::vector<std::vector<int>> degrees;
  std::vector<Rational> levels;
  std::vector<std::vector<int>> support;

  ProductGroupSpec group() const;
  RepSpec rep() const;
  std::vector<FactorMode> modes() const;
  // Degree of the line bundle carrying the component with the given multi-index.
  int component_degree(const std::vector<int>& multi_index) const;
  // Flat index of a multi-index in the representation space.
  int flat_index(const std::vector<int>& multi_index) const;
  // Throws std::invalid_argument when shapes disagree with the kind.
  void validate() const;
};

// Constructors for the five kinds.  Levels are in 2*pi units.
CurveFixture make_pair_fixture(std::vector<int> v1, std::vector<int> v2,
                               std::vector<std::vector<int>> support, Rational c);
CurveFixture make_triple_fixture(std::vector<int> e1, std::vector<int> e2,
                                 std::vector<std::vector<int>> support, Rational c);
CurveFixture make_coherent_fixture(std::vector<int> e, int k, std::vector<std::vector<int>> support,
                                   Rational c1, Rational c2);
CurveFixture make_twisted_fixture(std::vector<int> e1, std::vector<int> e2, std::vector<int> f,
                                  std::vector<std::vector<int>> support, Rational c1, Rational c2);
CurveFixture make_higgs_fixture(std::vector<int> e, std::vector<std::vector<int>> support, Rational cm);

}  // namespace gpwb
