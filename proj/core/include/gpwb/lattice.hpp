#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/SparseCore>

#include "gpwb/algebra.hpp"
#include "gpwb/kempf_ness.hpp"
#include "gpwb/moment_maps.hpp"

namespace gpwb {

// N x N periodic grid of total area 1.  Site (i, j) has flat index i + N*j;
// direction 0 is x and direction 1 is y.
class TorusLattice {
 public:
  explicit TorusLattice(int n);

  int size() const noexcept { return n_; }
  int sites() const noexcept { return n_ * n_; }
  double spacing() const noexcept { return 1.0 / n_; }
  double cell_area() const noexcept { return spacing() * spacing(); }
  int site(int i, int j) const noexcept;
  int coord(int site, int dir) const noexcept { return dir == 0 ? site % n_ : site / n_; }
  // Neighbour of `site` after `steps` moves along `dir`, wrapping around.
  int shift(int site, int dir, int steps = 1) const noexcept;

  bool operator==(const TorusLattice&) const = default;

 private:
  int n_;
};

TorusLattice build_torus(int n);

// Holomorphic structure of one factor: complex links W[dir][site] map the
// fibre at `site` to the fibre at site + dir.  The accumulated complex gauge
// transformation is kept so the metric h = g^dagger g can be reported.
struct LatticeBundle {
  int rank = 1;
  std::array<std::vector<Matrix>, 2> links;
  std::vector<Matrix> gauge;

  Matrix metric(int site) const { return gauge[site].adjoint() * gauge[site]; }
  // Largest ratio of singular values over all links.
  double worst_condition_number() const;
};

// Unitary bundle with uniform plaquette phase 2*pi*d/N^2.  Throws when
// |d| > N^2/4.
LatticeBundle make_constant_curvature_line_bundle(const TorusLattice& lat, int d);
// Direct sum of such line bundles, one per entry of `degrees`.
LatticeBundle make_split_bundle(const TorusLattice& lat, const std::vector<int>& degrees);
LatticeBundle make_trivial_bundle(const TorusLattice& lat, int rank);

// Unitary links of the Chern connection of the holomorphic structure with
// respect to the standard metric.
std::array<std::vector<Matrix>, 2> chern_links(const LatticeBundle& bundle, const TorusLattice& lat);
// Plaquette holonomy around the cell with lower-left corner at each site.
std::vector<Matrix> plaquettes(const LatticeBundle& bundle, const TorusLattice& lat);
// Lambda F per site: -log(plaquette) / cell area (skew-Hermitian).
std::vector<Matrix> contracted_curvature(const LatticeBundle& bundle, const TorusLattice& lat);
// Sum over plaquettes of Im Tr log(plaquette); equals 2*pi*d for L(d).
double lattice_degree(const LatticeBundle& bundle, const TorusLattice& lat);
// Largest |phase| over all plaquette eigenvalues; values near pi are ambiguous.
double max_plaquette_phase(const LatticeBundle& bundle, const TorusLattice& lat);

using SectionField = std::vector<CVector>;

// Factors, field and equation data of a lattice pair.  Frozen factors are
// never touched by the flow; constant factors move by one global matrix.
struct LatticePairState {
  TorusLattice lattice;
  std::vector<LatticeBundle> factors;
  SectionField section;
  RepSpec rep;
  SubgroupSetting setting;
  // Holomorphicity achieved at construction (relative dbar norm).
  double construction_tolerance = 0.0;
  std::vector<std::string> warnings;

  const ProductGroupSpec& group() const noexcept { return setting.group(); }
  // Throws std::invalid_argument on inconsistent shapes.
  void validate() const;
};

// Sum over directions of c_dir (rho(W)^{-1} Phi(x + dir) - Phi(x)) / a with
// c_x = 1, c_y = i.  Sparse over (site, component), component fastest.
Eigen::SparseMatrix<Complex> dbar_operator(const LatticePairState& state);
SectionField apply_dbar(const LatticePairState& state, const SectionField& field);
// sqrt(sum a^2 |v|^2).
double field_norm(const TorusLattice& lat, const SectionField& field);
// |dbar Phi| / |Phi| (0 for a vanishing field).
double holomorphicity_defect(const LatticePairState& state);

struct HolomorphicSections {
  std::vector<SectionField> sections;  // unit L2 norm, best first
  std::vector<double> residuals;       // |dbar s| per returned section
  std::vector<double> singular_values; // smallest few, ascending
  int kernel_dimension = 0;            // values below the largest gap
  double gap_ratio = 0.0;              // ratio across that gap
};

// Smallest right singular vectors of the dense dbar operator.  With
// require_exact, throws if fewer than `count` values sit below the gap.
HolomorphicSections holomorphic_sections(const LatticePairState& state, int count,
                                         bool require_exact = false);

// Per-site residual pi(Lambda F + mu(Phi)) - c.  Frozen blocks are zero and
// constant-mode blocks carry the site average.
struct ResidualField {
  std::vector<AlgebraElement> sites;
  double l2 = 0.0;
  double linf = 0.0;
  std::vector<double> site_norms;
};
ResidualField pointwise_residual(const LatticePairState& state);

// Average over sites of Tr(i * residual) for one factor, in units of 2*pi.
double integrated_residual_trace(const LatticePairState& state, std::size_t factor);

// Complex gauge transformation per site and factor; frozen blocks must be
// the identity and constant blocks site-independent.
void apply_gauge(LatticePairState& state, const std::vector<GroupElement>& g);
// Largest |log eigenvalue| of the metric over sites and factors.
double sup_log_metric(const LatticePairState& state);

struct LatticeFlowOptions {
  int max_iter = 20000;
  double step = 0.1;
  double max_step = 1.0;
  double min_step = 1e-12;
  double tol = 1e-8;
  double divergence_log_metric = 50.0;
  int grow_after = 5;
};

struct TrajectoryRow {
  int iteration = 0;
  double l2_residual = 0.0;
  double linf_residual = 0.0;
  double sup_log_metric = 0.0;
};

struct LatticeFlowReport {
  bool converged = false;
  bool diverged = false;
  bool stalled = false;
  bool marginal = false;
  int iterations = 0;
  int rejections = 0;
  double final_residual = 0.0;
  double final_linf = 0.0;
  double sup_log_metric = 0.0;
  std::vector<TrajectoryRow> trajectory;
  std::vector<double> degrees_before;  // in units of 2*pi, per factor
  std::vector<double> degrees_after;
  std::vector<double> residual_traces; // integrated_residual_trace per factor at the end
  std::vector<double> site_residual_norms;
  // Largest Frobenius norm of each factor's residual block over sites.
  std::vector<double> factor_residual_linf;
  double holomorphicity_before = 0.0;
  double holomorphicity_after = 0.0;
  // Integral obstruction c - deg (units of 2*pi) from the abelian solver.
  std::optional<double> obstruction;
  // Final metric per factor and site.
  std::vector<std::vector<Matrix>> metric;
};

// Semi-implicit descent: each step solves (I/dt + J) sigma = -i R with J the
// linearisation of i R along Hermitian gauge directions, then applies
// exp(sigma).  Accepts a step unless the L2 residual grows.
LatticeFlowReport heat_flow(LatticePairState& state, const LatticeFlowOptions& opts = {});

// Independent scalar solver for a single full rank-one factor acting on
// standard slots: -Lap u + |phi|^2 e^{2u} = c - f by damped Newton.  The
// returned metric is e^{2u}.
LatticeFlowReport newton_abelian(const LatticePairState& state, const LatticeFlowOptions& opts = {});

}  // namespace gpwb
