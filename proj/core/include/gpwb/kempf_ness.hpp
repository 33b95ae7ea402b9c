#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gpwb/algebra.hpp"
#include "gpwb/moment_maps.hpp"

namespace gpwb {

// Increasing weights alpha_1 < ... < alpha_r with graded pieces in the
// auxiliary space (one basis per factor and weight).  The generating element
// acts as -i*alpha_k on the k-th piece, so i*chi has eigenvalue alpha_k.
class WeightedFiltration {
 public:
  // Reads the filtration off a compact element; equal eigenvalues are merged.
  static WeightedFiltration from_generator(const AlgebraElement& chi, double merge_tol = 1e-9);
  // Single-factor chain of orthonormal bases W^1 < ... < W^r = C^n in `factor`;
  // every other factor carries weight 0.
  static WeightedFiltration from_chain(const ProductGroupSpec& spec, std::size_t factor,
                                       std::span<const Matrix> chain, std::span<const double> weights);

  std::span<const double> weights() const noexcept { return weights_; }
  std::size_t length() const noexcept { return weights_.size(); }
  // Orthonormal basis of the weight-alpha_k piece inside factor f.
  const Matrix& graded(std::size_t k, std::size_t f) const { return graded_.at(k).at(f); }
  // Dimension of W^k (pieces 0..k summed over factors).
  int chain_dim(std::size_t k) const;
  const AlgebraElement& generator() const noexcept { return chi_; }

 private:
  std::vector<double> weights_;
  std::vector<std::vector<Matrix>> graded_;
  AlgebraElement chi_;
};

struct StabilityVerdict {
  bool stable = false;
  // Some tested direction had slack exactly (or within tolerance of) zero.
  bool marginal = false;
  // Trivially acting central directions had nonzero weight: no solution can exist.
  bool constraint_violated = false;
  double slack = 0.0;
  std::optional<AlgebraElement> witness;
  std::string witness_label;
  std::size_t directions_tested = 0;
};

struct FlowOptions {
  int max_iter = 10000;
  double step = 0.1;
  double tol = 1e-10;
  double max_step = 1.0;
  double divergence_log_metric = 50.0;
  double min_step = 1e-12;
};

struct FlowResult {
  bool converged = false;
  bool diverged = false;
  int iterations = 0;
  int rejections = 0;
  double final_residual = 0.0;
  std::vector<double> trajectory;
  std::vector<double> log_metric_trajectory;
  GroupElement final_group_element;
  double sup_log_metric = 0.0;
};

// Orthonormal basis of the span of eigenvectors of i*rho(s) with eigenvalue <= tol.
Matrix negative_subspace(const AlgebraElement& s, const RepSpec& rep, double tol = 1e-9);

// 0 when x lies in V^-(s) up to rel_tol*|x|, +infinity otherwise.
double maximal_weight(const CVector& x, const AlgebraElement& s, const RepSpec& rep,
                      double rel_tol = 1e-10);

// deg(chi) + lambda(x;chi) - <chi,c>.  chain_degrees[k] is deg(W^{k+1}); empty means zero.
double total_weight(const CVector& x, const WeightedFiltration& filt, const AlgebraElement& c,
                    const RepSpec& rep, std::span<const double> chain_degrees = {});

// deg(chi) = alpha_r deg(W) + sum_{k<r} (alpha_k - alpha_{k+1}) deg(W^k).
double filtration_degree(std::span<const double> weights, std::span<const double> chain_degrees);

// Generators f_1..f_r (weight -1 on W^i, 0 elsewhere) and g_{p+1}..g_r
// (weight 0 on W^{j-1}, 1 elsewhere) of the cone of admissible weights for a
// chain in one factor.  p is the index of the first step containing x.
std::vector<AlgebraElement> ssc_generators(const ProductGroupSpec& spec, std::size_t factor,
                                           std::span<const Matrix> chain, int p);

// Weight vectors of the same generators as plain coordinate vectors.
struct ConeGenerators {
  std::vector<std::vector<double>> f;
  std::vector<std::vector<double>> g;
};
ConeGenerators cone_generators(int r, int p);

// Non-negative coefficients expressing an increasing alpha with alpha_p <= 0
// over cone_generators(r, p).  Throws if alpha is outside the cone.
struct ConeDecomposition {
  std::vector<double> f;
  std::vector<double> g;
};
ConeDecomposition decompose_in_cone(std::span<const double> alpha, int p);

// Candidate subspaces per factor (orthonormal column bases).  Zero and the
// whole space are added automatically.
struct CandidateLattice {
  std::vector<std::vector<Matrix>> per_factor;
};

// Degree of a tuple of factor subspaces; used for curve fixtures.
using SubspaceDegree = std::function<double(std::span<const Matrix>)>;

StabilityVerdict stability_test(const CVector& x, const RepSpec& rep, const SubgroupSetting& setting,
                                const CandidateLattice& lattice, const SubspaceDegree& degree = {},
                                double tol = 1e-10);

// No infinitesimal stabilizer of x in the complexified gauge algebra beyond
// elements that act trivially on the whole representation.
bool is_simple(const CVector& x, const RepSpec& rep, const SubgroupSetting& setting,
               double tol = 1e-9);

// Integral over t in [0,1] of <mu_shifted(exp(i t s) x), s> by composite
// three-point Gauss-Legendre on `panels` panels.
double kn_functional(const CVector& x, const AlgebraElement& s, const RepSpec& rep,
                     const SubgroupSetting& setting, int panels = 512);
// Same functional at a general g = k exp(i u), k unitary.
double kn_functional(const CVector& x, const GroupElement& g, const RepSpec& rep,
                     const SubgroupSetting& setting, int panels = 512);

// Descent h <- exp(-i step R) h with R = mu_shifted(h x).
FlowResult gradient_flow(const CVector& x, const RepSpec& rep, const SubgroupSetting& setting,
                         const FlowOptions& opts = {},
                         const std::optional<GroupElement>& initial = std::nullopt);

}  // namespace gpwb
