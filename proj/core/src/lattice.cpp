#include "gpwb/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <Eigen/SVD>
#include <fmt/format.h>

namespace gpwb {

namespace {

struct Polar {
  Matrix hermitian;  // M with W = exp(M) V
  Matrix unitary;
};

Polar polar(const Matrix& w) {
  if (w.rows() == 1) {
    const double r = std::abs(w(0, 0));
    return {Matrix::Constant(1, 1, std::log(r)), Matrix::Constant(1, 1, w(0, 0) / r)};
  }
  const Matrix m = 0.5 * linalg::log_hermitian_pd(w * w.adjoint());
  return {m, linalg::exp_hermitian(-m) * w};
}

// exp(sign * i * m) for Hermitian m.
Matrix phase_of(const Matrix& m, double sign) {
  if (m.rows() == 1) return Matrix::Constant(1, 1, std::exp(Complex(0.0, sign * m(0, 0).real())));
  Eigen::SelfAdjointEigenSolver<Matrix> es(linalg::hermitian_part(m));
  CVector d(es.eigenvalues().size());
  for (Eigen::Index k = 0; k < d.size(); ++k) d(k) = std::exp(Complex(0.0, sign * es.eigenvalues()(k)));
  return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().adjoint();
}

GroupElement link_element(const LatticePairState& state, int site, int dir) {
  GroupElement g;
  g.flavor = GroupFlavor::complexified;
  for (const auto& b : state.factors) g.blocks.push_back(b.links[dir][site]);
  return g;
}

Matrix rep_matrix(const GroupElement& g, const RepSpec& rep) {
  const int n = rep.dim();
  Matrix out(n, n);
  for (int j = 0; j < n; ++j) out.col(j) = act(g, CVector::Unit(n, j), rep);
  return out;
}

void check_bundle(const LatticeBundle& b, const TorusLattice& lat) {
  for (const auto& l : b.links)
    if (static_cast<int>(l.size()) != lat.sites()) throw std::invalid_argument("link array has the wrong size");
}

}  // namespace

TorusLattice::TorusLattice(int n) : n_(n) {
  if (n < 4) throw std::invalid_argument(fmt::format("torus needs at least 4 sites per side, got {}", n));
}

int TorusLattice::site(int i, int j) const noexcept {
  i = ((i % n_) + n_) % n_;
  j = ((j % n_) + n_) % n_;
  return i + n_ * j;
}

int TorusLattice::shift(int s, int dir, int steps) const noexcept {
  const int i = s % n_;
  const int j = s / n_;
  return dir == 0 ? site(i + steps, j) : site(i, j + steps);
}

TorusLattice build_torus(int n) { return TorusLattice(n); }

double LatticeBundle::worst_condition_number() const {
  double worst = 1.0;
  for (const auto& dir : links)
    for (const auto& w : dir) {
      Eigen::JacobiSVD<Matrix> svd(w);
      const auto& s = svd.singularValues();
      worst = std::max(worst, s(0) / s(s.size() - 1));
    }
  return worst;
}

LatticeBundle make_constant_curvature_line_bundle(const TorusLattice& lat, int d) {
  const int n = lat.size();
  if (4 * std::abs(d) > n * n)
    throw std::invalid_argument(fmt::format("degree {} too large for a {}x{} lattice", d, n, n));
  const double theta = 2.0 * std::numbers::pi * d / (static_cast<double>(n) * n);
  LatticeBundle b;
  b.rank = 1;
  for (auto& l : b.links) l.resize(lat.sites());
  b.gauge.assign(lat.sites(), Matrix::Identity(1, 1));
  for (int s = 0; s < lat.sites(); ++s) {
    const int i = lat.coord(s, 0);
    const int j = lat.coord(s, 1);
    const double px = i == n - 1 ? -theta * n * j : 0.0;
    const double py = theta * i;
    b.links[0][s] = Matrix::Constant(1, 1, std::exp(Complex(0.0, px)));
    b.links[1][s] = Matrix::Constant(1, 1, std::exp(Complex(0.0, py)));
  }
  return b;
}

LatticeBundle make_split_bundle(const TorusLattice& lat, const std::vector<int>& degrees) {
  if (degrees.empty()) throw std::invalid_argument("split bundle needs at least one summand");
  const int r = static_cast<int>(degrees.size());
  LatticeBundle b;
  b.rank = r;
  for (auto& l : b.links) l.assign(lat.sites(), Matrix::Zero(r, r));
  b.gauge.assign(lat.sites(), Matrix::Identity(r, r));
  for (int k = 0; k < r; ++k) {
    const LatticeBundle line = make_constant_curvature_line_bundle(lat, degrees[k]);
    for (int dir = 0; dir < 2; ++dir)
      for (int s = 0; s < lat.sites(); ++s) b.links[dir][s](k, k) = line.links[dir][s](0, 0);
  }
  return b;
}

LatticeBundle make_trivial_bundle(const TorusLattice& lat, int rank) {
  return make_split_bundle(lat, std::vector<int>(rank, 0));
}

std::array<std::vector<Matrix>, 2> chern_links(const LatticeBundle& bundle, const TorusLattice& lat) {
  check_bundle(bundle, lat);
  std::array<std::vector<Polar>, 2> parts;
  for (int dir = 0; dir < 2; ++dir) {
    parts[dir].reserve(lat.sites());
    for (const auto& w : bundle.links[dir]) parts[dir].push_back(polar(w));
  }
  std::array<std::vector<Matrix>, 2> out;
  for (auto& o : out) o.resize(lat.sites());
  for (int s = 0; s < lat.sites(); ++s) {
    out[0][s] = parts[0][s].unitary * phase_of(parts[1][lat.shift(s, 1, -1)].hermitian, 1.0);
    out[1][s] = parts[1][s].unitary * phase_of(parts[0][lat.shift(s, 0, -1)].hermitian, -1.0);
  }
  return out;
}

std::vector<Matrix> plaquettes(const LatticeBundle& bundle, const TorusLattice& lat) {
  const auto u = chern_links(bundle, lat);
  std::vector<Matrix> out(lat.sites());
  for (int s = 0; s < lat.sites(); ++s) {
    const int sx = lat.shift(s, 0);
    const int sy = lat.shift(s, 1);
    out[s] = u[1][s].adjoint() * u[0][sy].adjoint() * u[1][sx] * u[0][s];
  }
  return out;
}

std::vector<Matrix> contracted_curvature(const LatticeBundle& bundle, const TorusLattice& lat) {
  std::vector<Matrix> out = plaquettes(bundle, lat);
  const double inv_area = 1.0 / lat.cell_area();
  for (auto& p : out) p = -inv_area * linalg::log_unitary(p);
  return out;
}

double lattice_degree(const LatticeBundle& bundle, const TorusLattice& lat) {
  double total = 0.0;
  for (const auto& p : plaquettes(bundle, lat)) total += linalg::log_unitary(p).trace().imag();
  return total;
}

double max_plaquette_phase(const LatticeBundle& bundle, const TorusLattice& lat) {
  double worst = 0.0;
  for (const auto& p : plaquettes(bundle, lat)) {
    Eigen::ComplexEigenSolver<Matrix> es(p, false);
    for (const auto& z : es.eigenvalues()) worst = std::max(worst, std::abs(std::arg(z)));
  }
  return worst;
}

void LatticePairState::validate() const {
  const ProductGroupSpec& spec = group();
  rep.check(spec);
  if (factors.size() != spec.factors()) throw std::invalid_argument("one bundle per group factor required");
  for (std::size_t f = 0; f < factors.size(); ++f) {
    if (factors[f].rank != spec.dim(f))
      throw DimensionError(f, fmt::format("bundle rank {} does not match group dimension {}", factors[f].rank,
                                          spec.dim(f)));
    check_bundle(factors[f], lattice);
    if (static_cast<int>(factors[f].gauge.size()) != lattice.sites())
      throw DimensionError(f, "gauge array has the wrong size");
  }
  if (static_cast<int>(section.size()) != lattice.sites())
    throw std::invalid_argument("section needs one vector per site");
  for (const auto& v : section)
    if (v.size() != rep.dim()) throw std::invalid_argument("section vector has the wrong dimension");
}

Eigen::SparseMatrix<Complex> dbar_operator(const LatticePairState& state) {
  const TorusLattice& lat = state.lattice;
  const int dim = state.rep.dim();
  const int total = lat.sites() * dim;
  const double inv_a = 1.0 / lat.spacing();
  const Complex coeff[2] = {Complex(1.0, 0.0), kI};
  std::vector<Eigen::Triplet<Complex>> trip;
  trip.reserve(static_cast<std::size_t>(total) * (2 * dim + 1));
  for (int s = 0; s < lat.sites(); ++s)
    for (int dir = 0; dir < 2; ++dir) {
      const Matrix back = rep_matrix(link_element(state, s, dir).inverse(), state.rep);
      const int t = lat.shift(s, dir);
      for (int r = 0; r < dim; ++r) {
        trip.emplace_back(s * dim + r, s * dim + r, -coeff[dir] * inv_a);
        for (int c = 0; c < dim; ++c)
          if (back(r, c) != Complex(0.0, 0.0)) trip.emplace_back(s * dim + r, t * dim + c, coeff[dir] * inv_a * back(r, c));
      }
    }
  Eigen::SparseMatrix<Complex> op(total, total);
  op.setFromTriplets(trip.begin(), trip.end());
  return op;
}

SectionField apply_dbar(const LatticePairState& state, const SectionField& field) {
  const TorusLattice& lat = state.lattice;
  const double inv_a = 1.0 / lat.spacing();
  const Complex coeff[2] = {Complex(1.0, 0.0), kI};
  SectionField out(lat.sites(), CVector::Zero(state.rep.dim()));
  for (int s = 0; s < lat.sites(); ++s)
    for (int dir = 0; dir < 2; ++dir) {
      const CVector moved = act(link_element(state, s, dir).inverse(), field[lat.shift(s, dir)], state.rep);
      out[s] += coeff[dir] * inv_a * (moved - field[s]);
    }
  return out;
}

double field_norm(const TorusLattice& lat, const SectionField& field) {
  double sum = 0.0;
  for (const auto& v : field) sum += v.squaredNorm();
  return std::sqrt(lat.cell_area() * sum);
}

double holomorphicity_defect(const LatticePairState& state) {
  const double n = field_norm(state.lattice, state.section);
  if (n == 0.0) return 0.0;
  return field_norm(state.lattice, apply_dbar(state, state.section)) / n;
}

HolomorphicSections holomorphic_sections(const LatticePairState& state, int count, bool require_exact) {
  if (count < 1) throw std::invalid_argument("need at least one section");
  const TorusLattice& lat = state.lattice;
  const int dim = state.rep.dim();
  const Matrix dense = Matrix(dbar_operator(state));
  Eigen::BDCSVD<Matrix> svd(dense, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const int total = static_cast<int>(sv.size());
  const int keep = std::min(total, count + 4);
  HolomorphicSections out;
  for (int k = 0; k < keep; ++k) out.singular_values.push_back(sv(total - 1 - k));
  // Values under the numerical-rank threshold count as zero; comparing two
  // rounding-level values would otherwise split an exact kernel.
  const double floor = std::max(sv(0) * total * std::numeric_limits<double>::epsilon(), 1e-300);
  for (int k = 1; k < keep; ++k) {
    const double below = std::max(out.singular_values[k - 1], floor);
    const double ratio = std::max(out.singular_values[k], floor) / below;
    if (ratio > out.gap_ratio) {
      out.gap_ratio = ratio;
      out.kernel_dimension = k;
    }
  }
  if (out.gap_ratio < 1e3) out.kernel_dimension = 0;
  if (require_exact && out.kernel_dimension < count)
    throw std::runtime_error(fmt::format("only {} holomorphic sections found, {} requested (smallest residual {:.3e})",
                                         out.kernel_dimension, count, out.singular_values[0]));
  const double scale = 1.0 / lat.spacing();
  for (int k = 0; k < std::min(count, total); ++k) {
    const CVector v = svd.matrixV().col(total - 1 - k);
    SectionField f(lat.sites());
    for (int s = 0; s < lat.sites(); ++s) f[s] = scale * v.segment(s * dim, dim);
    out.residuals.push_back(field_norm(lat, apply_dbar(state, f)));
    out.sections.push_back(std::move(f));
  }
  return out;
}

ResidualField pointwise_residual(const LatticePairState& state) {
  const TorusLattice& lat = state.lattice;
  const ProductGroupSpec& spec = state.group();
  const std::size_t nf = spec.factors();
  std::vector<std::vector<Matrix>> curv(nf);
  for (std::size_t f = 0; f < nf; ++f)
    if (!state.setting.frozen(f)) curv[f] = contracted_curvature(state.factors[f], lat);

  ResidualField out;
  out.sites.reserve(lat.sites());
  for (int s = 0; s < lat.sites(); ++s) {
    AlgebraElement r = mu_full(state.section[s], state.rep, spec);
    for (std::size_t f = 0; f < nf; ++f)
      if (!state.setting.frozen(f)) r.blocks[f] += curv[f][s];
    r = project_subalgebra(r, state.setting);
    r -= state.setting.central_shift();
    out.sites.push_back(std::move(r));
  }
  for (std::size_t f = 0; f < nf; ++f) {
    if (state.setting.mode(f) != FactorMode::constant) continue;
    Matrix mean = Matrix::Zero(spec.dim(f), spec.dim(f));
    for (const auto& r : out.sites) mean += r.blocks[f];
    mean /= static_cast<double>(lat.sites());
    for (auto& r : out.sites) r.blocks[f] = mean;
  }
  double sum = 0.0;
  out.site_norms.reserve(lat.sites());
  for (const auto& r : out.sites) {
    const double n = norm(r, spec);
    out.site_norms.push_back(n);
    sum += n * n;
    out.linf = std::max(out.linf, n);
  }
  out.l2 = std::sqrt(lat.cell_area() * sum);
  return out;
}

double integrated_residual_trace(const LatticePairState& state, std::size_t factor) {
  const ResidualField r = pointwise_residual(state);
  double sum = 0.0;
  for (const auto& site : r.sites) sum += (kI * site.blocks.at(factor)).trace().real();
  return sum / state.lattice.sites() / (2.0 * std::numbers::pi);
}

void apply_gauge(LatticePairState& state, const std::vector<GroupElement>& g) {
  const TorusLattice& lat = state.lattice;
  if (static_cast<int>(g.size()) != lat.sites()) throw std::invalid_argument("one gauge element per site required");
  std::vector<GroupElement> inv;
  inv.reserve(g.size());
  for (const auto& e : g) inv.push_back(e.inverse());
  for (std::size_t f = 0; f < state.factors.size(); ++f) {
    if (state.setting.frozen(f)) continue;
    auto& b = state.factors[f];
    for (int dir = 0; dir < 2; ++dir)
      for (int s = 0; s < lat.sites(); ++s)
        b.links[dir][s] = g[lat.shift(s, dir)].blocks[f] * b.links[dir][s] * inv[s].blocks[f];
    for (int s = 0; s < lat.sites(); ++s) b.gauge[s] = g[s].blocks[f] * b.gauge[s];
  }
  for (int s = 0; s < lat.sites(); ++s) {
    GroupElement e = g[s];
    e.flavor = GroupFlavor::complexified;
    for (std::size_t f = 0; f < state.factors.size(); ++f)
      if (state.setting.frozen(f)) e.blocks[f] = Matrix::Identity(state.factors[f].rank, state.factors[f].rank);
    state.section[s] = act(e, state.section[s], state.rep);
  }
}

double sup_log_metric(const LatticePairState& state) {
  double worst = 0.0;
  for (std::size_t f = 0; f < state.factors.size(); ++f) {
    if (state.setting.frozen(f)) continue;
    for (const auto& g : state.factors[f].gauge) {
      if (g.rows() == 1) {
        const double a = std::abs(g(0, 0));
        if (!(a > 0.0) || !std::isfinite(a)) return std::numeric_limits<double>::infinity();
        worst = std::max(worst, std::abs(2.0 * std::log(a)));
        continue;
      }
      GroupElement e;
      e.blocks = {g};
      e.flavor = GroupFlavor::complexified;
      worst = std::max(worst, sup_log_metric(e));
    }
  }
  return worst;
}

}  // namespace gpwb
