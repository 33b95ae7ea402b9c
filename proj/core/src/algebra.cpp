#include "gpwb/algebra.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>
#include <unsupported/Eigen/MatrixFunctions>

namespace gpwb {

DimensionError::DimensionError(std::size_t factor, const std::string& what)
    : std::invalid_argument(fmt::format("factor {}: {}", factor, what)), factor_(factor) {}

ProductGroupSpec::ProductGroupSpec(std::vector<int> factor_dims) : dims_(std::move(factor_dims)) {
  if (dims_.empty()) throw std::invalid_argument("product group needs at least one factor");
  for (std::size_t i = 0; i < dims_.size(); ++i)
    if (dims_[i] < 1) throw DimensionError(i, "factor dimension must be positive");
}

int ProductGroupSpec::aux_dim() const noexcept {
  int total = 0;
  for (int d : dims_) total += d;
  return total;
}

namespace {

void check_blocks(const std::vector<Matrix>& blocks, const ProductGroupSpec& spec) {
  if (blocks.size() != spec.factors())
    throw DimensionError(std::min(blocks.size(), spec.factors()),
                         fmt::format("expected {} blocks, got {}", spec.factors(), blocks.size()));
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const auto n = spec.dim(i);
    if (blocks[i].rows() != n || blocks[i].cols() != n)
      throw DimensionError(i, fmt::format("expected {}x{} block, got {}x{}", n, n,
                                          blocks[i].rows(), blocks[i].cols()));
  }
}

void check_same_layout(const std::vector<Matrix>& a, const std::vector<Matrix>& b) {
  if (a.size() != b.size())
    throw DimensionError(std::min(a.size(), b.size()), "block count mismatch");
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i].rows() != b[i].rows() || a[i].cols() != b[i].cols())
      throw DimensionError(i, "block shape mismatch");
}

}  // namespace

AlgebraElement AlgebraElement::zero(const ProductGroupSpec& spec, AlgebraFlavor flavor) {
  AlgebraElement out;
  out.flavor = flavor;
  for (int n : spec.dims()) out.blocks.push_back(Matrix::Zero(n, n));
  return out;
}

bool AlgebraElement::is_skew_hermitian(double tol) const {
  return std::all_of(blocks.begin(), blocks.end(), [tol](const Matrix& b) {
    return (b + b.adjoint()).norm() < tol * (1.0 + b.norm());
  });
}

void AlgebraElement::check_shape(const ProductGroupSpec& spec) const { check_blocks(blocks, spec); }

AlgebraElement& AlgebraElement::operator+=(const AlgebraElement& o) {
  check_same_layout(blocks, o.blocks);
  for (std::size_t i = 0; i < blocks.size(); ++i) blocks[i] += o.blocks[i];
  if (o.flavor == AlgebraFlavor::general) flavor = AlgebraFlavor::general;
  return *this;
}

AlgebraElement& AlgebraElement::operator-=(const AlgebraElement& o) {
  check_same_layout(blocks, o.blocks);
  for (std::size_t i = 0; i < blocks.size(); ++i) blocks[i] -= o.blocks[i];
  if (o.flavor == AlgebraFlavor::general) flavor = AlgebraFlavor::general;
  return *this;
}

AlgebraElement& AlgebraElement::operator*=(double a) {
  for (auto& b : blocks) b *= a;
  return *this;
}

AlgebraElement operator+(AlgebraElement a, const AlgebraElement& b) { return a += b; }
AlgebraElement operator-(AlgebraElement a, const AlgebraElement& b) { return a -= b; }
AlgebraElement operator*(double a, AlgebraElement b) { return b *= a; }

GroupElement GroupElement::identity(const ProductGroupSpec& spec) {
  GroupElement out;
  for (int n : spec.dims()) out.blocks.push_back(Matrix::Identity(n, n));
  return out;
}

bool GroupElement::is_unitary(double tol) const {
  return std::all_of(blocks.begin(), blocks.end(), [tol](const Matrix& b) {
    return (b.adjoint() * b - Matrix::Identity(b.rows(), b.cols())).norm() < tol;
  });
}

GroupElement GroupElement::inverse() const {
  GroupElement out;
  out.flavor = flavor;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    if (flavor == GroupFlavor::unitary) {
      out.blocks.push_back(blocks[i].adjoint());
      continue;
    }
    Eigen::PartialPivLU<Matrix> lu(blocks[i]);
    if (std::abs(lu.determinant()) == 0.0) throw DimensionError(i, "singular group block");
    out.blocks.push_back(lu.inverse());
  }
  return out;
}

void GroupElement::check_shape(const ProductGroupSpec& spec) const { check_blocks(blocks, spec); }

GroupElement operator*(const GroupElement& a, const GroupElement& b) {
  check_same_layout(a.blocks, b.blocks);
  GroupElement out;
  out.flavor = (a.flavor == GroupFlavor::unitary && b.flavor == GroupFlavor::unitary)
                   ? GroupFlavor::unitary
                   : GroupFlavor::complexified;
  for (std::size_t i = 0; i < a.blocks.size(); ++i) out.blocks.push_back(a.blocks[i] * b.blocks[i]);
  return out;
}

std::string to_string(FactorMode mode) {
  switch (mode) {
    case FactorMode::full: return "full";
    case FactorMode::frozen: return "frozen";
    case FactorMode::constant: return "constant";
  }
  return "full";
}

FactorMode factor_mode_from_string(const std::string& name) {
  if (name == "full") return FactorMode::full;
  if (name == "frozen") return FactorMode::frozen;
  if (name == "constant") return FactorMode::constant;
  throw std::invalid_argument(fmt::format("unknown factor mode '{}'", name));
}

SubgroupSetting::SubgroupSetting(const ProductGroupSpec& spec, std::vector<FactorMode> modes,
                                 std::vector<double> levels)
    : spec_(spec), modes_(std::move(modes)), levels_(std::move(levels)) {
  if (modes_.size() != spec_.factors())
    throw DimensionError(modes_.size(), "one mode per factor required");
  if (levels_.size() != spec_.factors())
    throw DimensionError(levels_.size(), "one level per factor required");
  if (std::all_of(modes_.begin(), modes_.end(), [](FactorMode m) { return m == FactorMode::frozen; }))
    throw std::invalid_argument("at least one factor must be gauge-varying");
  shift_ = AlgebraElement::zero(spec_);
  for (std::size_t i = 0; i < spec_.factors(); ++i) {
    if (modes_[i] == FactorMode::frozen) {
      levels_[i] = 0.0;
      continue;
    }
    const int n = spec_.dim(i);
    shift_.blocks[i] = -kI * levels_[i] * Matrix::Identity(n, n);
  }
}

SubgroupSetting SubgroupSetting::all_full(const ProductGroupSpec& spec, std::vector<double> levels) {
  return SubgroupSetting(spec, std::vector<FactorMode>(spec.factors(), FactorMode::full),
                         std::move(levels));
}

double inner_product(const AlgebraElement& u, const AlgebraElement& v, const ProductGroupSpec& spec) {
  u.check_shape(spec);
  v.check_shape(spec);
  double acc = 0.0;
  for (std::size_t i = 0; i < u.blocks.size(); ++i)
    acc += (u.blocks[i].array() * v.blocks[i].array().conjugate()).sum().real();
  return acc;
}

double norm(const AlgebraElement& u, const ProductGroupSpec& spec) {
  return std::sqrt(std::max(0.0, inner_product(u, u, spec)));
}

AlgebraElement project_subalgebra(const AlgebraElement& s, const SubgroupSetting& setting) {
  s.check_shape(setting.group());
  AlgebraElement out = s;
  for (std::size_t i = 0; i < out.blocks.size(); ++i)
    if (setting.frozen(i)) out.blocks[i].setZero();
  return out;
}

namespace linalg {

Matrix hermitian_part(const Matrix& a) { return 0.5 * (a + a.adjoint()); }

double frobenius(const Matrix& a) { return a.norm(); }

Matrix exp_hermitian(const Matrix& h) {
  if (h.rows() == 1) return Matrix::Constant(1, 1, std::exp(h(0, 0).real()));
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(h));
  return es.eigenvectors() * es.eigenvalues().array().exp().matrix().asDiagonal() *
         es.eigenvectors().adjoint();
}

Matrix log_hermitian_pd(const Matrix& h) {
  if (h.rows() == 1) return Matrix::Constant(1, 1, std::log(h(0, 0).real()));
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(h));
  return es.eigenvectors() * es.eigenvalues().array().log().matrix().asDiagonal() *
         es.eigenvectors().adjoint();
}

Matrix log_unitary(const Matrix& u) {
  if (u.rows() == 1) return Matrix::Constant(1, 1, Complex(0.0, std::arg(u(0, 0))));
  // A unitary matrix is normal, so its Schur form is diagonal.
  Eigen::ComplexSchur<Matrix> schur(u);
  const Matrix& q = schur.matrixU();
  CVector d = schur.matrixT().diagonal();
  for (auto& z : d) z = Complex(0.0, std::arg(z));
  Matrix out = q * d.asDiagonal() * q.adjoint();
  return 0.5 * (out - out.adjoint());
}

Matrix expm(const Matrix& a) {
  if (a.rows() == 1) return Matrix::Constant(1, 1, std::exp(a(0, 0)));
  return a.exp();
}

}  // namespace linalg

namespace {

// exp(t s) for skew-Hermitian s and any complex t, using s = V diag(i l) V^dagger.
Matrix exp_skew(const Matrix& s, Complex t) {
  if (s.rows() == 1) return Matrix::Constant(1, 1, std::exp(t * Complex(0.0, s(0, 0).imag())));
  Eigen::SelfAdjointEigenSolver<Matrix> es(linalg::hermitian_part(-kI * s));
  CVector d(es.eigenvalues().size());
  for (Eigen::Index k = 0; k < d.size(); ++k) d(k) = std::exp(t * kI * es.eigenvalues()(k));
  return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace

GroupElement exp_element(const AlgebraElement& s, Complex t) {
  GroupElement out;
  const bool compact = s.flavor == AlgebraFlavor::compact;
  out.flavor = (compact && t.imag() == 0.0) ? GroupFlavor::unitary : GroupFlavor::complexified;
  for (const auto& b : s.blocks) out.blocks.push_back(compact ? exp_skew(b, t) : linalg::expm(t * b));
  return out;
}

GroupElement exp_element(const AlgebraElement& s, double t) { return exp_element(s, Complex(t, 0.0)); }

GroupElement cartan_involution(const GroupElement& g) {
  GroupElement out;
  out.flavor = g.flavor;
  for (std::size_t i = 0; i < g.blocks.size(); ++i) {
    const Matrix& b = g.blocks[i];
    Eigen::PartialPivLU<Matrix> lu(b.adjoint());
    const double scale = std::max(1.0, b.cwiseAbs().maxCoeff());
    if (std::abs(lu.determinant()) <= 1e-300 * std::pow(scale, static_cast<double>(b.rows())))
      throw DimensionError(i, "singular block has no Cartan image");
    out.blocks.push_back(lu.inverse());
  }
  return out;
}

AlgebraElement adjoint_action(const GroupElement& k, const AlgebraElement& s) {
  check_same_layout(k.blocks, s.blocks);
  AlgebraElement out;
  out.flavor = s.flavor;
  for (std::size_t i = 0; i < s.blocks.size(); ++i) {
    if (k.flavor == GroupFlavor::unitary)
      out.blocks.push_back(k.blocks[i] * s.blocks[i] * k.blocks[i].adjoint());
    else
      out.blocks.push_back(k.blocks[i] * s.blocks[i] * k.blocks[i].inverse());
  }
  if (k.flavor != GroupFlavor::unitary) out.flavor = AlgebraFlavor::general;
  return out;
}

AlgebraElement positive_part_log(const GroupElement& g) {
  AlgebraElement out;
  for (const auto& b : g.blocks)
    out.blocks.push_back(-0.5 * kI * linalg::log_hermitian_pd(b.adjoint() * b));
  return out;
}

double sup_log_metric(const GroupElement& g) {
  double worst = 0.0;
  for (const auto& b : g.blocks) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(linalg::hermitian_part(b.adjoint() * b),
                                             Eigen::EigenvaluesOnly);
    for (double lam : es.eigenvalues()) {
      if (!(lam > 0.0) || !std::isfinite(lam)) return std::numeric_limits<double>::infinity();
      worst = std::max(worst, std::abs(std::log(lam)));
    }
  }
  return worst;
}

}  // namespace gpwb
