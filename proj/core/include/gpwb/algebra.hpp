#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace gpwb {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

inline constexpr Complex kI{0.0, 1.0};

// Raised when block shapes disagree with a ProductGroupSpec.
class DimensionError : public std::invalid_argument {
 public:
  DimensionError(std::size_t factor, const std::string& what);
  std::size_t factor() const noexcept { return factor_; }

 private:
  std::size_t factor_;
};

// K = U(n_1) x ... x U(n_p) with the auxiliary representation taken to be
// the direct sum of the standard representations.
class ProductGroupSpec {
 public:
  explicit ProductGroupSpec(std::vector<int> factor_dims);

  std::size_t factors() const noexcept { return dims_.size(); }
  int dim(std::size_t factor) const { return dims_.at(factor); }
  std::span<const int> dims() const noexcept { return dims_; }
  // Dimension of the auxiliary representation space.
  int aux_dim() const noexcept;

  bool operator==(const ProductGroupSpec&) const = default;

 private:
  std::vector<int> dims_;
};

enum class AlgebraFlavor { compact, general };
enum class GroupFlavor { unitary, complexified };

struct AlgebraElement {
  std::vector<Matrix> blocks;
  AlgebraFlavor flavor = AlgebraFlavor::compact;

  static AlgebraElement zero(const ProductGroupSpec& spec,
                             AlgebraFlavor flavor = AlgebraFlavor::compact);

  std::size_t factors() const noexcept { return blocks.size(); }
  // True when every block is skew-Hermitian to the given relative tolerance.
  bool is_skew_hermitian(double tol = 1e-12) const;
  void check_shape(const ProductGroupSpec& spec) const;

  AlgebraElement& operator+=(const AlgebraElement& o);
  AlgebraElement& operator-=(const AlgebraElement& o);
  AlgebraElement& operator*=(double a);
};

AlgebraElement operator+(AlgebraElement a, const AlgebraElement& b);
AlgebraElement operator-(AlgebraElement a, const AlgebraElement& b);
AlgebraElement operator*(double a, AlgebraElement b);

struct GroupElement {
  std::vector<Matrix> blocks;
  GroupFlavor flavor = GroupFlavor::unitary;

  static GroupElement identity(const ProductGroupSpec& spec);

  std::size_t factors() const noexcept { return blocks.size(); }
  bool is_unitary(double tol = 1e-10) const;
  GroupElement inverse() const;
  void check_shape(const ProductGroupSpec& spec) const;
};

GroupElement operator*(const GroupElement& a, const GroupElement& b);

enum class FactorMode { full, frozen, constant };

std::string to_string(FactorMode mode);
FactorMode factor_mode_from_string(const std::string& name);

// Which factors of K are gauge-varying, plus the central shift c_H.
class SubgroupSetting {
 public:
  // levels[i] is the real scalar c_i; the shift block is -i c_i Id on
  // non-frozen factors and zero on frozen ones.
  SubgroupSetting(const ProductGroupSpec& spec, std::vector<FactorMode> modes,
                  std::vector<double> levels);

  static SubgroupSetting all_full(const ProductGroupSpec& spec,
                                  std::vector<double> levels);

  FactorMode mode(std::size_t factor) const { return modes_.at(factor); }
  std::span<const FactorMode> modes() const noexcept { return modes_; }
  double level(std::size_t factor) const { return levels_.at(factor); }
  std::span<const double> levels() const noexcept { return levels_; }
  bool frozen(std::size_t factor) const { return mode(factor) == FactorMode::frozen; }
  const AlgebraElement& central_shift() const noexcept { return shift_; }
  const ProductGroupSpec& group() const noexcept { return spec_; }

 private:
  ProductGroupSpec spec_;
  std::vector<FactorMode> modes_;
  std::vector<double> levels_;
  AlgebraElement shift_;
};

// Sum over factors of Re Tr(u_i v_i^dagger).
double inner_product(const AlgebraElement& u, const AlgebraElement& v,
                     const ProductGroupSpec& spec);
double norm(const AlgebraElement& u, const ProductGroupSpec& spec);

AlgebraElement project_subalgebra(const AlgebraElement& s, const SubgroupSetting& setting);

// Blockwise exp(t s).  A complex t is allowed so that exp(i t s) is reachable.
GroupElement exp_element(const AlgebraElement& s, double t);
GroupElement exp_element(const AlgebraElement& s, Complex t);

// Blockwise (g^dagger)^{-1}.
GroupElement cartan_involution(const GroupElement& g);

// k s k^{-1} blockwise.
AlgebraElement adjoint_action(const GroupElement& k, const AlgebraElement& s);

// u with g = k exp(i u), k unitary, u skew-Hermitian: u = -(i/2) log(g^dagger g).
AlgebraElement positive_part_log(const GroupElement& g);

// Largest |log| eigenvalue of g^dagger g over all blocks.
double sup_log_metric(const GroupElement& g);

namespace linalg {

// Exponential of a Hermitian matrix via its eigendecomposition.
Matrix exp_hermitian(const Matrix& h);
// Logarithm of a Hermitian positive-definite matrix.
Matrix log_hermitian_pd(const Matrix& h);
// Principal logarithm of a unitary matrix (skew-Hermitian result).
Matrix log_unitary(const Matrix& u);
// General matrix exponential.
Matrix expm(const Matrix& a);
Matrix hermitian_part(const Matrix& a);
double frobenius(const Matrix& a);

}  // namespace linalg

}  // namespace gpwb
