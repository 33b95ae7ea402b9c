#include "gpwb/random.hpp"

namespace gpwb {

Complex random_complex(Rng& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  const double re = n(rng);
  const double im = n(rng);
  return {re, im};
}

CVector random_vector(int n, Rng& rng) {
  CVector v(n);
  for (auto& z : v) z = random_complex(rng);
  return v;
}

Matrix random_skew_hermitian(int n, Rng& rng) {
  Matrix a(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) a(i, j) = random_complex(rng);
  return 0.5 * (a - a.adjoint());
}

Matrix random_unitary(int n, Rng& rng) {
  Matrix a(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) a(i, j) = random_complex(rng);
  Eigen::HouseholderQR<Matrix> qr(a);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR();
  for (int i = 0; i < n; ++i) {
    const double m = std::abs(r(i, i));
    if (m > 0.0) q.col(i) *= r(i, i) / m;
  }
  return q;
}

Matrix random_invertible(int n, Rng& rng, double scale) {
  Matrix a(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) a(i, j) = scale * random_complex(rng);
  return linalg::expm(a);
}

AlgebraElement random_algebra(const ProductGroupSpec& spec, Rng& rng, double scale) {
  AlgebraElement out;
  for (int n : spec.dims()) out.blocks.push_back(scale * random_skew_hermitian(n, rng));
  return out;
}

GroupElement random_unitary_element(const ProductGroupSpec& spec, Rng& rng) {
  GroupElement out;
  for (int n : spec.dims()) out.blocks.push_back(random_unitary(n, rng));
  return out;
}

GroupElement random_group_element(const ProductGroupSpec& spec, Rng& rng, double scale) {
  GroupElement out;
  out.flavor = GroupFlavor::complexified;
  for (int n : spec.dims()) out.blocks.push_back(random_invertible(n, rng, scale));
  return out;
}

}  // namespace gpwb
