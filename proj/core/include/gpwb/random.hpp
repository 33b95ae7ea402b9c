#pragma once

#include <cstdint>
#include <random>

#include "gpwb/algebra.hpp"

namespace gpwb {

using Rng = std::mt19937_64;

Complex random_complex(Rng& rng);
CVector random_vector(int n, Rng& rng);
// Skew-Hermitian with Gaussian entries.
Matrix random_skew_hermitian(int n, Rng& rng);
// Haar-distributed unitary via QR with phase correction.
Matrix random_unitary(int n, Rng& rng);
// Invertible matrix close to the identity scale: exp of a random general matrix.
Matrix random_invertible(int n, Rng& rng, double scale = 0.5);

AlgebraElement random_algebra(const ProductGroupSpec& spec, Rng& rng, double scale = 1.0);
GroupElement random_unitary_element(const ProductGroupSpec& spec, Rng& rng);
GroupElement random_group_element(const ProductGroupSpec& spec, Rng& rng, double scale = 0.5);

}  // namespace gpwb
