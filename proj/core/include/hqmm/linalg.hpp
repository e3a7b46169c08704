#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <random>

namespace hqmm {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Every stochastic routine in the library draws from this engine so that a
/// 64-bit seed fully determines the output.
using Rng = std::mt19937_64;

/// Matrix of i.i.d. standard complex Gaussians (real and imaginary parts each
/// with variance 1/2).
CMatrix complex_gaussian(Index rows, Index cols, Rng& rng);

/// ||X^H X - I||_F.
double stiefel_residual(const CMatrix& x);

/// (X + X^H) / 2.
inline CMatrix hermitian_part(const CMatrix& x) { return (x + x.adjoint()) / 2.0; }

/// Smallest eigenvalue of the Hermitian part of a square matrix.
double min_hermitian_eigenvalue(const CMatrix& x);

/// Index drawn with probability proportional to the non-negative weights p.
Index draw_categorical(const RVector& p, Rng& rng);

/// Seeds derived from one run seed (restarts, folds, ...). SplitMix64 step so
/// neighbouring indices give unrelated streams.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace hqmm
