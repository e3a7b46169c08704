#pragma once

// Feasible updates on the complex Stiefel manifold {X : X^H X = I} via the
// Cayley transform of the skew-Hermitian matrix A = G X^H - X G^H:
//
//   gamma(tau) = (I + tau/2 A)^{-1} (I - tau/2 A) X
//
// and its low-rank (Sherman-Morrison-Woodbury) form with U = [G | X],
// V = [X | -G], which only inverts a 2n x 2n matrix:
//
//   gamma(tau) = X - tau U (I + tau/2 V^H U)^{-1} V^H X.
//
// gamma(0) = X and gamma'(0) = -A X = -(G - X G^H X).

#include "hqmm/linalg.hpp"
#include "hqmm/quantum.hpp"

namespace hqmm {

/// A = G X^H - X G^H.
CMatrix skew_generator(const CMatrix& kappa, const CMatrix& g);

/// Full (nN x nN) Cayley retraction. Throws DimensionError on shape mismatch,
/// NumericalError when the system to solve is numerically singular.
StiefelPoint cayley_retract(const StiefelPoint& kappa, const CMatrix& g, double tau);

/// Low-rank form; agrees with cayley_retract up to rounding.
StiefelPoint cayley_retract_smw(const StiefelPoint& kappa, const CMatrix& g, double tau);

/// Momentum accumulator for the normalized-gradient scheme: each raw gradient
/// is scaled to unit Frobenius norm, mixed into the momentum as
/// m = beta m + (1 - beta) g, and the step direction is m / ||m||_F.
class MomentumDirection {
 public:
  explicit MomentumDirection(double beta);

  struct Result {
    CMatrix direction;  ///< unit Frobenius norm, or zero when converged
    bool converged;     ///< raw gradient and momentum were both zero
  };

  /// A zero raw gradient reuses the stored momentum direction.
  Result next(const CMatrix& raw);

  const CMatrix& momentum() const noexcept { return momentum_; }
  double beta() const noexcept { return beta_; }
  void reset() { momentum_.resize(0, 0); }

 private:
  double beta_;
  CMatrix momentum_;
};

}  // namespace hqmm
