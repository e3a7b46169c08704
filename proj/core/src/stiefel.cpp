#include "hqmm/stiefel.hpp"

#include "hqmm/error.hpp"

#include <Eigen/LU>

#include <cmath>
#include <limits>

namespace hqmm {

namespace {

// Partial-pivoting LU reports no singularity on its own; rcond below this is
// treated as a breakdown.
constexpr double kMinReciprocalCondition = 1e-13;

void check_shapes(const CMatrix& kappa, const CMatrix& g) {
  if (kappa.rows() != g.rows() || kappa.cols() != g.cols())
    throw DimensionError("gradient shape " + std::to_string(g.rows()) + "x" + std::to_string(g.cols()) +
                         " does not match point shape " + std::to_string(kappa.rows()) + "x" +
                         std::to_string(kappa.cols()));
  if (!g.allFinite()) throw NumericalError("gradient has non-finite entries");
}

CMatrix solve_checked(const CMatrix& lhs, const CMatrix& rhs) {
  Eigen::PartialPivLU<CMatrix> lu(lhs);
  const double rcond = lu.rcond();
  if (!(rcond > kMinReciprocalCondition))
    throw NumericalError("Cayley system is numerically singular (rcond " + std::to_string(rcond) + ")");
  return lu.solve(rhs);
}

}  // namespace

CMatrix skew_generator(const CMatrix& kappa, const CMatrix& g) {
  check_shapes(kappa, g);
  return g * kappa.adjoint() - kappa * g.adjoint();
}

StiefelPoint cayley_retract(const StiefelPoint& kappa, const CMatrix& g, double tau) {
  const CMatrix& x = kappa.matrix();
  const CMatrix a = skew_generator(x, g);
  if (tau == 0.0) return kappa;
  const Index m = x.rows();
  const CMatrix half = (0.5 * tau) * a;
  const CMatrix lhs = CMatrix::Identity(m, m) + half;
  const CMatrix rhs = x - half * x;
  return StiefelPoint::trusted(solve_checked(lhs, rhs), kappa.block_dim());
}

StiefelPoint cayley_retract_smw(const StiefelPoint& kappa, const CMatrix& g, double tau) {
  const CMatrix& x = kappa.matrix();
  check_shapes(x, g);
  if (tau == 0.0) return kappa;
  const Index n = x.cols();
  CMatrix u(x.rows(), 2 * n), v(x.rows(), 2 * n);
  u << g, x;
  v << x, -g;
  const CMatrix vhu = v.adjoint() * u;
  const CMatrix vhx = v.adjoint() * x;
  const CMatrix inner = CMatrix::Identity(2 * n, 2 * n) + (0.5 * tau) * vhu;
  CMatrix out = x - tau * (u * solve_checked(inner, vhx));
  return StiefelPoint::trusted(std::move(out), kappa.block_dim());
}

MomentumDirection::MomentumDirection(double beta) : beta_(beta) {
  if (!(beta >= 0.0 && beta < 1.0)) throw InvalidArgument("momentum beta must lie in [0, 1)");
}

MomentumDirection::Result MomentumDirection::next(const CMatrix& raw) {
  if (!raw.allFinite()) throw NumericalError("raw gradient has non-finite entries");
  if (momentum_.size() == 0) momentum_ = CMatrix::Zero(raw.rows(), raw.cols());
  if (momentum_.rows() != raw.rows() || momentum_.cols() != raw.cols())
    throw DimensionError("gradient shape changed between momentum updates");

  const double raw_norm = raw.norm();
  if (raw_norm > 0.0)
    momentum_ = beta_ * momentum_ + ((1.0 - beta_) / raw_norm) * raw;
  else
    momentum_ *= beta_;

  const double m_norm = momentum_.norm();
  if (!(m_norm > 0.0)) return {CMatrix::Zero(raw.rows(), raw.cols()), true};
  return {momentum_ / m_norm, false};
}

}  // namespace hqmm
