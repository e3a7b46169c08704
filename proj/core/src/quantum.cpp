#include "hqmm/quantum.hpp"

#include "hqmm/error.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <sstream>

namespace hqmm {

// ---------------------------------------------------------------------------
// linalg helpers

CMatrix complex_gaussian(Index rows, Index cols, Rng& rng) {
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  CMatrix g(rows, cols);
  // Column-major fill order is part of the seeded-determinism contract.
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      g(i, j) = Complex(re, im);
    }
  return g;
}

double stiefel_residual(const CMatrix& x) {
  return (x.adjoint() * x - CMatrix::Identity(x.cols(), x.cols())).norm();
}

double min_hermitian_eigenvalue(const CMatrix& x) {
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(hermitian_part(x), Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff();
}

Index draw_categorical(const RVector& p, Rng& rng) {
  const double total = p.sum();
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng) * total;
  double acc = 0.0;
  Index last_positive = 0;
  for (Index i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    acc += p[i];
    last_positive = i;
    if (u < acc) return i;
  }
  return last_positive;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// ---------------------------------------------------------------------------
// Density matrices

bool DensityVerdict::violates(DensityViolation kind) const noexcept {
  for (const auto& v : violations)
    if (v.kind == kind) return true;
  return false;
}

std::string DensityVerdict::describe() const {
  if (violations.empty()) return "valid density matrix";
  std::ostringstream os;
  os << "invalid density matrix:";
  for (const auto& v : violations) {
    switch (v.kind) {
      case DensityViolation::kNonFinite: os << " non-finite entries;"; break;
      case DensityViolation::kNotHermitian: os << " not Hermitian (residual " << v.residual << ");"; break;
      case DensityViolation::kTraceNotOne: os << " trace != 1 (residual " << v.residual << ");"; break;
      case DensityViolation::kNotPsd: os << " not PSD (min eigenvalue " << -v.residual << ");"; break;
    }
  }
  return os.str();
}

DensityVerdict validate_density(const CMatrix& m, const Tolerances& tol) {
  if (m.rows() != m.cols() || m.rows() == 0)
    throw DimensionError("density matrix must be non-empty and square, got " +
                         std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  DensityVerdict verdict;
  if (!m.allFinite()) {
    verdict.violations.push_back({DensityViolation::kNonFinite, 0.0});
    return verdict;
  }
  const double herm = (m - m.adjoint()).norm();
  if (herm > tol.hermitian) verdict.violations.push_back({DensityViolation::kNotHermitian, herm});
  const double tr = std::abs(m.trace() - Complex(1.0, 0.0));
  if (tr > tol.trace) verdict.violations.push_back({DensityViolation::kTraceNotOne, tr});
  const double lmin = min_hermitian_eigenvalue(m);
  if (lmin < -tol.psd) verdict.violations.push_back({DensityViolation::kNotPsd, -lmin});
  return verdict;
}

DensityMatrix::DensityMatrix(CMatrix m, const Tolerances& tol) : m_(std::move(m)) {
  const auto verdict = validate_density(m_, tol);
  if (!verdict.valid()) throw ConstraintError(verdict.describe());
}

DensityMatrix DensityMatrix::trusted(CMatrix m) { return DensityMatrix(std::move(m), TrustedTag{}); }

DensityMatrix DensityMatrix::maximally_mixed(Index n) {
  if (n < 1) throw InvalidArgument("density matrix dimension must be >= 1");
  return trusted(CMatrix::Identity(n, n) / static_cast<double>(n));
}

DensityMatrix DensityMatrix::diagonal(const RVector& p) {
  BeliefVector checked(p);
  return trusted(checked.values().cast<Complex>().asDiagonal());
}

DensityMatrix DensityMatrix::random(Index n, std::uint64_t seed) {
  if (n < 1) throw InvalidArgument("density matrix dimension must be >= 1");
  Rng rng(seed);
  const CMatrix g = complex_gaussian(n, n, rng);
  CMatrix rho = g * g.adjoint();
  rho = hermitian_part(rho);
  rho /= rho.trace().real();
  return trusted(std::move(rho));
}

BeliefVector::BeliefVector(RVector p, double tol) : p_(std::move(p)) {
  if (p_.size() == 0) throw DimensionError("belief vector must be non-empty");
  if (!p_.allFinite() || (p_.array() < 0.0).any())
    throw ConstraintError("belief vector entries must be finite and non-negative");
  if (std::abs(p_.sum() - 1.0) > tol)
    throw ConstraintError("belief vector must sum to 1 (sum = " + std::to_string(p_.sum()) + ")");
}

// ---------------------------------------------------------------------------
// Kraus operators

namespace {

void check_square_family(std::span<const CMatrix> ops) {
  if (ops.empty()) throw DimensionError("Kraus set must contain at least one operator");
  const Index n = ops.front().rows();
  if (n == 0) throw DimensionError("Kraus operators must be non-empty");
  for (const auto& k : ops)
    if (k.rows() != n || k.cols() != n)
      throw DimensionError("Kraus operators must all be " + std::to_string(n) + "x" +
                           std::to_string(n));
}

CMatrix operator_sum(std::span<const CMatrix> ops, const CMatrix& rho) {
  CMatrix out = CMatrix::Zero(rho.rows(), rho.cols());
  for (const auto& k : ops) out.noalias() += k * rho * k.adjoint();
  return out;
}

}  // namespace

double trace_preservation_residual(std::span<const CMatrix> ops) {
  check_square_family(ops);
  const Index n = ops.front().rows();
  CMatrix acc = -CMatrix::Identity(n, n);
  for (const auto& k : ops) acc.noalias() += k.adjoint() * k;
  return acc.norm();
}

KrausSet::KrausSet(std::vector<CMatrix> ops, const Tolerances& tol) : ops_(std::move(ops)) {
  check_square_family(ops_);
  for (const auto& k : ops_)
    if (!k.allFinite()) throw ConstraintError("Kraus operator has non-finite entries");
  const double r = trace_preservation_residual(ops_);
  if (r > tol.trace_preserving)
    throw ConstraintError("Kraus set is not trace preserving (residual " + std::to_string(r) + ")");
}

DensityMatrix apply_channel(const KrausSet& ks, const DensityMatrix& rho) {
  if (ks.dim() != rho.dim())
    throw DimensionError("channel acts on dimension " + std::to_string(ks.dim()) +
                         " but state has dimension " + std::to_string(rho.dim()));
  return DensityMatrix::trusted(hermitian_part(operator_sum(ks.ops(), rho.matrix())));
}

DensityMatrix apply_channel(std::span<const CMatrix> ops, const DensityMatrix& rho,
                            const Tolerances& tol) {
  check_square_family(ops);
  if (ops.front().rows() != rho.dim())
    throw DimensionError("channel acts on dimension " + std::to_string(ops.front().rows()) +
                         " but state has dimension " + std::to_string(rho.dim()));
  const double r = trace_preservation_residual(ops);
  if (r > tol.trace_preserving)
    throw ConstraintError("operator list is not trace preserving (residual " + std::to_string(r) + ")");
  return DensityMatrix::trusted(hermitian_part(operator_sum(ops, rho.matrix())));
}

Conditioned bayes_condition(std::span<const CMatrix> ops, const DensityMatrix& rho) {
  check_square_family(ops);
  if (ops.front().rows() != rho.dim())
    throw DimensionError("observation operators and state differ in dimension");
  CMatrix m = hermitian_part(operator_sum(ops, rho.matrix()));
  const double p = m.trace().real();
  if (!(p >= kMinProbability)) throw ZeroProbabilityError(0, 0, p);
  m /= p;
  return {DensityMatrix::trusted(std::move(m)), p};
}

// ---------------------------------------------------------------------------
// Stiefel stacking

namespace {

void check_partition(const CMatrix& kappa, Index block_dim) {
  if (block_dim < 1) throw PartitionError("block dimension must be >= 1");
  if (kappa.cols() != block_dim)
    throw PartitionError("stacked matrix has " + std::to_string(kappa.cols()) +
                         " columns, expected block dimension " + std::to_string(block_dim));
  if (kappa.rows() == 0 || kappa.rows() % block_dim != 0)
    throw PartitionError("row count " + std::to_string(kappa.rows()) +
                         " is not a positive multiple of block dimension " + std::to_string(block_dim));
}

}  // namespace

StiefelPoint::StiefelPoint(CMatrix kappa, Index block_dim, double tol) : kappa_(std::move(kappa)) {
  check_partition(kappa_, block_dim);
  if (!kappa_.allFinite()) throw ConstraintError("Stiefel point has non-finite entries");
  const double r = stiefel_residual(kappa_);
  if (r > tol)
    throw ConstraintError("columns are not orthonormal (residual " + std::to_string(r) + ")");
}

StiefelPoint StiefelPoint::trusted(CMatrix kappa, Index block_dim) {
  check_partition(kappa, block_dim);
  return StiefelPoint(std::move(kappa), TrustedTag{});
}

CMatrix StiefelPoint::block(Index i) const {
  const Index n = block_dim();
  return kappa_.middleRows(i * n, n);
}

StiefelPoint stack_kraus(const KrausSet& ks) {
  const Index n = ks.dim();
  CMatrix kappa(n * static_cast<Index>(ks.size()), n);
  for (std::size_t i = 0; i < ks.size(); ++i) kappa.middleRows(static_cast<Index>(i) * n, n) = ks[i];
  return StiefelPoint::trusted(std::move(kappa), n);
}

KrausSet unstack_kraus(const StiefelPoint& sp) {
  std::vector<CMatrix> ops;
  ops.reserve(static_cast<std::size_t>(sp.block_count()));
  for (Index i = 0; i < sp.block_count(); ++i) ops.push_back(sp.block(i));
  return KrausSet(std::move(ops));
}

StiefelPoint random_stiefel(Index n, Index count, std::uint64_t seed) {
  if (n < 1 || count < 1) throw InvalidArgument("random_stiefel needs n >= 1 and N >= 1");
  Rng rng(seed);
  const CMatrix g = complex_gaussian(n * count, n, rng);
  Eigen::HouseholderQR<CMatrix> qr(g);
  CMatrix q = qr.householderQ() * CMatrix::Identity(n * count, n);
  const CMatrix& r = qr.matrixQR();
  for (Index j = 0; j < n; ++j) {
    const double mag = std::abs(r(j, j));
    if (mag > 0.0) q.col(j) *= r(j, j) / mag;
  }
  return StiefelPoint::trusted(std::move(q), n);
}

// ---------------------------------------------------------------------------
// Complete positivity

CMatrix choi_matrix(const LinearMap& map, Index n) {
  CMatrix choi = CMatrix::Zero(n * n, n * n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) {
      CMatrix e = CMatrix::Zero(n, n);
      e(i, j) = 1.0;
      const CMatrix image = map(e);
      if (image.rows() != n || image.cols() != n)
        throw DimensionError("linear map must send n x n matrices to n x n matrices");
      choi.block(i * n, j * n, n, n) = image;
    }
  return choi;
}

ChoiReport choi_psd_check(const LinearMap& map, Index n) {
  const double lmin = min_hermitian_eigenvalue(choi_matrix(map, n));
  return {lmin >= kChoiTolerance, lmin};
}

ChoiReport choi_psd_check(const KrausSet& ks) {
  return choi_psd_check([&ks](const CMatrix& x) { return operator_sum(ks.ops(), x); }, ks.dim());
}

}  // namespace hqmm
