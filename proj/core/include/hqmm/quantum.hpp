#pragma once

// Quantum belief states and channels: density matrices, Kraus operator sets,
// their Stiefel stacking, and the operator-sum / conditioning updates.

#include "hqmm/linalg.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace hqmm {

/// Acceptance tolerances for externally supplied objects. Internally
/// constructed objects are expected to meet ~1e-12.
struct Tolerances {
  double hermitian = 1e-8;
  double trace = 1e-8;
  double psd = 1e-8;
  double trace_preserving = 1e-8;
  double stiefel = 1e-8;
};

/// Observation probabilities below this are treated as exact zeros.
inline constexpr double kMinProbability = 1e-300;

/// Complete positivity is accepted when the Choi matrix's smallest eigenvalue
/// is at least this.
inline constexpr double kChoiTolerance = -1e-10;

// ---------------------------------------------------------------------------
// Density matrices

enum class DensityViolation { kNonFinite, kNotHermitian, kTraceNotOne, kNotPsd };

struct Violation {
  DensityViolation kind;
  double residual;  ///< ||m - m^H||_F, |tr m - 1|, or -min eigenvalue
};

struct DensityVerdict {
  std::vector<Violation> violations;

  bool valid() const noexcept { return violations.empty(); }
  bool violates(DensityViolation kind) const noexcept;
  std::string describe() const;
};

/// Checks Hermiticity, unit trace and positive semi-definiteness. Reports all
/// violations with their residuals. Throws DimensionError for non-square input.
DensityVerdict validate_density(const CMatrix& m, const Tolerances& tol = {});

/// Hermitian, PSD, trace-one n x n matrix.
class DensityMatrix {
 public:
  /// Validates `m`; throws ConstraintError listing the violations.
  explicit DensityMatrix(CMatrix m, const Tolerances& tol = {});

  /// For matrices produced by exact-form updates (no validation).
  static DensityMatrix trusted(CMatrix m);

  static DensityMatrix maximally_mixed(Index n);
  /// diag(p); p must be a probability vector.
  static DensityMatrix diagonal(const RVector& p);
  /// G G^H / tr(G G^H) for a complex Gaussian G: a random full-rank state.
  static DensityMatrix random(Index n, std::uint64_t seed);

  Index dim() const noexcept { return m_.rows(); }
  const CMatrix& matrix() const noexcept { return m_; }

 private:
  struct TrustedTag {};
  DensityMatrix(CMatrix m, TrustedTag) : m_(std::move(m)) {}

  CMatrix m_;
};

/// Length-n probability vector.
class BeliefVector {
 public:
  explicit BeliefVector(RVector p, double tol = 1e-8);

  Index dim() const noexcept { return p_.size(); }
  const RVector& values() const noexcept { return p_; }

 private:
  RVector p_;
};

// ---------------------------------------------------------------------------
// Kraus operators

/// ||sum_i K_i^H K_i - I||_F. All operators must be square with equal size.
double trace_preservation_residual(std::span<const CMatrix> ops);

/// Ordered, trace-preserving set of square Kraus operators of equal size.
class KrausSet {
 public:
  /// Throws DimensionError on shape problems, ConstraintError on non-finite
  /// entries or when the TP residual exceeds tol.trace_preserving.
  explicit KrausSet(std::vector<CMatrix> ops, const Tolerances& tol = {});

  Index dim() const noexcept { return ops_.front().rows(); }
  std::size_t size() const noexcept { return ops_.size(); }
  const CMatrix& operator[](std::size_t i) const { return ops_[i]; }
  std::span<const CMatrix> ops() const noexcept { return ops_; }
  double tp_residual() const { return trace_preservation_residual(ops_); }

 private:
  std::vector<CMatrix> ops_;
};

/// sum_w K_w rho K_w^H for a validated channel.
DensityMatrix apply_channel(const KrausSet& ks, const DensityMatrix& rho);

/// Same for a raw operator list; throws ConstraintError when the list is not
/// trace preserving within tol.trace_preserving.
DensityMatrix apply_channel(std::span<const CMatrix> ops, const DensityMatrix& rho,
                            const Tolerances& tol = {});

struct Conditioned {
  DensityMatrix posterior;
  double probability;
};

/// Conditions rho on an observation whose (possibly several) Kraus operators
/// are `ops`: returns (sum K rho K^H) / p with p its trace. Throws
/// ZeroProbabilityError when p < kMinProbability.
Conditioned bayes_condition(std::span<const CMatrix> ops, const DensityMatrix& rho);

// ---------------------------------------------------------------------------
// Stiefel stacking

/// nN x n complex matrix with orthonormal columns, partitioned into N blocks.
class StiefelPoint {
 public:
  /// Throws PartitionError when rows are not a multiple of block_dim (or the
  /// column count differs from block_dim), ConstraintError when
  /// ||X^H X - I||_F > tol.
  StiefelPoint(CMatrix kappa, Index block_dim, double tol = 1e-8);

  /// No feasibility check (shape is still checked).
  static StiefelPoint trusted(CMatrix kappa, Index block_dim);

  const CMatrix& matrix() const noexcept { return kappa_; }
  Index block_dim() const noexcept { return kappa_.cols(); }
  Index block_count() const noexcept { return kappa_.rows() / kappa_.cols(); }
  CMatrix block(Index i) const;
  double residual() const { return stiefel_residual(kappa_); }

 private:
  struct TrustedTag {};
  StiefelPoint(CMatrix kappa, TrustedTag) : kappa_(std::move(kappa)) {}

  CMatrix kappa_;
};

StiefelPoint stack_kraus(const KrausSet& ks);
KrausSet unstack_kraus(const StiefelPoint& sp);

/// Complex Gaussian nN x n matrix orthonormalized by Householder QR, with
/// column phases fixed so that R has a positive real diagonal.
StiefelPoint random_stiefel(Index n, Index count, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Complete positivity

using LinearMap = std::function<CMatrix(const CMatrix&)>;

struct ChoiReport {
  bool completely_positive;
  double min_eigenvalue;
};

/// n^2 x n^2 Choi matrix sum_{ij} E_ij (x) map(E_ij).
CMatrix choi_matrix(const LinearMap& map, Index n);

ChoiReport choi_psd_check(const LinearMap& map, Index n);
ChoiReport choi_psd_check(const KrausSet& ks);

}  // namespace hqmm
