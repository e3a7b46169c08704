#pragma once

// Gradient of the mean negative log-likelihood with respect to the conjugated
// Kraus parameters, dL/d(conj kappa), by reverse accumulation through the
// normalized filtering recursion. The finite-difference routine is the
// independent oracle used to check it.
//
// Convention: for real L and complex X, "the gradient" is dL/d(conj X), so
// that dL = 2 Re tr(G^H dX) and the steepest-descent direction is -G.

#include "hqmm/linalg.hpp"
#include "hqmm/model.hpp"
#include "hqmm/sequence.hpp"

#include <functional>
#include <span>
#include <vector>

namespace hqmm {

struct LossGradient {
  double loss = 0.0;  ///< mean over the batch of -log_likelihood
  CMatrix gradient;   ///< nsw x n, blocks in the model's (y, w) order
};

struct GradientOptions {
  /// Per-sequence backward passes are spread over this many threads.
  /// Per-sequence results are reduced in index order, so the output is
  /// bit-identical for any thread count.
  unsigned threads = 1;
};

/// Throws InvalidArgument on an empty batch; ZeroProbabilityError carrying
/// the offending sequence index and step.
LossGradient loss_gradient(const Hqmm& model, std::span<const ObservationSequence> batch,
                           std::size_t burn_in, const GradientOptions& options = {});

/// Same on a raw stacked matrix (no manifold validation). The optimizer calls
/// this on its iterate directly.
LossGradient loss_gradient(const CMatrix& kappa, Index s, Index w, const CMatrix& rho0,
                           std::span<const ObservationSequence> batch, std::size_t burn_in,
                           const GradientOptions& options = {});

using MatrixFunctional = std::function<double(const CMatrix&)>;

/// Central differences on the real and imaginary part of every entry,
/// assembled as dL/d(conj X) = (dL/dRe + i dL/dIm) / 2. Throws InvalidArgument
/// for h <= 0.
CMatrix finite_difference_gradient(const MatrixFunctional& loss, const CMatrix& at, double h);

/// Finite-difference gradient of the mean batch loss. Perturbed parameters
/// are NOT projected back to the manifold.
CMatrix finite_difference_gradient(const Hqmm& model, std::span<const ObservationSequence> batch,
                                   std::size_t burn_in, double h);

struct GradientComparison {
  /// ||analytic - reference||_F / ||reference||_F.
  double relative_error = 0.0;
  /// Per Kraus block: ||block difference||_F / ||reference||_F.
  std::vector<double> block_errors;
};

GradientComparison compare_gradients(const CMatrix& analytic, const CMatrix& reference, Index block_dim);

}  // namespace hqmm
