#pragma once

// Hidden quantum Markov model: n x n density-matrix state, s symbols, w Kraus
// operators per symbol. Filtering applies the condensed update
//
//   rho_t = sum_w K_{y,w} rho_{t-1} K_{y,w}^H / tr(sum_w K_{y,w} rho_{t-1} K_{y,w}^H).
//
// The Kraus grid is stored and stacked in (y major, w minor) order, which also
// fixes the block layout of the optimizer's Stiefel point and of gradients.

#include "hqmm/hmm.hpp"
#include "hqmm/linalg.hpp"
#include "hqmm/quantum.hpp"
#include "hqmm/sequence.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace hqmm {

class Hqmm {
 public:
  /// `kraus` holds s*w operators in (y, w) order. The flattened set must be
  /// trace preserving within tol.trace_preserving.
  Hqmm(Index n, Index s, Index w, std::vector<CMatrix> kraus, DensityMatrix rho0,
       const Tolerances& tol = {});

  /// Splits an nsw x n Stiefel point into the Kraus grid.
  static Hqmm from_stiefel(const StiefelPoint& kappa, Index s, Index w, DensityMatrix rho0);

  /// K_{y,1} = I / sqrt(s): every symbol equally likely, state never changes.
  static Hqmm iid_uniform(Index n, Index s);

  Index latent_dim() const noexcept { return n_; }
  Index alphabet_size() const noexcept { return s_; }
  Index env_dim() const noexcept { return w_; }
  std::size_t num_operators() const noexcept { return kraus_.size(); }

  const CMatrix& kraus(Index y, Index w) const { return kraus_[static_cast<std::size_t>(y * w_ + w)]; }
  /// The w operators of symbol y.
  std::span<const CMatrix> symbol_ops(Index y) const {
    return std::span<const CMatrix>(kraus_).subspan(static_cast<std::size_t>(y * w_),
                                                    static_cast<std::size_t>(w_));
  }
  std::span<const CMatrix> all_ops() const noexcept { return kraus_; }
  const DensityMatrix& rho0() const noexcept { return rho0_; }

  StiefelPoint stiefel() const;

 private:
  Index n_;
  Index s_;
  Index w_;
  std::vector<CMatrix> kraus_;
  DensityMatrix rho0_;
};

/// Random model: Kraus grid from random_stiefel(n, s*w, seed), rho0 from
/// DensityMatrix::random with a derived seed.
Hqmm random_hqmm(Index n, Index s, Index w, std::uint64_t seed);

struct FilterStep {
  DensityMatrix rho;
  double log_prob;
};

/// One conditioning step. Throws ZeroProbabilityError (step 0) when the
/// observation probability is below kMinProbability.
FilterStep filter_step(const Hqmm& model, const DensityMatrix& rho, Symbol y);

/// p(y | rho) for every symbol.
RVector symbol_distribution(const Hqmm& model, const DensityMatrix& rho);

/// ln P(y_{b+1..l} | state filtered through y_1..y_b), b = burn_in, as a sum
/// of per-step log probabilities. Requires burn_in < l.
double log_likelihood(const Hqmm& model, const ObservationSequence& seq, std::size_t burn_in = 0);

ObservationSequence sample(const Hqmm& model, std::size_t length, std::uint64_t seed);

/// Embeds an HMM as an (n, s, n)-HQMM with (K_{y,w})_{ij} = delta_{jw}
/// sqrt((T_y)_{iw}) and rho0 = diag(prior). The diagonal of every filtered
/// state equals the classical belief, so likelihoods agree with the forward
/// algorithm.
Hqmm encode_hmm(const Hmm& hmm);

namespace detail {

/// Negative log-likelihood of one sequence for a raw (unvalidated) Kraus grid
/// in (y, w) order. Used by the finite-difference oracle, which deliberately
/// evaluates off-manifold parameters.
double sequence_nll(std::span<const CMatrix> kraus, Index w, const CMatrix& rho0,
                    const ObservationSequence& seq, std::size_t burn_in);

}  // namespace detail

}  // namespace hqmm
