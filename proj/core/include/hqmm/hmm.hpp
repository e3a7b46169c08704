#pragma once

// Classical hidden Markov model baseline.
//
// Convention: the prior x_0 describes the hidden state *before* the first
// transition, so P(y_1) = 1^T diag(C_(y_1,:)) A x_0, matching the observable
// operator form x_t = T_y x_{t-1} / 1^T T_y x_{t-1} with T_y = diag(C_(y,:)) A.

#include "hqmm/linalg.hpp"
#include "hqmm/sequence.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace hqmm {

class Hmm {
 public:
  /// transition: n x n column-stochastic; emission: s x n column-stochastic;
  /// prior: length-n probability vector. Throws DimensionError /
  /// ConstraintError (tolerance 1e-10 on column sums).
  Hmm(RMatrix transition, RMatrix emission, RVector prior);

  static Hmm uniform(Index n, Index s);
  /// Columns drawn from a symmetric Dirichlet(concentration) via normalized
  /// Gamma variates; prior likewise.
  static Hmm random(Index n, Index s, std::uint64_t seed, double concentration = 1.0);

  Index num_states() const noexcept { return a_.rows(); }
  Index alphabet_size() const noexcept { return c_.rows(); }
  const RMatrix& transition() const noexcept { return a_; }
  const RMatrix& emission() const noexcept { return c_; }
  const RVector& prior() const noexcept { return prior_; }

 private:
  RMatrix a_;
  RMatrix c_;
  RVector prior_;
};

/// T_y = diag(C_(y,:)) A for every symbol y.
std::vector<RMatrix> oom_operators(const Hmm& hmm);

/// Sum over t > burn_in of ln 1^T T_{y_t} x_{t-1}, with x normalized each
/// step. The first burn_in symbols only condition the belief. Throws
/// ZeroProbabilityError on an impossible step.
double forward_log_likelihood(const Hmm& hmm, const ObservationSequence& seq, std::size_t burn_in = 0);

ObservationSequence sample_hmm(const Hmm& hmm, std::size_t length, std::uint64_t seed);

struct BaumWelchConfig {
  int max_iterations = 200;
  double relative_tolerance = 1e-6;
  double smoothing = 1e-9;  ///< added to every expected count before renormalizing
  int restarts = 5;
  std::uint64_t seed = 0;
};

struct BaumWelchResult {
  Hmm model;
  /// Total training log-likelihood of the model entering each iteration,
  /// followed by that of the returned model.
  std::vector<double> log_likelihood_trace;
  int iterations = 0;
  double validation_log_likelihood = 0.0;
};

/// Runs EM from a given model until max_iterations or the relative
/// improvement drops below the tolerance.
BaumWelchResult baum_welch_refine(const Hmm& init, std::span<const ObservationSequence> data,
                                  const BaumWelchConfig& config = {});

/// EM from `config.restarts` random initializations; keeps the model with the
/// best validation log-likelihood (training log-likelihood when no validation
/// set is given). Throws InvalidArgument on empty data.
BaumWelchResult baum_welch_fit(std::span<const ObservationSequence> data, Index n, Index s,
                               const BaumWelchConfig& config = {},
                               std::span<const ObservationSequence> validation = {});

}  // namespace hqmm
