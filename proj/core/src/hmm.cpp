#include "hqmm/hmm.hpp"

#include "hqmm/error.hpp"
#include "hqmm/quantum.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace hqmm {

namespace {

constexpr double kStochasticTolerance = 1e-10;

void check_column_stochastic(const RMatrix& m, const char* name) {
  if (!m.allFinite() || (m.array() < 0.0).any())
    throw ConstraintError(std::string(name) + " must have finite non-negative entries");
  for (Index j = 0; j < m.cols(); ++j) {
    const double sum = m.col(j).sum();
    if (std::abs(sum - 1.0) > kStochasticTolerance)
      throw ConstraintError(std::string(name) + " column " + std::to_string(j) + " sums to " +
                            std::to_string(sum));
  }
}

RVector dirichlet(Index size, double concentration, Rng& rng) {
  std::gamma_distribution<double> gamma(concentration, 1.0);
  RVector v(size);
  do {
    for (Index i = 0; i < size; ++i) v[i] = gamma(rng);
  } while (!(v.sum() > 0.0));
  return v / v.sum();
}

RMatrix normalize_columns(RMatrix m) {
  for (Index j = 0; j < m.cols(); ++j) m.col(j) /= m.col(j).sum();
  return m;
}

}  // namespace

Hmm::Hmm(RMatrix transition, RMatrix emission, RVector prior)
    : a_(std::move(transition)), c_(std::move(emission)), prior_(std::move(prior)) {
  const Index n = a_.rows();
  if (n < 1 || a_.cols() != n) throw DimensionError("transition matrix must be square and non-empty");
  if (c_.rows() < 1 || c_.cols() != n)
    throw DimensionError("emission matrix must be s x " + std::to_string(n));
  if (prior_.size() != n) throw DimensionError("prior must have length " + std::to_string(n));
  check_column_stochastic(a_, "transition matrix");
  check_column_stochastic(c_, "emission matrix");
  BeliefVector check(prior_, kStochasticTolerance);
}

Hmm Hmm::uniform(Index n, Index s) {
  return Hmm(RMatrix::Constant(n, n, 1.0 / static_cast<double>(n)),
             RMatrix::Constant(s, n, 1.0 / static_cast<double>(s)),
             RVector::Constant(n, 1.0 / static_cast<double>(n)));
}

Hmm Hmm::random(Index n, Index s, std::uint64_t seed, double concentration) {
  if (n < 1 || s < 1) throw InvalidArgument("HMM needs n >= 1 and s >= 1");
  if (!(concentration > 0.0)) throw InvalidArgument("Dirichlet concentration must be positive");
  Rng rng(seed);
  RMatrix a(n, n), c(s, n);
  for (Index j = 0; j < n; ++j) a.col(j) = dirichlet(n, concentration, rng);
  for (Index j = 0; j < n; ++j) c.col(j) = dirichlet(s, concentration, rng);
  RVector prior = dirichlet(n, concentration, rng);
  return Hmm(std::move(a), std::move(c), std::move(prior));
}

std::vector<RMatrix> oom_operators(const Hmm& hmm) {
  std::vector<RMatrix> ops;
  ops.reserve(static_cast<std::size_t>(hmm.alphabet_size()));
  for (Index y = 0; y < hmm.alphabet_size(); ++y)
    ops.push_back(hmm.emission().row(y).transpose().asDiagonal() * hmm.transition());
  return ops;
}

double forward_log_likelihood(const Hmm& hmm, const ObservationSequence& seq, std::size_t burn_in) {
  seq.check_alphabet(static_cast<std::size_t>(hmm.alphabet_size()));
  if (burn_in >= seq.size() && !seq.empty())
    throw InvalidArgument("burn-in must be shorter than the sequence");
  const RMatrix& a = hmm.transition();
  const RMatrix& c = hmm.emission();
  RVector x = hmm.prior();
  double ll = 0.0;
  for (std::size_t t = 0; t < seq.size(); ++t) {
    const Symbol y = seq[t];
    RVector u = c.row(y).transpose().cwiseProduct(a * x);
    const double p = u.sum();
    if (!(p >= kMinProbability)) throw ZeroProbabilityError(t, y, p);
    x = u / p;
    if (t >= burn_in) ll += std::log(p);
  }
  return ll;
}

ObservationSequence sample_hmm(const Hmm& hmm, std::size_t length, std::uint64_t seed) {
  if (length < 1) throw InvalidArgument("sample length must be >= 1");
  Rng rng(seed);
  std::vector<Symbol> out;
  out.reserve(length);
  Index z = draw_categorical(hmm.prior(), rng);
  for (std::size_t t = 0; t < length; ++t) {
    z = draw_categorical(hmm.transition().col(z), rng);
    out.push_back(static_cast<Symbol>(draw_categorical(hmm.emission().col(z), rng)));
  }
  return ObservationSequence(std::move(out));
}

// ---------------------------------------------------------------------------
// Baum-Welch

namespace {

struct ExpectedCounts {
  RVector prior;
  RMatrix transition;  // (i, j): expected j -> i transitions
  RMatrix emission;    // (y, i): expected emissions of y from state i
  double log_likelihood = 0.0;

  ExpectedCounts(Index n, Index s)
      : prior(RVector::Zero(n)), transition(RMatrix::Zero(n, n)), emission(RMatrix::Zero(s, n)) {}
};

// Scaled forward-backward over one sequence; accumulates posteriors.
void accumulate(const Hmm& hmm, const ObservationSequence& seq, ExpectedCounts& counts) {
  const RMatrix& a = hmm.transition();
  const RMatrix& c = hmm.emission();
  const Index n = hmm.num_states();
  const std::size_t len = seq.size();

  RMatrix alpha(n, static_cast<Index>(len) + 1);
  RVector scale(static_cast<Index>(len) + 1);
  alpha.col(0) = hmm.prior();
  scale[0] = 1.0;
  for (std::size_t t = 1; t <= len; ++t) {
    const Symbol y = seq[t - 1];
    RVector u = c.row(y).transpose().cwiseProduct(a * alpha.col(static_cast<Index>(t) - 1));
    const double p = u.sum();
    if (!(p >= kMinProbability)) throw ZeroProbabilityError(t - 1, y, p);
    alpha.col(static_cast<Index>(t)) = u / p;
    scale[static_cast<Index>(t)] = p;
    counts.log_likelihood += std::log(p);
  }

  RVector beta = RVector::Ones(n);
  for (std::size_t t = len; t >= 1; --t) {
    const Index ti = static_cast<Index>(t);
    const Symbol y = seq[t - 1];
    const RVector gamma = alpha.col(ti).cwiseProduct(beta);
    counts.emission.row(y) += gamma.transpose();
    // weighted(i) = C(y, i) beta_t(i) / c_t
    const RVector weighted = c.row(y).transpose().cwiseProduct(beta) / scale[ti];
    counts.transition.array() +=
        (weighted * alpha.col(ti - 1).transpose()).array() * a.array();
    beta = a.transpose() * weighted;
  }
  counts.prior += alpha.col(0).cwiseProduct(beta);
}

ExpectedCounts e_step(const Hmm& hmm, std::span<const ObservationSequence> data) {
  ExpectedCounts counts(hmm.num_states(), hmm.alphabet_size());
  for (const auto& seq : data) accumulate(hmm, seq, counts);
  return counts;
}

Hmm m_step(ExpectedCounts counts, double smoothing) {
  counts.prior.array() += smoothing;
  counts.transition.array() += smoothing;
  counts.emission.array() += smoothing;
  RVector prior = counts.prior / counts.prior.sum();
  return Hmm(normalize_columns(std::move(counts.transition)), normalize_columns(std::move(counts.emission)),
             std::move(prior));
}

double total_log_likelihood(const Hmm& hmm, std::span<const ObservationSequence> data) {
  double ll = 0.0;
  for (const auto& seq : data) ll += forward_log_likelihood(hmm, seq);
  return ll;
}

void check_data(std::span<const ObservationSequence> data, Index s) {
  if (data.empty()) throw InvalidArgument("Baum-Welch needs at least one sequence");
  for (const auto& seq : data) seq.check_alphabet(static_cast<std::size_t>(s));
}

}  // namespace

BaumWelchResult baum_welch_refine(const Hmm& init, std::span<const ObservationSequence> data,
                                  const BaumWelchConfig& config) {
  check_data(data, init.alphabet_size());
  if (config.max_iterations < 0) throw InvalidArgument("max_iterations must be >= 0");
  BaumWelchResult result{init, {}, 0, 0.0};
  auto counts = e_step(result.model, data);
  result.log_likelihood_trace.push_back(counts.log_likelihood);
  for (int it = 0; it < config.max_iterations; ++it) {
    Hmm next = m_step(std::move(counts), config.smoothing);
    counts = e_step(next, data);
    const double previous = result.log_likelihood_trace.back();
    result.model = std::move(next);
    result.log_likelihood_trace.push_back(counts.log_likelihood);
    result.iterations = it + 1;
    const double gain = counts.log_likelihood - previous;
    if (gain < config.relative_tolerance * std::abs(previous)) break;
  }
  return result;
}

BaumWelchResult baum_welch_fit(std::span<const ObservationSequence> data, Index n, Index s,
                               const BaumWelchConfig& config,
                               std::span<const ObservationSequence> validation) {
  if (n < 1 || s < 1) throw InvalidArgument("Baum-Welch needs n >= 1 and s >= 1");
  check_data(data, s);
  const int restarts = std::max(config.restarts, 1);
  std::optional<BaumWelchResult> best;
  double best_score = -std::numeric_limits<double>::infinity();
  for (int r = 0; r < restarts; ++r) {
    const Hmm init = Hmm::random(n, s, derive_seed(config.seed, static_cast<std::uint64_t>(r)));
    BaumWelchResult run = baum_welch_refine(init, data, config);
    double score = run.log_likelihood_trace.back();
    if (!validation.empty()) {
      try {
        score = total_log_likelihood(run.model, validation);
      } catch (const ZeroProbabilityError&) {
        score = -std::numeric_limits<double>::infinity();
      }
      run.validation_log_likelihood = score;
    }
    if (!best || score > best_score) {
      best_score = score;
      best = std::move(run);
    }
  }
  return std::move(*best);
}

}  // namespace hqmm
