#include "hqmm/gradient.hpp"

#include "hqmm/error.hpp"
#include "hqmm/quantum.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <thread>

namespace hqmm {

namespace {

struct SequenceResult {
  double nll = 0.0;
  CMatrix grad;  // zero-initialized, accumulated in place
};

// Forward pass stores rho_0..rho_l and p_1..p_l; the backward pass carries
// the adjoint of rho_t and, per step,
//   Mbar = rhobar / p - (Re tr(rhobar^H rho_t) / p + [t > burn_in] / (2p)) I
//   Kbar_{y,w} += 2 Mbar K rho_{t-1}
//   rhobar_{t-1} = sum_w K^H Mbar K.
void sequence_backward(const CMatrix& kappa, Index n, Index w, const CMatrix& rho0,
                       const ObservationSequence& seq, std::size_t burn_in, double weight,
                       SequenceResult& out) {
  const std::size_t len = seq.size();
  std::vector<CMatrix> rho(len + 1);
  std::vector<double> prob(len + 1, 1.0);
  rho[0] = rho0;
  CMatrix m(n, n), tmp(n, n);
  for (std::size_t t = 0; t < len; ++t) {
    const Index base = static_cast<Index>(seq[t]) * w;
    m.setZero();
    for (Index k = 0; k < w; ++k) {
      const auto op = kappa.middleRows((base + k) * n, n);
      tmp.noalias() = op * rho[t];
      m.noalias() += tmp * op.adjoint();
    }
    const double p = m.trace().real();
    if (!(p >= kMinProbability)) throw ZeroProbabilityError(t, seq[t], p);
    rho[t + 1] = m / p;
    prob[t + 1] = p;
    if (t >= burn_in) out.nll -= std::log(p);
  }

  CMatrix rho_bar = CMatrix::Zero(n, n);
  CMatrix m_bar(n, n), next_bar(n, n);
  for (std::size_t t = len; t >= 1; --t) {
    const double p = prob[t];
    double c = (rho_bar.adjoint() * rho[t]).trace().real() / p;
    if (t - 1 >= burn_in) c += 0.5 / p;
    m_bar = rho_bar / p;
    m_bar.diagonal().array() -= c;

    const Index base = static_cast<Index>(seq[t - 1]) * w;
    next_bar.setZero();
    for (Index k = 0; k < w; ++k) {
      const Index row = (base + k) * n;
      const auto op = kappa.middleRows(row, n);
      tmp.noalias() = m_bar * op;
      out.grad.middleRows(row, n).noalias() += (2.0 * weight) * (tmp * rho[t - 1]);
      next_bar.noalias() += op.adjoint() * tmp;
    }
    rho_bar = next_bar;
  }
  out.nll *= weight;
}

void check_batch(std::span<const ObservationSequence> batch, Index s, std::size_t burn_in) {
  if (batch.empty()) throw InvalidArgument("gradient batch must not be empty");
  for (const auto& seq : batch) {
    seq.check_alphabet(static_cast<std::size_t>(s));
    if (burn_in >= seq.size()) throw InvalidArgument("burn-in must be shorter than every sequence");
  }
}

}  // namespace

LossGradient loss_gradient(const CMatrix& kappa, Index s, Index w, const CMatrix& rho0,
                           std::span<const ObservationSequence> batch, std::size_t burn_in,
                           const GradientOptions& options) {
  const Index n = kappa.cols();
  if (kappa.rows() != n * s * w) throw DimensionError("stacked Kraus matrix must be nsw x n");
  if (rho0.rows() != n || rho0.cols() != n) throw DimensionError("initial state must be n x n");
  check_batch(batch, s, burn_in);

  const double weight = 1.0 / static_cast<double>(batch.size());
  std::vector<SequenceResult> results(batch.size());
  auto run_range = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      results[i].grad = CMatrix::Zero(kappa.rows(), n);
      try {
        sequence_backward(kappa, n, w, rho0, batch[i], burn_in, weight, results[i]);
      } catch (const ZeroProbabilityError& e) {
        throw e.with_sequence(i);
      }
    }
  };

  const std::size_t threads = std::clamp<std::size_t>(options.threads, 1, batch.size());
  if (threads == 1) {
    run_range(0, batch.size());
  } else {
    std::vector<std::exception_ptr> errors(threads);
    {
      std::vector<std::jthread> pool;
      const std::size_t chunk = (batch.size() + threads - 1) / threads;
      for (std::size_t k = 0; k < threads; ++k) {
        const std::size_t begin = k * chunk;
        const std::size_t end = std::min(batch.size(), begin + chunk);
        pool.emplace_back([&, k, begin, end] {
          try {
            run_range(begin, end);
          } catch (...) {
            errors[k] = std::current_exception();
          }
        });
      }
    }
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  LossGradient out{0.0, CMatrix::Zero(kappa.rows(), n)};
  for (const auto& r : results) {
    out.loss += r.nll;
    out.gradient += r.grad;
  }
  if (!std::isfinite(out.loss) || !out.gradient.allFinite())
    throw NumericalError("non-finite loss or gradient");
  return out;
}

LossGradient loss_gradient(const Hqmm& model, std::span<const ObservationSequence> batch,
                           std::size_t burn_in, const GradientOptions& options) {
  return loss_gradient(model.stiefel().matrix(), model.alphabet_size(), model.env_dim(),
                       model.rho0().matrix(), batch, burn_in, options);
}

CMatrix finite_difference_gradient(const MatrixFunctional& loss, const CMatrix& at, double h) {
  if (!(h > 0.0)) throw InvalidArgument("finite-difference step must be positive");
  CMatrix grad(at.rows(), at.cols());
  CMatrix x = at;
  for (Index j = 0; j < at.cols(); ++j)
    for (Index i = 0; i < at.rows(); ++i) {
      const Complex orig = at(i, j);
      x(i, j) = orig + Complex(h, 0.0);
      const double re_plus = loss(x);
      x(i, j) = orig - Complex(h, 0.0);
      const double re_minus = loss(x);
      x(i, j) = orig + Complex(0.0, h);
      const double im_plus = loss(x);
      x(i, j) = orig - Complex(0.0, h);
      const double im_minus = loss(x);
      x(i, j) = orig;
      const double d_re = (re_plus - re_minus) / (2.0 * h);
      const double d_im = (im_plus - im_minus) / (2.0 * h);
      grad(i, j) = 0.5 * Complex(d_re, d_im);
    }
  return grad;
}

CMatrix finite_difference_gradient(const Hqmm& model, std::span<const ObservationSequence> batch,
                                   std::size_t burn_in, double h) {
  check_batch(batch, model.alphabet_size(), burn_in);
  const Index n = model.latent_dim();
  const Index w = model.env_dim();
  const CMatrix rho0 = model.rho0().matrix();
  auto loss = [&](const CMatrix& kappa) {
    std::vector<CMatrix> ops;
    ops.reserve(model.num_operators());
    for (std::size_t i = 0; i < model.num_operators(); ++i)
      ops.push_back(kappa.middleRows(static_cast<Index>(i) * n, n));
    double total = 0.0;
    for (const auto& seq : batch) total += detail::sequence_nll(ops, w, rho0, seq, burn_in);
    return total / static_cast<double>(batch.size());
  };
  return finite_difference_gradient(loss, model.stiefel().matrix(), h);
}

GradientComparison compare_gradients(const CMatrix& analytic, const CMatrix& reference, Index block_dim) {
  if (analytic.rows() != reference.rows() || analytic.cols() != reference.cols())
    throw DimensionError("gradients to compare differ in shape");
  if (block_dim < 1 || reference.rows() % block_dim != 0)
    throw PartitionError("gradient rows are not a multiple of the block dimension");
  const double scale = std::max(reference.norm(), std::numeric_limits<double>::min());
  GradientComparison out;
  out.relative_error = (analytic - reference).norm() / scale;
  for (Index b = 0; b < reference.rows() / block_dim; ++b)
    out.block_errors.push_back(
        (analytic.middleRows(b * block_dim, block_dim) - reference.middleRows(b * block_dim, block_dim)).norm() /
        scale);
  return out;
}

}  // namespace hqmm
