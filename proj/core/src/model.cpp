#include "hqmm/model.hpp"

#include "hqmm/error.hpp"

#include <cmath>
#include <string>

namespace hqmm {

void ObservationSequence::check_alphabet(std::size_t alphabet_size) const {
  for (std::size_t t = 0; t < symbols_.size(); ++t)
    if (symbols_[t] >= alphabet_size)
      throw InvalidArgument("symbol " + std::to_string(symbols_[t]) + " at position " +
                            std::to_string(t) + " is outside the alphabet of size " +
                            std::to_string(alphabet_size));
}

Hqmm::Hqmm(Index n, Index s, Index w, std::vector<CMatrix> kraus, DensityMatrix rho0,
           const Tolerances& tol)
    : n_(n), s_(s), w_(w), kraus_(std::move(kraus)), rho0_(std::move(rho0)) {
  if (n < 1 || s < 1 || w < 1) throw InvalidArgument("HQMM needs n, s, w >= 1");
  if (static_cast<Index>(kraus_.size()) != s * w)
    throw DimensionError("expected " + std::to_string(s * w) + " Kraus operators, got " +
                         std::to_string(kraus_.size()));
  if (rho0_.dim() != n) throw DimensionError("initial state must be " + std::to_string(n) + "x" + std::to_string(n));
  // Validates shapes, finiteness and trace preservation.
  KrausSet check(kraus_, tol);
  if (check.dim() != n) throw DimensionError("Kraus operators must be " + std::to_string(n) + "x" + std::to_string(n));
}

Hqmm Hqmm::from_stiefel(const StiefelPoint& kappa, Index s, Index w, DensityMatrix rho0) {
  if (kappa.block_count() != s * w)
    throw DimensionError("Stiefel point has " + std::to_string(kappa.block_count()) +
                         " blocks, expected s*w = " + std::to_string(s * w));
  std::vector<CMatrix> ops;
  ops.reserve(static_cast<std::size_t>(s * w));
  for (Index i = 0; i < s * w; ++i) ops.push_back(kappa.block(i));
  return Hqmm(kappa.block_dim(), s, w, std::move(ops), std::move(rho0));
}

Hqmm Hqmm::iid_uniform(Index n, Index s) {
  std::vector<CMatrix> ops(static_cast<std::size_t>(s),
                           CMatrix::Identity(n, n) / std::sqrt(static_cast<double>(s)));
  return Hqmm(n, s, 1, std::move(ops), DensityMatrix::maximally_mixed(n));
}

StiefelPoint Hqmm::stiefel() const {
  CMatrix kappa(n_ * static_cast<Index>(kraus_.size()), n_);
  for (std::size_t i = 0; i < kraus_.size(); ++i) kappa.middleRows(static_cast<Index>(i) * n_, n_) = kraus_[i];
  return StiefelPoint::trusted(std::move(kappa), n_);
}

Hqmm random_hqmm(Index n, Index s, Index w, std::uint64_t seed) {
  return Hqmm::from_stiefel(random_stiefel(n, s * w, seed), s, w,
                            DensityMatrix::random(n, derive_seed(seed, 0)));
}

namespace {

// Unnormalized update sum_w K rho K^H for the operators of one symbol.
CMatrix joint_update(std::span<const CMatrix> ops, const CMatrix& rho) {
  CMatrix out = CMatrix::Zero(rho.rows(), rho.cols());
  CMatrix tmp(rho.rows(), rho.cols());
  for (const auto& k : ops) {
    tmp.noalias() = k * rho;
    out.noalias() += tmp * k.adjoint();
  }
  return out;
}

void check_symbol(const Hqmm& model, Symbol y) {
  if (static_cast<Index>(y) >= model.alphabet_size())
    throw InvalidArgument("symbol " + std::to_string(y) + " is outside the alphabet of size " +
                          std::to_string(model.alphabet_size()));
}

}  // namespace

FilterStep filter_step(const Hqmm& model, const DensityMatrix& rho, Symbol y) {
  check_symbol(model, y);
  if (rho.dim() != model.latent_dim()) throw DimensionError("state dimension does not match model");
  CMatrix m = joint_update(model.symbol_ops(static_cast<Index>(y)), rho.matrix());
  const double p = m.trace().real();
  if (!(p >= kMinProbability)) throw ZeroProbabilityError(0, y, p);
  m = hermitian_part(m) / p;
  return {DensityMatrix::trusted(std::move(m)), std::log(p)};
}

RVector symbol_distribution(const Hqmm& model, const DensityMatrix& rho) {
  RVector p(model.alphabet_size());
  for (Index y = 0; y < model.alphabet_size(); ++y)
    p[y] = joint_update(model.symbol_ops(y), rho.matrix()).trace().real();
  return p;
}

namespace detail {

double sequence_nll(std::span<const CMatrix> kraus, Index w, const CMatrix& rho0,
                    const ObservationSequence& seq, std::size_t burn_in) {
  CMatrix rho = rho0;
  double nll = 0.0;
  for (std::size_t t = 0; t < seq.size(); ++t) {
    const Symbol y = seq[t];
    CMatrix m = joint_update(kraus.subspan(static_cast<std::size_t>(y) * static_cast<std::size_t>(w),
                                           static_cast<std::size_t>(w)),
                             rho);
    const double p = m.trace().real();
    if (!(p >= kMinProbability)) throw ZeroProbabilityError(t, y, p);
    rho = m / p;
    if (t >= burn_in) nll -= std::log(p);
  }
  return nll;
}

}  // namespace detail

double log_likelihood(const Hqmm& model, const ObservationSequence& seq, std::size_t burn_in) {
  seq.check_alphabet(static_cast<std::size_t>(model.alphabet_size()));
  if (!seq.empty() && burn_in >= seq.size())
    throw InvalidArgument("burn-in must be shorter than the sequence");
  return -detail::sequence_nll(model.all_ops(), model.env_dim(), model.rho0().matrix(), seq, burn_in);
}

ObservationSequence sample(const Hqmm& model, std::size_t length, std::uint64_t seed) {
  if (length < 1) throw InvalidArgument("sample length must be >= 1");
  Rng rng(seed);
  std::vector<Symbol> out;
  out.reserve(length);
  const Index s = model.alphabet_size();
  CMatrix rho = model.rho0().matrix();
  std::vector<CMatrix> joint(static_cast<std::size_t>(s));
  RVector p(s);
  for (std::size_t t = 0; t < length; ++t) {
    for (Index y = 0; y < s; ++y) {
      joint[static_cast<std::size_t>(y)] = joint_update(model.symbol_ops(y), rho);
      p[y] = std::max(joint[static_cast<std::size_t>(y)].trace().real(), 0.0);
    }
    const Index y = draw_categorical(p, rng);
    rho = hermitian_part(joint[static_cast<std::size_t>(y)]) / p[y];
    out.push_back(static_cast<Symbol>(y));
  }
  return ObservationSequence(std::move(out));
}

Hqmm encode_hmm(const Hmm& hmm) {
  const Index n = hmm.num_states();
  const Index s = hmm.alphabet_size();
  const auto t_ops = oom_operators(hmm);
  std::vector<CMatrix> kraus;
  kraus.reserve(static_cast<std::size_t>(s * n));
  for (Index y = 0; y < s; ++y)
    for (Index w = 0; w < n; ++w) {
      CMatrix k = CMatrix::Zero(n, n);
      for (Index i = 0; i < n; ++i) k(i, w) = std::sqrt(t_ops[static_cast<std::size_t>(y)](i, w));
      kraus.push_back(std::move(k));
    }
  return Hqmm(n, s, n, std::move(kraus), DensityMatrix::diagonal(hmm.prior()));
}

}  // namespace hqmm
