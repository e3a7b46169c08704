#include "hqmm/train.hpp"

#include "hqmm/error.hpp"
#include "hqmm/gradient.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>

namespace hqmm {

void TrainConfig::validate() const {
  if (!(tau > 0.0)) throw InvalidArgument("tau must be positive");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw InvalidArgument("alpha must lie in (0, 1]");
  if (!(beta >= 0.0 && beta < 1.0)) throw InvalidArgument("beta must lie in [0, 1)");
  if (batches < 1) throw InvalidArgument("batch count must be >= 1");
  if (epochs < 1) throw InvalidArgument("epoch count must be >= 1");
  if (restarts < 1) throw InvalidArgument("restart count must be >= 1");
}

MomentumDirection::Result descent_direction(const CMatrix& raw, OptimizerState& state) {
  return state.momentum.next(raw);
}

void write_history_csv(std::ostream& out, std::span<const HistoryRow> rows) {
  const auto old_precision = out.precision(17);
  out << "epoch,batch,loss,tau,grad_norm_raw,stiefel_residual,wall_ms\n";
  for (const auto& r : rows)
    out << r.epoch << ',' << r.batch << ',' << r.loss << ',' << r.tau << ',' << r.grad_norm_raw << ','
        << r.stiefel_residual << ',' << r.wall_ms << '\n';
  out.precision(old_precision);
}

double mean_loss(const Hqmm& model, const WindowedSet& data) {
  if (data.windows.empty()) throw InvalidArgument("cannot evaluate a loss on an empty set");
  double total = 0.0;
  for (const auto& seq : data.windows) total -= log_likelihood(model, seq, data.burn_in);
  return total / static_cast<double>(data.windows.size());
}

namespace {

double safe_mean_loss(const Hqmm& model, const WindowedSet& data) {
  try {
    return mean_loss(model, data);
  } catch (const ZeroProbabilityError&) {
    return std::numeric_limits<double>::infinity();
  }
}

void check_windows(const WindowedSet& data, Index s, const char* what) {
  if (data.windows.empty()) throw InvalidArgument(std::string(what) + " set has no windows");
  for (const auto& seq : data.windows) {
    seq.check_alphabet(static_cast<std::size_t>(s));
    if (seq.size() <= data.burn_in) throw InvalidArgument(std::string(what) + " window shorter than burn-in + 1");
  }
}

}  // namespace

TrainResult train_from(const Hqmm& init, const WindowedSet& train_set, const WindowedSet* validation,
                       const TrainConfig& config, const EpochCallback& on_epoch) {
  config.validate();
  const Index s = init.alphabet_size();
  const Index w = init.env_dim();
  check_windows(train_set, s, "training");
  if (validation) check_windows(*validation, s, "validation");
  const std::size_t num_windows = train_set.windows.size();
  const std::size_t num_batches = static_cast<std::size_t>(config.batches);
  if (num_batches > num_windows)
    throw InvalidArgument("batch count " + std::to_string(num_batches) + " exceeds the number of training windows " +
                          std::to_string(num_windows));

  const CMatrix rho0 = init.rho0().matrix();
  OptimizerState state{init.stiefel(), MomentumDirection(config.beta), config.tau, 0};
  Rng shuffle_rng(derive_seed(config.seed, 0x5eed));
  std::vector<std::size_t> order(num_windows);
  std::iota(order.begin(), order.end(), std::size_t{0});
  GradientOptions grad_options{config.threads};

  const auto start = std::chrono::steady_clock::now();
  std::vector<HistoryRow> history;
  std::optional<StiefelPoint> best_point;
  double best_validation = std::numeric_limits<double>::infinity();
  int best_epoch = 0;
  bool converged = false;
  std::vector<ObservationSequence> batch;

  for (int epoch = 1; epoch <= config.epochs && !converged; ++epoch) {
    state.epoch = epoch;
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    const std::size_t base = num_windows / num_batches;
    double epoch_loss = 0.0;
    for (std::size_t b = 0; b < num_batches; ++b) {
      const std::size_t begin = b * base;
      const std::size_t end = (b + 1 == num_batches) ? num_windows : begin + base;
      batch.clear();
      for (std::size_t i = begin; i < end; ++i) batch.push_back(train_set.windows[order[i]]);

      LossGradient lg;
      try {
        lg = loss_gradient(state.kappa.matrix(), s, w, rho0, batch, train_set.burn_in, grad_options);
      } catch (const ZeroProbabilityError& e) {
        throw e.with_context("epoch " + std::to_string(epoch) + ", batch " + std::to_string(b + 1));
      } catch (const NumericalError& e) {
        throw NumericalError("epoch " + std::to_string(epoch) + ", batch " + std::to_string(b + 1) + ": " + e.what());
      }
      const double raw_norm = lg.gradient.norm();
      const auto dir = descent_direction(lg.gradient, state);
      if (dir.converged) {
        converged = true;
      } else {
        state.kappa = cayley_retract_smw(state.kappa, dir.direction, state.tau);
      }
      const double elapsed =
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
      history.push_back({epoch, static_cast<int>(b + 1), lg.loss, state.tau, raw_norm, state.kappa.residual(), elapsed});
      epoch_loss += lg.loss * static_cast<double>(end - begin);
      if (converged) break;
    }
    epoch_loss /= static_cast<double>(num_windows);
    if (on_epoch) on_epoch(0, epoch, epoch_loss);

    if (validation) {
      const Hqmm candidate = Hqmm::from_stiefel(state.kappa, s, w, init.rho0());
      const double v = safe_mean_loss(candidate, *validation);
      if (!best_point || v < best_validation) {
        best_validation = v;
        best_point = state.kappa;
        best_epoch = epoch;
      }
    }
    state.tau *= config.alpha;
  }

  const StiefelPoint& chosen = best_point ? *best_point : state.kappa;
  Hqmm model = Hqmm::from_stiefel(chosen, s, w, init.rho0());
  const double train_loss = safe_mean_loss(model, train_set);
  std::optional<double> val;
  if (validation) val = best_validation;
  const int selected_epoch = best_point ? best_epoch : state.epoch;
  return TrainResult{std::move(model), std::move(history), train_loss, val, selected_epoch, 0, converged};
}

TrainResult train(const WindowedSet& train_set, const WindowedSet* validation, Index n, Index s, Index w,
                  const TrainConfig& config, const EpochCallback& on_epoch) {
  config.validate();
  std::optional<TrainResult> best;
  for (int r = 0; r < config.restarts; ++r) {
    const auto ru = static_cast<std::uint64_t>(r);
    const std::uint64_t init_seed = derive_seed(config.seed, 3 * ru + 1);
    const std::uint64_t rho_seed = derive_seed(config.seed, config.resample_rho0 ? 3 * ru + 2 : 2);
    TrainConfig run_config = config;
    run_config.seed = derive_seed(config.seed, 3 * ru + 3);
    const Hqmm init = Hqmm::from_stiefel(random_stiefel(n, s * w, init_seed), s, w, DensityMatrix::random(n, rho_seed));
    EpochCallback forward;
    if (on_epoch) forward = [&on_epoch, r](int, int epoch, double loss) { on_epoch(r, epoch, loss); };
    TrainResult run = train_from(init, train_set, validation, run_config, forward);
    run.selected_restart = r;
    const double score = run.validation_loss ? *run.validation_loss : run.train_loss;
    const double best_score = best ? (best->validation_loss ? *best->validation_loss : best->train_loss)
                                   : std::numeric_limits<double>::infinity();
    if (!best || score < best_score) best = std::move(run);
  }
  return std::move(*best);
}

}  // namespace hqmm
