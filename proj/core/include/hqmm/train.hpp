#pragma once

#include "hqmm/data.hpp"
#include "hqmm/model.hpp"
#include "hqmm/stiefel.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace hqmm {

struct TrainConfig {
  double tau = 0.75;   ///< initial step size
  double alpha = 0.92; ///< step decay per epoch
  double beta = 0.9;   ///< momentum coefficient
  int batches = 1;
  int epochs = 60;
  std::uint64_t seed = 0;
  int restarts = 1;
  /// Draw a fresh rho0 per restart instead of sharing one across restarts.
  bool resample_rho0 = false;
  unsigned threads = 1;

  /// Throws InvalidArgument when a field is outside its range.
  void validate() const;
};

struct OptimizerState {
  StiefelPoint kappa;
  MomentumDirection momentum;
  double tau;
  int epoch = 0;
};

/// Normalized, momentum-mixed step direction; updates state.momentum.
MomentumDirection::Result descent_direction(const CMatrix& raw, OptimizerState& state);

struct HistoryRow {
  int epoch;  ///< 1-based
  int batch;  ///< 1-based
  double loss;
  double tau;
  double grad_norm_raw;
  double stiefel_residual;
  double wall_ms;
};

/// Header plus one line per row: epoch,batch,loss,tau,grad_norm_raw,stiefel_residual,wall_ms
void write_history_csv(std::ostream& out, std::span<const HistoryRow> rows);

struct TrainResult {
  Hqmm model;
  std::vector<HistoryRow> history;  ///< of the selected restart
  double train_loss;                ///< mean per-window loss of `model` on the training set
  std::optional<double> validation_loss;
  int selected_epoch;    ///< epoch whose parameters were returned
  int selected_restart;  ///< 0-based
  bool converged_early;  ///< stopped because the gradient vanished
};

/// Called after each epoch with (restart, epoch, mean batch loss).
using EpochCallback = std::function<void(int, int, double)>;

/// Mean over windows of -log_likelihood (burn-in excluded).
double mean_loss(const Hqmm& model, const WindowedSet& data);

/// Constrained gradient descent from `init`: each epoch shuffles the windows
/// and splits them into config.batches batches (remainder to the last); each
/// batch takes one Cayley step along the momentum direction; tau decays by
/// alpha after every epoch. With a validation set, the parameters of the epoch
/// with the lowest validation loss are returned; otherwise the final ones.
TrainResult train_from(const Hqmm& init, const WindowedSet& train, const WindowedSet* validation,
                       const TrainConfig& config, const EpochCallback& on_epoch = {});

/// Runs config.restarts independent random initializations and keeps the one
/// with the lowest validation loss (training loss without validation).
TrainResult train(const WindowedSet& train, const WindowedSet* validation, Index n, Index s, Index w,
                  const TrainConfig& config, const EpochCallback& on_epoch = {});

}  // namespace hqmm
