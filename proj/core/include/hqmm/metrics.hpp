#pragma once

#include "hqmm/any_model.hpp"
#include "hqmm/data.hpp"
#include "hqmm/sequence.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace hqmm {

/// Maps [-inf, 1] onto (-1, 1]: identity on [0, 1], tanh(x / 8) below 0,
/// never lower than the double just above -1.
/// Throws DomainError for x > 1 (beyond a 1e-12 rounding allowance) or NaN.
double squash_f(double x);

/// Description accuracy f(1 + log_s P / l) of a natural-log likelihood over
/// `scored_length` scored symbols. Requires s >= 2 and scored_length >= 1.
double da_score(double log_likelihood, Index s, std::size_t scored_length);

struct DaSummary {
  std::vector<double> per_sequence;
  double mean = 0.0;
  /// Sample standard deviation (n - 1 denominator); 0 for a single sequence.
  double stddev = 0.0;
};

DaSummary summarize_da(std::vector<double> scores);

/// DA of every sequence under `model`, scored after burn_in symbols.
DaSummary evaluate_da(const AnyModel& model, std::span<const ObservationSequence> seqs, std::size_t burn_in);

/// Label whose model assigns the highest log-likelihood; ties go to the
/// lowest label. Throws InvalidArgument when `models` is empty or the models
/// disagree on the alphabet size.
Label classify(std::span<const AnyModel> models, const ObservationSequence& seq, std::size_t burn_in = 0);

/// Fraction of positions where predictions equal truths.
double accuracy(std::span<const Label> predictions, std::span<const Label> truths);

/// Mean over the classes present in `truths` of the per-class recall.
/// A constant predictor scores 1 / (number of classes).
double balanced_accuracy(std::span<const Label> predictions, std::span<const Label> truths);

struct Fold {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Stratified k-fold split: each class is shuffled with `seed` and dealt
/// round-robin into the folds. Index lists are sorted. Throws InvalidArgument
/// for k < 2 or a class with fewer than k items.
std::vector<Fold> kfold_splits(std::span<const Label> labels, std::size_t k, std::uint64_t seed);

}  // namespace hqmm
