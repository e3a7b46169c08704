#include "hqmm/metrics.hpp"

#include "hqmm/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

namespace hqmm {

double squash_f(double x) {
  if (std::isnan(x) || x > 1.0 + 1e-12) throw DomainError("squash_f is defined for x <= 1");
  if (x >= 0.0) return std::min(x, 1.0);
  // tanh rounds to -1 far out; keep the result inside the open range
  return std::max(std::tanh(0.125 * x), std::nextafter(-1.0, 0.0));
}

double da_score(double log_likelihood, Index s, std::size_t scored_length) {
  if (s < 2) throw InvalidArgument("DA needs an alphabet of at least 2 symbols");
  if (scored_length < 1) throw InvalidArgument("DA needs at least one scored symbol");
  return squash_f(1.0 + log_likelihood / (static_cast<double>(scored_length) * std::log(static_cast<double>(s))));
}

DaSummary summarize_da(std::vector<double> scores) {
  DaSummary out;
  out.per_sequence = std::move(scores);
  const auto& v = out.per_sequence;
  if (v.empty()) throw InvalidArgument("no scores to summarize");
  out.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0.0;
    for (double d : v) ss += (d - out.mean) * (d - out.mean);
    out.stddev = std::sqrt(ss / static_cast<double>(v.size() - 1));
  }
  return out;
}

DaSummary evaluate_da(const AnyModel& model, std::span<const ObservationSequence> seqs, std::size_t burn_in) {
  const Index s = alphabet_size(model);
  std::vector<double> scores;
  scores.reserve(seqs.size());
  for (const auto& seq : seqs) {
    if (seq.size() <= burn_in) throw InvalidArgument("sequence not longer than burn-in");
    scores.push_back(da_score(log_likelihood(model, seq, burn_in), s, seq.size() - burn_in));
  }
  return summarize_da(std::move(scores));
}

Label classify(std::span<const AnyModel> models, const ObservationSequence& seq, std::size_t burn_in) {
  if (models.empty()) throw InvalidArgument("classification needs at least one model");
  const Index s = alphabet_size(models.front());
  for (const auto& m : models)
    if (alphabet_size(m) != s) throw InvalidArgument("class models disagree on the alphabet size");
  Label best = 0;
  double best_ll = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < models.size(); ++k) {
    double ll;
    try {
      ll = log_likelihood(models[k], seq, burn_in);
    } catch (const ZeroProbabilityError&) {
      ll = -std::numeric_limits<double>::infinity();
    }
    if (ll > best_ll) {
      best_ll = ll;
      best = static_cast<Label>(k);
    }
  }
  return best;
}

double accuracy(std::span<const Label> predictions, std::span<const Label> truths) {
  if (predictions.size() != truths.size()) throw DimensionError("prediction and truth counts differ");
  if (predictions.empty()) throw InvalidArgument("accuracy of an empty set");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i) hits += predictions[i] == truths[i];
  return static_cast<double>(hits) / static_cast<double>(predictions.size());
}

double balanced_accuracy(std::span<const Label> predictions, std::span<const Label> truths) {
  if (predictions.size() != truths.size()) throw DimensionError("prediction and truth counts differ");
  if (predictions.empty()) throw InvalidArgument("accuracy of an empty set");
  std::map<Label, std::pair<std::size_t, std::size_t>> per_class;  // hits, total
  for (std::size_t i = 0; i < truths.size(); ++i) {
    auto& [hits, total] = per_class[truths[i]];
    hits += predictions[i] == truths[i];
    ++total;
  }
  double sum = 0.0;
  for (const auto& [label, c] : per_class) sum += static_cast<double>(c.first) / static_cast<double>(c.second);
  return sum / static_cast<double>(per_class.size());
}

std::vector<Fold> kfold_splits(std::span<const Label> labels, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw InvalidArgument("k-fold needs k >= 2");
  std::map<Label, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);
  std::vector<std::vector<std::size_t>> tests(k);
  std::size_t offset = 0;
  for (auto& [label, members] : by_class) {
    if (members.size() < k)
      throw InvalidArgument("class " + std::to_string(label) + " has fewer than " + std::to_string(k) + " items");
    Rng rng(derive_seed(seed, label));
    std::shuffle(members.begin(), members.end(), rng);
    // Continue the deal where the previous class stopped so fold sizes stay balanced.
    for (std::size_t j = 0; j < members.size(); ++j) tests[(offset + j) % k].push_back(members[j]);
    offset = (offset + members.size()) % k;
  }
  std::vector<Fold> folds(k);
  for (std::size_t f = 0; f < k; ++f) {
    std::sort(tests[f].begin(), tests[f].end());
    folds[f].test = tests[f];
    for (std::size_t g = 0; g < k; ++g)
      if (g != f) folds[f].train.insert(folds[f].train.end(), tests[g].begin(), tests[g].end());
    std::sort(folds[f].train.begin(), folds[f].train.end());
  }
  return folds;
}

}  // namespace hqmm
