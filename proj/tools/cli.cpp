#include "cli.hpp"

#include "hqmm/data.hpp"
#include "hqmm/error.hpp"
#include "hqmm/gradient.hpp"
#include "hqmm/hmm.hpp"
#include "hqmm/metrics.hpp"
#include "hqmm/model_io.hpp"
#include "hqmm/train.hpp"

#if __has_include(<CLI/CLI.hpp>)
#include <CLI/CLI.hpp>
#else
#include <CLI11.hpp>
#endif

#include <algorithm>
#include <climits>
#include <cmath>
#include <fstream>
#include <future>
#include <iomanip>
#include <numeric>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace hqmm::cli {

using nlohmann::json;

namespace {

/// Bad flags or unusable input files; maps to kUsageError.
struct UsageError : Error {
  using Error::Error;
};

struct DataFlags {
  std::string data;
  std::string splice;
  std::string ambiguity = "drop";
  std::optional<int> label;
  std::optional<Index> s;
};

void add_data_flags(CLI::App* cmd, DataFlags& f) {
  cmd->add_option("--data", f.data, "Dataset file (newline-delimited JSON records)");
  cmd->add_option("--splice", f.splice, "Splice-junction file, used instead of --data");
  cmd->add_option("--ambiguity", f.ambiguity, "Splice records with ambiguous bases: drop or strip")
      ->check(CLI::IsMember({"drop", "strip"}));
}

struct LoadedData {
  LabeledSequenceSet set;
  Index s;
};

LoadedData load_data(const DataFlags& f) {
  if (f.data.empty() == f.splice.empty()) throw UsageError("exactly one of --data and --splice is required");
  LoadedData out;
  std::optional<Index> meta_s;
  if (!f.splice.empty()) {
    if (!std::filesystem::exists(f.splice)) throw UsageError("splice file not found: " + f.splice);
    out.set = load_splice(f.splice, f.ambiguity == "strip" ? AmbiguityPolicy::kStripCharacters
                                                           : AmbiguityPolicy::kDropRecord);
    meta_s = 4;
  } else {
    if (!std::filesystem::exists(f.data)) throw UsageError("dataset not found: " + f.data);
    Dataset d = read_dataset(f.data);
    if (d.metadata.contains("s") && d.metadata["s"].is_number_unsigned()) meta_s = d.metadata["s"].get<Index>();
    out.set = std::move(d.set);
  }
  if (out.set.sequences.empty()) throw UsageError("dataset has no sequences");
  const auto observed = static_cast<Index>(out.set.alphabet_size());
  out.s = f.s.value_or(std::max(meta_s.value_or(0), observed));
  if (out.s < observed) throw UsageError("--s is smaller than the largest symbol in the data");
  if (f.label) {
    if (!out.set.has_labels()) throw UsageError("--label given but the dataset is unlabeled");
    LabeledSequenceSet only;
    only.alphabet = out.set.alphabet;
    only.label_names = out.set.label_names;
    only.sequences = out.set.sequences_with_label(static_cast<Label>(*f.label));
    only.labels.assign(only.sequences.size(), static_cast<Label>(*f.label));
    if (only.sequences.empty()) throw UsageError("no sequences carry label " + std::to_string(*f.label));
    out.set = std::move(only);
  }
  return out;
}

ModelFile load_model_flag(const std::string& path) {
  if (!std::filesystem::exists(path)) throw UsageError("model file not found: " + path);
  return load_model(path);
}

// ---------------------------------------------------------------------------
// Shared training flags

struct TrainFlags {
  std::string kind = "hqmm";
  Index n = 2;
  Index w = 1;
  TrainConfig config;
  std::size_t window = 300;
  std::size_t burn_in = 100;
  double val_split = 0.0;
  int em_iterations = 200;
};

struct ManifoldOptions {
  std::vector<CLI::Option*> options;
};

ManifoldOptions add_train_flags(CLI::App* cmd, TrainFlags& f) {
  ManifoldOptions m;
  cmd->add_option("--kind", f.kind, "Model family: hqmm or hmm")->check(CLI::IsMember({"hqmm", "hmm"}));
  cmd->add_option("--n", f.n, "Latent dimension")->check(CLI::PositiveNumber);
  m.options.push_back(cmd->add_option("--w", f.w, "Kraus operators per symbol")->check(CLI::PositiveNumber));
  m.options.push_back(cmd->add_option("--tau", f.config.tau, "Initial step size"));
  m.options.push_back(cmd->add_option("--alpha", f.config.alpha, "Step decay per epoch"));
  m.options.push_back(cmd->add_option("--beta", f.config.beta, "Momentum coefficient"));
  m.options.push_back(cmd->add_option("--batches", f.config.batches, "Batches per epoch"));
  m.options.push_back(cmd->add_option("--epochs", f.config.epochs, "Epochs"));
  cmd->add_option("--restarts", f.config.restarts, "Random initializations; best validation loss wins");
  cmd->add_option("--threads", f.config.threads, "Threads for per-sequence gradient work");
  cmd->add_option("--seed", f.config.seed, "Run seed");
  cmd->add_option("--em-iterations", f.em_iterations, "Baum-Welch iteration cap (hmm only)");
  return m;
}

std::uint64_t split_seed(std::uint64_t seed) { return derive_seed(seed, 0x7a1); }

/// Seeded hold-out of round(fraction * size) windows, at least one when the
/// fraction is positive.
std::pair<WindowedSet, WindowedSet> split_windows(const WindowedSet& all, double fraction, std::uint64_t seed) {
  WindowedSet train = all, validation;
  validation.burn_in = all.burn_in;
  if (fraction <= 0.0) return {train, validation};
  std::vector<std::size_t> order(all.windows.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(split_seed(seed));
  std::shuffle(order.begin(), order.end(), rng);
  std::size_t held = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(order.size())));
  held = std::max<std::size_t>(held, 1);
  if (held >= order.size()) throw UsageError("--val-split leaves no training windows");
  train = WindowedSet{};
  train.burn_in = all.burn_in;
  auto add = [](WindowedSet& set, const ObservationSequence& seq) {
    set.windows.push_back(seq);
    set.retained_symbols += seq.size();
    set.scored_symbols += seq.size() - set.burn_in;
  };
  for (std::size_t i = 0; i < order.size(); ++i) add(i < held ? validation : train, all.windows[order[i]]);
  return {train, validation};
}

json config_json(const TrainFlags& f, Index s) {
  json c = {{"kind", f.kind}, {"n", f.n}, {"s", s}, {"seed", f.config.seed}, {"burn_in", f.burn_in},
            {"window", f.window}, {"val_split", f.val_split}};
  if (f.kind == "hqmm") {
    c["w"] = f.w;
    c["tau"] = f.config.tau;
    c["alpha"] = f.config.alpha;
    c["beta"] = f.config.beta;
    c["batches"] = f.config.batches;
    c["epochs"] = f.config.epochs;
    c["restarts"] = f.config.restarts;
  } else {
    c["em_iterations"] = f.em_iterations;
    c["restarts"] = f.config.restarts;
  }
  return c;
}

double mean_nll(const AnyModel& model, const WindowedSet& set) {
  double total = 0.0;
  for (const auto& seq : set.windows) total -= log_likelihood(model, seq, set.burn_in);
  return total / static_cast<double>(set.windows.size());
}

struct Fitted {
  AnyModel model;
  double train_loss;
  std::optional<double> validation_loss;
  json details;
};

Fitted fit(const TrainFlags& f, Index s, const WindowedSet& train_set, const WindowedSet* validation,
           std::ostream* history_out) {
  if (f.kind == "hqmm") {
    TrainResult r = train(train_set, validation, f.n, s, f.w, f.config);
    if (history_out) write_history_csv(*history_out, r.history);
    json d = {{"selected_epoch", r.selected_epoch}, {"selected_restart", r.selected_restart},
              {"converged_early", r.converged_early}};
    return {AnyModel(std::move(r.model)), r.train_loss, r.validation_loss, std::move(d)};
  }
  BaumWelchConfig bw;
  bw.max_iterations = f.em_iterations;
  bw.restarts = f.config.restarts;
  bw.seed = f.config.seed;
  std::span<const ObservationSequence> val_span;
  if (validation) val_span = validation->windows;
  BaumWelchResult r = baum_welch_fit(train_set.windows, f.n, s, bw, val_span);
  if (history_out) {
    *history_out << "iteration,log_likelihood\n" << std::setprecision(17);
    for (std::size_t i = 0; i < r.log_likelihood_trace.size(); ++i)
      *history_out << i << ',' << r.log_likelihood_trace[i] << '\n';
  }
  AnyModel model(r.model);
  const double tl = mean_nll(model, train_set);
  std::optional<double> vl;
  if (validation) vl = mean_nll(model, *validation);
  return {std::move(model), tl, vl, json{{"iterations", r.iterations}}};
}

double mean_da(const AnyModel& model, const WindowedSet& set) {
  return evaluate_da(model, set.windows, set.burn_in).mean;
}

// ---------------------------------------------------------------------------
// Commands

struct TrainCmd {
  DataFlags data;
  TrainFlags train;
  ManifoldOptions manifold;
  std::string out;
  std::string history;
};

int cmd_train(const TrainCmd& c, std::ostream& out, std::ostream& err) {
  const LoadedData d = load_data(c.data);
  const TrainFlags& f = c.train;
  if (f.val_split < 0.0 || f.val_split >= 1.0) throw UsageError("--val-split must lie in [0, 1)");
  if (f.kind == "hmm") {
    for (const auto* o : c.manifold.options)
      if (o->count() > 0) err << "warning: " << o->get_name() << " is ignored for --kind hmm\n";
  } else {
    f.config.validate();
  }
  const WindowedSet all = window_sequences(d.set.sequences, f.window, f.burn_in);
  if (all.windows.empty()) throw UsageError("no window is longer than the burn-in");
  auto [train_set, validation] = split_windows(all, f.val_split, f.config.seed);
  const WindowedSet* val_ptr = validation.windows.empty() ? nullptr : &validation;

  const std::string history_path = c.history.empty() ? c.out + ".history.csv" : c.history;
  std::ofstream history(history_path);
  if (!history) throw UsageError("cannot write history file " + history_path);
  Fitted fitted = fit(f, d.s, train_set, val_ptr, &history);

  json meta = {{"config", config_json(f, d.s)}, {"train_loss", fitted.train_loss}, {"training", fitted.details}};
  if (fitted.validation_loss) meta["validation_loss"] = *fitted.validation_loss;
  save_model(c.out, fitted.model, meta);

  out << std::setprecision(10);
  out << "train loss " << fitted.train_loss << '\n';
  out << "train DA " << mean_da(fitted.model, train_set) << '\n';
  if (val_ptr) {
    out << "validation loss " << *fitted.validation_loss << '\n';
    out << "validation DA " << mean_da(fitted.model, validation) << '\n';
  }
  out << "model written to " << c.out << '\n';
  return kSuccess;
}

struct EvalCmd {
  std::string model;
  DataFlags data;
  std::size_t burn_in = 0;
  std::string csv;
};

int cmd_eval(const EvalCmd& c, std::ostream& out) {
  const ModelFile mf = load_model_flag(c.model);
  DataFlags df = c.data;
  df.s = alphabet_size(mf.model);
  const LoadedData d = load_data(df);
  for (const auto& seq : d.set.sequences) {
    seq.check_alphabet(static_cast<std::size_t>(d.s));
    if (seq.size() <= c.burn_in) throw UsageError("a sequence is not longer than --burn-in");
  }
  std::vector<double> lls;
  for (const auto& seq : d.set.sequences) lls.push_back(log_likelihood(mf.model, seq, c.burn_in));
  std::vector<double> scores;
  for (std::size_t i = 0; i < lls.size(); ++i)
    scores.push_back(da_score(lls[i], d.s, d.set.sequences[i].size() - c.burn_in));
  const DaSummary summary = summarize_da(scores);
  if (!c.csv.empty()) {
    std::ofstream csv(c.csv);
    if (!csv) throw UsageError("cannot write " + c.csv);
    csv << std::setprecision(17) << "index,log_likelihood,scored_symbols,da\n";
    for (std::size_t i = 0; i < lls.size(); ++i)
      csv << i << ',' << lls[i] << ',' << d.set.sequences[i].size() - c.burn_in << ',' << scores[i] << '\n';
  }
  out << std::setprecision(10) << "sequences " << scores.size() << "\nmean DA " << summary.mean << "\nstd DA "
      << summary.stddev << '\n';
  return kSuccess;
}

struct ClassifyCmd {
  std::vector<std::string> models;
  DataFlags data;
  std::size_t folds = 0;
  std::size_t burn_in = 0;
  unsigned jobs = 1;
  std::string csv;
  TrainFlags train;
};

struct FoldResult {
  double accuracy;
  double balanced;
};

FoldResult run_fold(const ClassifyCmd& c, const LoadedData& d, const Fold& fold, std::size_t fold_index) {
  const std::size_t k = d.set.num_classes();
  const LabeledSequenceSet train_part = d.set.subset(fold.train);
  std::vector<AnyModel> models;
  for (std::size_t label = 0; label < k; ++label) {
    const auto seqs = train_part.sequences_with_label(static_cast<Label>(label));
    const WindowedSet ws = as_windowed(seqs, c.burn_in);
    if (ws.windows.empty()) throw UsageError("label " + std::to_string(label) + " has no usable training sequences");
    TrainFlags f = c.train;
    f.config.seed = derive_seed(derive_seed(c.train.config.seed, fold_index), label);
    models.push_back(fit(f, d.s, ws, nullptr, nullptr).model);
  }
  std::vector<Label> preds, truths;
  for (std::size_t i : fold.test) {
    preds.push_back(classify(models, d.set.sequences[i], c.burn_in));
    truths.push_back(d.set.labels[i]);
  }
  return {accuracy(preds, truths), balanced_accuracy(preds, truths)};
}

int cmd_classify(const ClassifyCmd& c, std::ostream& out) {
  const bool train_mode = c.folds > 0;
  if (train_mode == !c.models.empty()) throw UsageError("give either --models or --folds");
  std::vector<ModelFile> files;
  DataFlags df = c.data;
  for (const auto& p : c.models) files.push_back(load_model_flag(p));
  if (!files.empty()) df.s = alphabet_size(files.front().model);
  const LoadedData d = load_data(df);
  if (!d.set.has_labels()) throw UsageError("classification needs a labeled dataset");
  const std::size_t k = d.set.num_classes();
  out << std::setprecision(6) << std::fixed;

  if (!train_mode) {
    if (files.size() != k)
      throw UsageError("got " + std::to_string(files.size()) + " models for " + std::to_string(k) + " labels");
    std::vector<AnyModel> models;
    for (auto& f : files) models.push_back(f.model);
    std::vector<Label> preds;
    for (const auto& seq : d.set.sequences) {
      if (seq.size() <= c.burn_in) throw UsageError("a sequence is not longer than --burn-in");
      preds.push_back(classify(models, seq, c.burn_in));
    }
    out << "accuracy " << accuracy(preds, d.set.labels) << "\nbalanced accuracy "
        << balanced_accuracy(preds, d.set.labels) << '\n';
    return kSuccess;
  }

  if (c.folds < 2) throw UsageError("--folds must be at least 2");
  if (c.train.kind == "hqmm") c.train.config.validate();
  const std::vector<Fold> folds = kfold_splits(d.set.labels, c.folds, c.train.config.seed);
  std::vector<FoldResult> results(folds.size());
  const std::size_t jobs = std::max<std::size_t>(1, c.jobs);
  for (std::size_t start = 0; start < folds.size(); start += jobs) {
    std::vector<std::future<FoldResult>> pending;
    const std::size_t stop = std::min(folds.size(), start + jobs);
    for (std::size_t i = start; i < stop; ++i)
      pending.push_back(std::async(jobs == 1 ? std::launch::deferred : std::launch::async,
                                   [&, i] { return run_fold(c, d, folds[i], i); }));
    for (std::size_t i = start; i < stop; ++i) results[i] = pending[i - start].get();
  }
  double acc = 0.0, bal = 0.0;
  for (std::size_t i = 0; i < results.size(); ++i) {
    out << "fold " << i + 1 << " accuracy " << results[i].accuracy << " balanced " << results[i].balanced << '\n';
    acc += results[i].accuracy;
    bal += results[i].balanced;
  }
  acc /= static_cast<double>(results.size());
  bal /= static_cast<double>(results.size());
  out << "mean accuracy " << acc << "\nmean balanced accuracy " << bal << '\n';
  if (!c.csv.empty()) {
    std::ofstream csv(c.csv);
    if (!csv) throw UsageError("cannot write " + c.csv);
    csv << std::setprecision(17) << "fold,accuracy,balanced_accuracy\n";
    for (std::size_t i = 0; i < results.size(); ++i)
      csv << i + 1 << ',' << results[i].accuracy << ',' << results[i].balanced << '\n';
  }
  return kSuccess;
}

struct GradcheckCmd {
  Index n = 3, s = 3, w = 2;
  std::size_t len = 8;
  int trials = 25;
  double h = 1e-5;
  double tolerance = 1e-5;
  std::uint64_t seed = 0;
  bool sabotage = false;
};

int cmd_gradcheck(const GradcheckCmd& c, std::ostream& out) {
  if (!(c.h > 0.0)) throw UsageError("--h must be positive");
  double worst = 0.0;
  for (int t = 0; t < c.trials; ++t) {
    const std::uint64_t seed = derive_seed(c.seed, static_cast<std::uint64_t>(t));
    const Hqmm model = random_hqmm(c.n, c.s, c.w, seed);
    const std::vector<ObservationSequence> batch{sample(model, c.len, derive_seed(seed, 1))};
    CMatrix analytic = loss_gradient(model, batch, 0).gradient;
    if (c.sabotage) analytic(0, 0) += Complex(1e-3 + 0.1 * std::abs(analytic(0, 0)), 0.0);
    const CMatrix reference = finite_difference_gradient(model, batch, 0, c.h);
    const double e = compare_gradients(analytic, reference, c.n).relative_error;
    worst = std::max(worst, e);
  }
  const bool pass = worst < c.tolerance;
  out << std::setprecision(3) << std::scientific << "trials " << c.trials << "\nmax relative error " << worst
      << "\ntolerance " << c.tolerance << '\n'
      << (pass ? "PASS" : "FAIL") << '\n';
  return pass ? kSuccess : kRuntimeFailure;
}

struct SampleCmd {
  std::string model;
  std::size_t num = 10;
  std::size_t len = 300;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_sample(const SampleCmd& c, std::ostream& out) {
  const ModelFile mf = load_model_flag(c.model);
  LabeledSequenceSet set;
  set.sequences = draw_sequences(mf.model, c.num, c.len, c.seed);
  json meta = {{"seed", c.seed}, {"model", c.model}, {"kind", std::string(kind_name(mf.model))}};
  // Keep the declared alphabet even when a short sample misses the top symbols.
  write_dataset(c.out, set, meta);
  Dataset written = read_dataset(c.out);
  written.metadata["s"] = alphabet_size(mf.model);
  std::ofstream(metadata_path(c.out)) << written.metadata.dump(2) << '\n';
  out << "wrote " << c.num << " sequences of length " << c.len << " to " << c.out << '\n';
  return kSuccess;
}

struct GenerateCmd {
  SyntheticSpec spec;
  std::string kind = "hqmm";
  std::string out;
  std::string model_out;
};

int cmd_generate(GenerateCmd c, std::ostream& out) {
  c.spec.kind = c.kind == "hmm" ? GeneratorKind::kHmm : GeneratorKind::kHqmm;
  if (!(c.spec.concentration > 0.0)) throw UsageError("--concentration must be positive");
  const SyntheticData syn = gen_synthetic(c.spec);
  json meta = {{"generator_seed", c.spec.seed}, {"kind", c.kind}, {"n", c.spec.n}, {"w", c.spec.w}};
  if (!c.model_out.empty()) meta["model"] = c.model_out;
  write_dataset(c.out, syn.data, meta);
  Dataset written = read_dataset(c.out);
  written.metadata["s"] = c.spec.s;
  std::ofstream(metadata_path(c.out)) << written.metadata.dump(2) << '\n';
  if (!c.model_out.empty()) save_model(c.model_out, syn.generator, json{{"generator_seed", c.spec.seed}});
  out << "wrote " << c.spec.num_sequences << " sequences to " << c.out << '\n';
  return kSuccess;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Learn, evaluate and sample hidden quantum Markov models", "hqmm"};
  app.require_subcommand(1);

  TrainCmd train_c;
  auto* train_cmd = app.add_subcommand("train", "Fit a model and write it with its training history");
  add_data_flags(train_cmd, train_c.data);
  train_cmd->add_option("--label", train_c.data.label, "Train only on sequences with this label");
  train_cmd->add_option("--s", train_c.data.s, "Alphabet size (default: from the dataset)");
  train_c.manifold = add_train_flags(train_cmd, train_c.train);
  train_cmd->add_option("--window", train_c.train.window, "Window length");
  train_cmd->add_option("--burn-in", train_c.train.burn_in, "Burn-in per window");
  train_cmd->add_option("--val-split", train_c.train.val_split, "Fraction of windows held out for validation");
  train_cmd->add_option("--out", train_c.out, "Model file to write")->required();
  train_cmd->add_option("--history", train_c.history, "History CSV (default: <out>.history.csv)");

  EvalCmd eval_c;
  auto* eval_cmd = app.add_subcommand("eval", "Per-sequence DA of a model on a dataset");
  eval_cmd->add_option("--model", eval_c.model, "Model file")->required();
  add_data_flags(eval_cmd, eval_c.data);
  eval_cmd->add_option("--burn-in", eval_c.burn_in, "Symbols that only condition the state");
  eval_cmd->add_option("--csv", eval_c.csv, "Per-sequence report");

  ClassifyCmd cls_c;
  cls_c.train.n = 4;
  cls_c.train.config.batches = 20;
  auto* cls_cmd = app.add_subcommand("classify", "Maximum-likelihood classification with one model per label");
  cls_cmd->add_option("--models", cls_c.models, "One model file per label, in label order")->delimiter(',');
  add_data_flags(cls_cmd, cls_c.data);
  cls_cmd->add_option("--folds", cls_c.folds, "Train per-label models with stratified k-fold cross validation");
  cls_cmd->add_option("--burn-in", cls_c.burn_in, "Symbols that only condition the state");
  cls_cmd->add_option("--jobs", cls_c.jobs, "Folds trained concurrently");
  cls_cmd->add_option("--csv", cls_c.csv, "Per-fold report");
  add_train_flags(cls_cmd, cls_c.train);

  GradcheckCmd gc;
  auto* gc_cmd = app.add_subcommand("gradcheck", "Compare the analytic gradient with finite differences");
  gc_cmd->set_help_flag("--help", "Print this help message and exit");
  gc_cmd->add_option("--n", gc.n)->check(CLI::PositiveNumber);
  gc_cmd->add_option("--s", gc.s)->check(CLI::PositiveNumber);
  gc_cmd->add_option("--w", gc.w)->check(CLI::PositiveNumber);
  gc_cmd->add_option("--len", gc.len)->check(CLI::PositiveNumber);
  gc_cmd->add_option("--trials", gc.trials)->check(CLI::Range(1, INT_MAX));
  gc_cmd->add_option("--h", gc.h, "Finite-difference step");
  gc_cmd->add_option("--tolerance", gc.tolerance, "Largest accepted relative error");
  gc_cmd->add_option("--seed", gc.seed);
  gc_cmd->add_flag("--sabotage", gc.sabotage, "Perturb the analytic gradient (negative control)")->group("");

  SampleCmd sc;
  auto* sample_cmd = app.add_subcommand("sample", "Draw sequences from a model file");
  sample_cmd->add_option("--model", sc.model)->required();
  sample_cmd->add_option("--num", sc.num)->check(CLI::PositiveNumber);
  sample_cmd->add_option("--len", sc.len)->check(CLI::PositiveNumber);
  sample_cmd->add_option("--seed", sc.seed);
  sample_cmd->add_option("--out", sc.out)->required();

  GenerateCmd gen;
  auto* gen_cmd = app.add_subcommand("generate", "Seeded random ground-truth model and data drawn from it");
  gen_cmd->add_option("--kind", gen.kind)->check(CLI::IsMember({"hqmm", "hmm"}));
  gen_cmd->add_option("--n", gen.spec.n)->check(CLI::PositiveNumber);
  gen_cmd->add_option("--s", gen.spec.s)->check(CLI::PositiveNumber);
  gen_cmd->add_option("--w", gen.spec.w)->check(CLI::PositiveNumber);
  gen_cmd->add_option("--num", gen.spec.num_sequences)->check(CLI::PositiveNumber);
  gen_cmd->add_option("--len", gen.spec.length)->check(CLI::PositiveNumber);
  gen_cmd->add_option("--seed", gen.spec.seed);
  gen_cmd->add_option("--concentration", gen.spec.concentration, "Dirichlet concentration (hmm only)");
  gen_cmd->add_option("--out", gen.out)->required();
  gen_cmd->add_option("--model-out", gen.model_out, "Also write the generator model");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kUsageError;
  }

  try {
    if (*train_cmd) return cmd_train(train_c, out, err);
    if (*eval_cmd) return cmd_eval(eval_c, out);
    if (*cls_cmd) return cmd_classify(cls_c, out);
    if (*gc_cmd) return cmd_gradcheck(gc, out);
    if (*sample_cmd) return cmd_sample(sc, out);
    if (*gen_cmd) return cmd_generate(gen, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const DimensionError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const ConstraintError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kRuntimeFailure;
  }
  return kUsageError;
}

}  // namespace hqmm::cli
