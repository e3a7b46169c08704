#pragma once

#include "hqmm/any_model.hpp"
#include "hqmm/sequence.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace hqmm {

using Label = std::uint32_t;

struct LabeledSequenceSet {
  std::vector<ObservationSequence> sequences;
  /// Empty, or one label per sequence.
  std::vector<Label> labels;
  /// Character for each symbol (alphabet[i] <-> symbol i); empty for purely
  /// numeric alphabets.
  std::string alphabet;
  /// Optional display names, label_names[k] for label k.
  std::vector<std::string> label_names;

  bool has_labels() const noexcept { return !labels.empty(); }
  /// Throws ConstraintError when labels are present but misaligned.
  void validate() const;
  /// counts[k] = number of sequences with label k (empty when unlabeled).
  std::vector<std::size_t> class_counts() const;
  std::size_t num_classes() const;
  /// 1 + the largest symbol, or alphabet.size() when that is larger.
  std::size_t alphabet_size() const;

  LabeledSequenceSet subset(std::span<const std::size_t> indices) const;
  std::vector<ObservationSequence> sequences_with_label(Label label) const;
};

/// Non-overlapping windows that share one burn-in length.
struct WindowedSet {
  std::vector<ObservationSequence> windows;
  std::size_t burn_in = 0;
  /// Symbols kept in windows (remainders that were dropped are excluded).
  std::size_t retained_symbols = 0;
  /// Symbols that contribute likelihood terms (retained minus burn-in).
  std::size_t scored_symbols = 0;
};

/// Cuts every sequence into consecutive windows of window_length. A final
/// shorter remainder is kept when it has at least burn_in + 1 symbols.
/// Throws InvalidArgument when window_length <= burn_in.
WindowedSet window_sequences(std::span<const ObservationSequence> seqs, std::size_t window_length,
                             std::size_t burn_in);

/// Treats every sequence as its own window (no cutting). Sequences not longer
/// than burn_in are dropped.
WindowedSet as_windowed(std::span<const ObservationSequence> seqs, std::size_t burn_in);

// ---------------------------------------------------------------------------
// Splice-junction data (UCI molecular biology, 60-base DNA windows)

enum class AmbiguityPolicy {
  kDropRecord,       ///< discard records containing D, N, S or R
  kStripCharacters,  ///< remove the ambiguous bases, keep the shorter record
};

/// Accepts either the UCI layout ("EI, NAME, SEQUENCE") or the
/// one-base-per-field layout ("A, G, ..., EI"). Labels EI -> 0, IE -> 1,
/// N -> 2; bases A -> 0, C -> 1, G -> 2, T -> 3. Throws ParseError with the
/// 1-based line number on malformed records or unknown characters.
LabeledSequenceSet parse_splice(std::istream& in, AmbiguityPolicy policy = AmbiguityPolicy::kDropRecord);
LabeledSequenceSet load_splice(const std::filesystem::path& path,
                               AmbiguityPolicy policy = AmbiguityPolicy::kDropRecord);

// ---------------------------------------------------------------------------
// Synthetic data

enum class GeneratorKind { kHmm, kHqmm };

struct SyntheticData {
  AnyModel generator;
  LabeledSequenceSet data;
};

struct SyntheticSpec {
  GeneratorKind kind = GeneratorKind::kHqmm;
  Index n = 2;
  Index s = 6;
  Index w = 1;  ///< ignored for HMMs
  std::size_t num_sequences = 20;
  std::size_t length = 3000;
  std::uint64_t seed = 0;
  /// Dirichlet concentration of the random HMM's columns.
  double concentration = 1.0;
};

/// Seeded random ground truth and sequences drawn from it. The generator uses
/// `seed`; sequence i uses derive_seed(seed, i + 1).
SyntheticData gen_synthetic(const SyntheticSpec& spec);

/// More sequences from an existing generator (e.g. a held-out split), with
/// sequence i drawn from derive_seed(seed, i + 1).
std::vector<ObservationSequence> draw_sequences(const AnyModel& generator, std::size_t count,
                                                std::size_t length, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Dataset files: newline-delimited JSON records {"label"?: k, "symbols": [...]}
// plus a sidecar "<file>.meta.json" object (alphabet, s, generator seed, ...).

struct Dataset {
  LabeledSequenceSet set;
  nlohmann::json metadata = nlohmann::json::object();
};

std::filesystem::path metadata_path(const std::filesystem::path& dataset);

void write_dataset(const std::filesystem::path& path, const LabeledSequenceSet& set,
                   const nlohmann::json& metadata = nlohmann::json::object());

/// Reads the records and, when present, the sidecar. Throws ParseError.
Dataset read_dataset(const std::filesystem::path& path);

}  // namespace hqmm
