#include "hqmm/data.hpp"

#include "hqmm/error.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace hqmm {

using nlohmann::json;

void LabeledSequenceSet::validate() const {
  if (!labels.empty() && labels.size() != sequences.size())
    throw ConstraintError("label count " + std::to_string(labels.size()) + " does not match sequence count " +
                          std::to_string(sequences.size()));
}

std::size_t LabeledSequenceSet::num_classes() const {
  std::size_t k = label_names.size();
  for (Label l : labels) k = std::max<std::size_t>(k, l + 1);
  return k;
}

std::vector<std::size_t> LabeledSequenceSet::class_counts() const {
  std::vector<std::size_t> counts(labels.empty() ? 0 : num_classes(), 0);
  for (Label l : labels) ++counts[l];
  return counts;
}

std::size_t LabeledSequenceSet::alphabet_size() const {
  std::size_t s = alphabet.size();
  for (const auto& seq : sequences)
    for (Symbol y : seq) s = std::max<std::size_t>(s, y + 1);
  return s;
}

LabeledSequenceSet LabeledSequenceSet::subset(std::span<const std::size_t> indices) const {
  LabeledSequenceSet out;
  out.alphabet = alphabet;
  out.label_names = label_names;
  for (std::size_t i : indices) {
    out.sequences.push_back(sequences.at(i));
    if (has_labels()) out.labels.push_back(labels.at(i));
  }
  return out;
}

std::vector<ObservationSequence> LabeledSequenceSet::sequences_with_label(Label label) const {
  std::vector<ObservationSequence> out;
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] == label) out.push_back(sequences[i]);
  return out;
}

// ---------------------------------------------------------------------------
// Windowing

WindowedSet window_sequences(std::span<const ObservationSequence> seqs, std::size_t window_length,
                             std::size_t burn_in) {
  if (window_length <= burn_in)
    throw InvalidArgument("window length (" + std::to_string(window_length) + ") must exceed burn-in (" +
                          std::to_string(burn_in) + ")");
  WindowedSet out;
  out.burn_in = burn_in;
  for (const auto& seq : seqs) {
    const auto symbols = seq.symbols();
    for (std::size_t start = 0; start < symbols.size(); start += window_length) {
      const std::size_t len = std::min(window_length, symbols.size() - start);
      if (len < burn_in + 1) break;
      out.windows.emplace_back(std::vector<Symbol>(symbols.begin() + static_cast<std::ptrdiff_t>(start),
                                                   symbols.begin() + static_cast<std::ptrdiff_t>(start + len)));
      out.retained_symbols += len;
      out.scored_symbols += len - burn_in;
    }
  }
  return out;
}

WindowedSet as_windowed(std::span<const ObservationSequence> seqs, std::size_t burn_in) {
  WindowedSet out;
  out.burn_in = burn_in;
  for (const auto& seq : seqs) {
    if (seq.size() <= burn_in) continue;
    out.windows.push_back(seq);
    out.retained_symbols += seq.size();
    out.scored_symbols += seq.size() - burn_in;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Splice

namespace {

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

Label parse_splice_label(const std::string& field, std::size_t line) {
  if (field == "EI") return 0;
  if (field == "IE") return 1;
  if (field == "N") return 2;
  throw ParseError("unknown splice label '" + field + "'", line);
}

constexpr std::string_view kBases = "ACGT";
constexpr std::string_view kAmbiguous = "DNSR";

}  // namespace

LabeledSequenceSet parse_splice(std::istream& in, AmbiguityPolicy policy) {
  LabeledSequenceSet out;
  out.alphabet = std::string(kBases);
  out.label_names = {"EI", "IE", "N"};
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty() || line.front() == '@' || line.front() == '%') continue;
    const auto fields = split_fields(line);

    Label label = 0;
    std::string bases;
    if (fields.size() == 3) {
      label = parse_splice_label(fields[0], line_no);
      if (fields[1].empty()) throw ParseError("empty instance name", line_no);
      bases = fields[2];
    } else if (fields.size() > 3) {
      label = parse_splice_label(fields.back(), line_no);
      for (std::size_t i = 0; i + 1 < fields.size(); ++i) {
        if (fields[i].size() != 1) throw ParseError("expected a single base in field " + std::to_string(i + 1), line_no);
        bases += fields[i];
      }
    } else {
      throw ParseError("expected 'LABEL, NAME, SEQUENCE' or one base per field", line_no);
    }
    if (bases.empty()) throw ParseError("empty sequence", line_no);

    std::vector<Symbol> symbols;
    symbols.reserve(bases.size());
    bool ambiguous = false;
    for (char c : bases) {
      const char u = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
      if (const auto pos = kBases.find(u); pos != std::string_view::npos) {
        symbols.push_back(static_cast<Symbol>(pos));
      } else if (kAmbiguous.find(u) != std::string_view::npos) {
        ambiguous = true;
      } else {
        throw ParseError(std::string("unknown base character '") + c + "'", line_no);
      }
    }
    if (ambiguous && policy == AmbiguityPolicy::kDropRecord) continue;
    if (symbols.empty()) continue;
    out.sequences.emplace_back(std::move(symbols));
    out.labels.push_back(label);
  }
  return out;
}

LabeledSequenceSet load_splice(const std::filesystem::path& path, AmbiguityPolicy policy) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open splice file " + path.string(), 0);
  return parse_splice(in, policy);
}

// ---------------------------------------------------------------------------
// Synthetic

std::vector<ObservationSequence> draw_sequences(const AnyModel& generator, std::size_t count,
                                                std::size_t length, std::uint64_t seed) {
  std::vector<ObservationSequence> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(sample(generator, length, derive_seed(seed, i + 1)));
  return out;
}

SyntheticData gen_synthetic(const SyntheticSpec& spec) {
  if (spec.n < 1 || spec.s < 1 || spec.w < 1) throw InvalidArgument("synthetic model sizes must be >= 1");
  if (spec.length < 1) throw InvalidArgument("synthetic sequence length must be >= 1");
  AnyModel generator = spec.kind == GeneratorKind::kHmm
                           ? AnyModel(Hmm::random(spec.n, spec.s, spec.seed, spec.concentration))
                           : AnyModel(random_hqmm(spec.n, spec.s, spec.w, spec.seed));
  LabeledSequenceSet data;
  data.sequences = draw_sequences(generator, spec.num_sequences, spec.length, spec.seed);
  return {std::move(generator), std::move(data)};
}

// ---------------------------------------------------------------------------
// Dataset files

std::filesystem::path metadata_path(const std::filesystem::path& dataset) {
  return std::filesystem::path(dataset.string() + ".meta.json");
}

void write_dataset(const std::filesystem::path& path, const LabeledSequenceSet& set, const json& metadata) {
  set.validate();
  std::ofstream out(path);
  if (!out) throw Error("cannot write dataset " + path.string());
  for (std::size_t i = 0; i < set.sequences.size(); ++i) {
    json rec = json::object();
    if (set.has_labels()) rec["label"] = set.labels[i];
    rec["symbols"] = std::vector<Symbol>(set.sequences[i].begin(), set.sequences[i].end());
    out << rec.dump() << '\n';
  }
  json meta = metadata;
  meta["alphabet"] = set.alphabet;
  meta["s"] = set.alphabet_size();
  if (!set.label_names.empty()) meta["label_names"] = set.label_names;
  meta["num_sequences"] = set.sequences.size();
  std::ofstream side(metadata_path(path));
  if (!side) throw Error("cannot write dataset metadata " + metadata_path(path).string());
  side << meta.dump(2) << '\n';
}

Dataset read_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open dataset " + path.string(), 0);
  Dataset out;
  std::string line;
  std::size_t line_no = 0;
  bool any_label = false, any_unlabeled = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(e.what(), line_no);
    }
    if (!rec.is_object() || !rec.contains("symbols") || !rec["symbols"].is_array())
      throw ParseError("record must be an object with a 'symbols' array", line_no);
    std::vector<Symbol> symbols;
    for (const auto& v : rec["symbols"]) {
      if (!v.is_number_unsigned()) throw ParseError("symbols must be non-negative integers", line_no);
      symbols.push_back(v.get<Symbol>());
    }
    out.set.sequences.emplace_back(std::move(symbols));
    if (rec.contains("label")) {
      if (!rec["label"].is_number_unsigned()) throw ParseError("label must be a non-negative integer", line_no);
      out.set.labels.push_back(rec["label"].get<Label>());
      any_label = true;
    } else {
      any_unlabeled = true;
    }
    if (any_label && any_unlabeled) throw ParseError("either every record or none carries a label", line_no);
  }
  const auto side = metadata_path(path);
  if (std::filesystem::exists(side)) {
    std::ifstream ms(side);
    try {
      out.metadata = json::parse(ms);
    } catch (const json::parse_error& e) {
      throw ParseError(std::string("metadata: ") + e.what(), 0);
    }
    if (out.metadata.contains("alphabet")) out.set.alphabet = out.metadata["alphabet"].get<std::string>();
    if (out.metadata.contains("label_names"))
      out.set.label_names = out.metadata["label_names"].get<std::vector<std::string>>();
  }
  return out;
}

}  // namespace hqmm
