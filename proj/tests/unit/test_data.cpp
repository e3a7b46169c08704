#include "hqmm/data.hpp"
#include "hqmm/error.hpp"
#include "hqmm/model.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace hqmm;
using hqmm::testing::random_sequence;

namespace fs = std::filesystem;

namespace {

const std::string kBases60 = "CCAGCTGCATCACAGGAGGCCAGCGAGCAGGTCTGTTCCAAGGGCCTTCGAGCCAGTCTG";

fs::path scratch_dir() {
  const fs::path p = fs::temp_directory_path() / ("hqmm_data_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()));
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST(Windowing, CutsIntoFullWindows) {
  const auto seq = random_sequence(4, 3000, 1);
  const auto w = window_sequences(std::span(&seq, 1), 300, 100);
  ASSERT_EQ(w.windows.size(), 10u);
  EXPECT_EQ(w.burn_in, 100u);
  EXPECT_EQ(w.retained_symbols, 3000u);
  EXPECT_EQ(w.scored_symbols, 2000u);
  for (std::size_t i = 0; i < 10; ++i) {
    ASSERT_EQ(w.windows[i].size(), 300u);
    EXPECT_EQ(w.windows[i][0], seq[300 * i]);
    EXPECT_EQ(w.windows[i][299], seq[300 * i + 299]);
  }
}

TEST(Windowing, RemainderPolicy) {
  const auto kept = random_sequence(3, 850, 2);
  auto w = window_sequences(std::span(&kept, 1), 300, 100);
  ASSERT_EQ(w.windows.size(), 3u);
  EXPECT_EQ(w.windows.back().size(), 250u);
  const auto dropped = random_sequence(3, 690, 3);
  w = window_sequences(std::span(&dropped, 1), 300, 100);
  EXPECT_EQ(w.windows.size(), 2u);
  EXPECT_EQ(w.retained_symbols, 600u);
}

TEST(Windowing, ZeroBurnInReassembles) {
  const std::vector<ObservationSequence> seqs{random_sequence(5, 1000, 4), random_sequence(5, 333, 5)};
  const auto w = window_sequences(seqs, 100, 0);
  std::vector<Symbol> joined;
  for (const auto& win : w.windows) joined.insert(joined.end(), win.begin(), win.end());
  std::vector<Symbol> expected;
  for (const auto& s : seqs) expected.insert(expected.end(), s.begin(), s.end());
  EXPECT_EQ(joined, expected);
}

TEST(Windowing, RejectsWindowNotLongerThanBurnIn) {
  const auto seq = random_sequence(3, 100, 6);
  EXPECT_THROW(window_sequences(std::span(&seq, 1), 50, 50), InvalidArgument);
}

TEST(Windowing, AsWindowedDropsShortSequences) {
  const std::vector<ObservationSequence> seqs{random_sequence(3, 10, 1), random_sequence(3, 4, 2)};
  const auto w = as_windowed(seqs, 4);
  ASSERT_EQ(w.windows.size(), 1u);
  EXPECT_EQ(w.scored_symbols, 6u);
}

TEST(Splice, ParsesBothLayouts) {
  std::ostringstream fielded;
  for (std::size_t i = 0; i < kBases60.size(); ++i) fielded << kBases60[i] << ", ";
  fielded << "N\n";
  std::istringstream in("EI, ATRINS-DONOR-521, " + kBases60 + "\n" + fielded.str());
  const auto set = parse_splice(in);
  ASSERT_EQ(set.sequences.size(), 2u);
  EXPECT_EQ(set.labels, (std::vector<Label>{0, 2}));
  EXPECT_EQ(set.sequences[0], set.sequences[1]);
  ASSERT_EQ(set.sequences[0].size(), 60u);
  EXPECT_EQ(set.sequences[0][0], 1u);  // C
  EXPECT_EQ(set.sequences[0][2], 0u);  // A
  EXPECT_EQ(set.sequences[0][3], 2u);  // G
  EXPECT_EQ(set.sequences[0][5], 3u);  // T
  EXPECT_EQ(set.alphabet_size(), 4u);
}

TEST(Splice, AmbiguityPolicies) {
  std::string with_d = kBases60;
  with_d[10] = 'D';
  const std::string text = "IE, X, " + with_d + "\nN, Y, " + kBases60 + "\n";
  std::istringstream a(text), b(text);
  const auto dropped = parse_splice(a, AmbiguityPolicy::kDropRecord);
  ASSERT_EQ(dropped.sequences.size(), 1u);
  EXPECT_EQ(dropped.labels[0], 2u);
  const auto stripped = parse_splice(b, AmbiguityPolicy::kStripCharacters);
  ASSERT_EQ(stripped.sequences.size(), 2u);
  EXPECT_EQ(stripped.sequences[0].size(), 59u);
}

TEST(Splice, ErrorsCarryLineNumbers) {
  std::istringstream bad_base("EI, A, " + kBases60 + "\nEI, B, ACGTX\n");
  try {
    parse_splice(bad_base);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  std::istringstream bad_label("QQ, A, ACGT\n");
  try {
    parse_splice(bad_label);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 1u);
  }
  EXPECT_THROW(load_splice("/nonexistent/splice.dat"), ParseError);
}

TEST(Splice, BundledFileClassCounts) {
  const auto set = load_splice(fs::path(HQMM_DATA_DIR) / "splice.dat");
  EXPECT_EQ(set.sequences.size(), 3175u);
  EXPECT_EQ(set.class_counts(), (std::vector<std::size_t>{762, 765, 1648}));
  for (const auto& s : set.sequences) ASSERT_EQ(s.size(), 60u);
  const auto stripped = load_splice(fs::path(HQMM_DATA_DIR) / "splice.dat", AmbiguityPolicy::kStripCharacters);
  EXPECT_EQ(stripped.sequences.size(), 3190u);
}

TEST(LabeledSet, SubsetAndValidation) {
  LabeledSequenceSet set;
  set.sequences = {ObservationSequence{0}, ObservationSequence{1}, ObservationSequence{2}};
  set.labels = {1, 0, 1};
  const std::vector<std::size_t> idx{0, 2};
  const auto sub = set.subset(idx);
  EXPECT_EQ(sub.labels, (std::vector<Label>{1, 1}));
  EXPECT_EQ(set.sequences_with_label(1).size(), 2u);
  EXPECT_EQ(set.num_classes(), 2u);
  set.labels.pop_back();
  EXPECT_THROW(set.validate(), ConstraintError);
}

TEST(Synthetic, ShapesAndDeterminism) {
  SyntheticSpec spec;
  spec.n = 2;
  spec.s = 6;
  spec.w = 1;
  spec.num_sequences = 5;
  spec.length = 400;
  spec.seed = 3;
  const auto a = gen_synthetic(spec), b = gen_synthetic(spec);
  ASSERT_EQ(a.data.sequences.size(), 5u);
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_EQ(a.data.sequences[i].size(), 400u);
    EXPECT_EQ(a.data.sequences[i], b.data.sequences[i]);
  }
  const auto& gen = std::get<Hqmm>(a.generator);
  EXPECT_LT(trace_preservation_residual(gen.all_ops()), 1e-12);
  EXPECT_EQ(draw_sequences(a.generator, 2, 50, 9)[1], sample(a.generator, 50, derive_seed(9, 2)));

  spec.kind = GeneratorKind::kHmm;
  spec.n = 3;
  const auto h = gen_synthetic(spec);
  EXPECT_EQ(std::get<Hmm>(h.generator).num_states(), 3);
  spec.seed = 4;
  EXPECT_NE(gen_synthetic(spec).data.sequences[0], h.data.sequences[0]);
}

TEST(Dataset, RoundTrip) {
  const fs::path path = scratch_dir() / "set.ndjson";
  LabeledSequenceSet set;
  set.sequences = {random_sequence(4, 30, 1), random_sequence(4, 7, 2)};
  set.labels = {2, 0};
  set.alphabet = "ACGT";
  write_dataset(path, set, {{"seed", 12}});
  const auto back = read_dataset(path);
  EXPECT_EQ(back.set.sequences, set.sequences);
  EXPECT_EQ(back.set.labels, set.labels);
  EXPECT_EQ(back.set.alphabet, "ACGT");
  EXPECT_EQ(back.metadata.at("seed"), 12);
  fs::remove_all(path.parent_path());
}

TEST(Dataset, MalformedRecordReportsLine) {
  const fs::path path = scratch_dir() / "bad.ndjson";
  {
    std::ofstream out(path);
    out << "{\"symbols\": [0, 1]}\n{\"symbols\": [0, -1]}\n";
  }
  try {
    read_dataset(path);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  fs::remove_all(path.parent_path());
}
