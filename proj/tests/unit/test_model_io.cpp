#include "hqmm/error.hpp"
#include "hqmm/model_io.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <limits>

using namespace hqmm;
using nlohmann::json;

namespace fs = std::filesystem;

TEST(HexDouble, RoundTripsExactly) {
  for (double x : {0.0, -0.0, 1.0, 0.1, -3.25e-300, 1e300, std::numeric_limits<double>::denorm_min(),
                   std::nextafter(1.0, 2.0)}) {
    const double back = decode_double(encode_double(x));
    EXPECT_EQ(std::signbit(back), std::signbit(x));
    EXPECT_EQ(back, x);
  }
  EXPECT_EQ(encode_double(0.75), "0x1.8p-1");
  EXPECT_EQ(decode_double("0x1p+0"), 1.0);
}

TEST(HexDouble, RejectsGarbage) {
  EXPECT_THROW(decode_double(""), ParseError);
  EXPECT_THROW(decode_double("0x1p+0junk"), ParseError);
  EXPECT_THROW(decode_double("abc"), ParseError);
}

TEST(ModelJson, HqmmRoundTripIsBitExact) {
  const Hqmm m = random_hqmm(3, 4, 2, 17);
  const auto file = model_from_json(model_to_json(AnyModel(m), {{"note", "x"}}));
  const auto& back = std::get<Hqmm>(file.model);
  EXPECT_EQ(back.stiefel().matrix(), m.stiefel().matrix());
  EXPECT_EQ(back.rho0().matrix(), m.rho0().matrix());
  EXPECT_EQ(back.env_dim(), 2);
  EXPECT_EQ(file.metadata.at("note"), "x");
}

TEST(ModelJson, HmmRoundTripIsBitExact) {
  const Hmm h = Hmm::random(4, 3, 5, 0.3);
  const auto back = std::get<Hmm>(model_from_json(model_to_json(AnyModel(h))).model);
  EXPECT_EQ(back.transition(), h.transition());
  EXPECT_EQ(back.emission(), h.emission());
  EXPECT_EQ(back.prior(), h.prior());
}

TEST(ModelJson, Layout) {
  const json doc = model_to_json(AnyModel(random_hqmm(2, 3, 1, 1)));
  EXPECT_EQ(doc.at("format_version"), kModelFormatVersion);
  EXPECT_EQ(doc.at("kind"), "hqmm");
  EXPECT_EQ(doc.at("n"), 2);
  EXPECT_EQ(doc.at("s"), 3);
  EXPECT_EQ(doc.at("w"), 1);
  ASSERT_EQ(doc.at("kraus").size(), 3u);
  EXPECT_TRUE(doc.at("kraus")[0][1][0][1].is_string());
}

TEST(ModelJson, SchemaErrors) {
  const json good = model_to_json(AnyModel(random_hqmm(2, 2, 1, 3)));
  json bad = good;
  bad["format_version"] = 99;
  EXPECT_THROW(model_from_json(bad), ParseError);
  bad = good;
  bad["kind"] = "markov";
  EXPECT_THROW(model_from_json(bad), ParseError);
  bad = good;
  bad.erase("rho0");
  EXPECT_THROW(model_from_json(bad), ParseError);
  bad = good;
  bad["kraus"][0][0][0][0] = "nope";
  EXPECT_THROW(model_from_json(bad), ParseError);
  bad = good;
  bad["kraus"].erase(1);
  EXPECT_THROW(model_from_json(bad), ParseError);
  EXPECT_THROW(model_from_json(json::array()), ParseError);
}

TEST(ModelJson, InvariantViolationsSurface) {
  json doc = model_to_json(AnyModel(random_hqmm(2, 2, 1, 4)));
  doc["kraus"][0][0][0][0] = encode_double(5.0);
  EXPECT_THROW(model_from_json(doc), ConstraintError);
  json hmm = model_to_json(AnyModel(Hmm::uniform(2, 2)));
  hmm["prior"][0] = encode_double(0.9);
  EXPECT_THROW(model_from_json(hmm), ConstraintError);
}

TEST(ModelFile, SaveLoad) {
  const fs::path dir = fs::temp_directory_path() / "hqmm_model_io_test";
  fs::create_directories(dir);
  const Hqmm m = random_hqmm(2, 4, 3, 8);
  save_model(dir / "m.json", AnyModel(m), {{"epochs", 3}});
  const auto file = load_model(dir / "m.json");
  EXPECT_EQ(std::get<Hqmm>(file.model).stiefel().matrix(), m.stiefel().matrix());
  EXPECT_EQ(file.metadata.at("epochs"), 3);
  EXPECT_THROW(load_model(dir / "missing.json"), ParseError);
  fs::remove_all(dir);
}
