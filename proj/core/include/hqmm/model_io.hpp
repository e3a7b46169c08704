#pragma once
// Versioned JSON model files. Every double is stored as a hexadecimal float
// string ("0x1.8p-1"), so save followed by load reproduces each parameter
// bit for bit. Complex matrices are row-major arrays of [re, im] pairs;
// real matrices are row-major arrays.

#include "hqmm/any_model.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <string>

namespace hqmm {

inline constexpr int kModelFormatVersion = 1;

struct ModelFile {
  AnyModel model;
  /// Free-form training metadata (config, seed, final loss, ...).
  nlohmann::json metadata = nlohmann::json::object();
};

std::string encode_double(double x);
/// Throws ParseError on malformed text.
double decode_double(const std::string& text);

nlohmann::json model_to_json(const AnyModel& model, const nlohmann::json& metadata = nlohmann::json::object());
/// Throws ParseError on schema problems; parameters that violate model
/// invariants raise the constructors' ConstraintError / DimensionError.
ModelFile model_from_json(const nlohmann::json& doc);

void save_model(const std::filesystem::path& path, const AnyModel& model,
                const nlohmann::json& metadata = nlohmann::json::object());
ModelFile load_model(const std::filesystem::path& path);

}  // namespace hqmm
