#include "hqmm/model_io.hpp"

#include "hqmm/error.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>

namespace hqmm {

using nlohmann::json;

std::string encode_double(double x) {
  if (!std::isfinite(x)) throw NumericalError("cannot store a non-finite parameter");
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", x);
  return buf;
}

double decode_double(const std::string& text) {
  if (text.empty()) throw ParseError("empty number", 0);
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (end != text.c_str() + text.size() || errno == ERANGE || !std::isfinite(v))
    throw ParseError("malformed number '" + text + "'", 0);
  return v;
}

namespace {

json complex_matrix(const CMatrix& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back({encode_double(m(i, j).real()), encode_double(m(i, j).imag())});
    rows.push_back(std::move(row));
  }
  return rows;
}

json real_matrix(const RMatrix& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(encode_double(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

const json& field(const json& obj, const char* key) {
  if (!obj.is_object() || !obj.contains(key)) throw ParseError(std::string("model file lacks '") + key + "'", 0);
  return obj.at(key);
}

Index dimension(const json& obj, const char* key) {
  const json& v = field(obj, key);
  if (!v.is_number_integer() || v.get<std::int64_t>() < 1)
    throw ParseError(std::string("'") + key + "' must be a positive integer", 0);
  return static_cast<Index>(v.get<std::int64_t>());
}

double number(const json& v) {
  if (!v.is_string()) throw ParseError("parameters must be hexadecimal float strings", 0);
  return decode_double(v.get<std::string>());
}

CMatrix read_complex(const json& rows, Index r, Index c, const std::string& what) {
  if (!rows.is_array() || static_cast<Index>(rows.size()) != r)
    throw ParseError(what + ": expected " + std::to_string(r) + " rows", 0);
  CMatrix m(r, c);
  for (Index i = 0; i < r; ++i) {
    const json& row = rows[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Index>(row.size()) != c)
      throw ParseError(what + ": expected " + std::to_string(c) + " columns", 0);
    for (Index j = 0; j < c; ++j) {
      const json& z = row[static_cast<std::size_t>(j)];
      if (!z.is_array() || z.size() != 2) throw ParseError(what + ": entries must be [re, im] pairs", 0);
      m(i, j) = Complex(number(z[0]), number(z[1]));
    }
  }
  return m;
}

RMatrix read_real(const json& rows, Index r, Index c, const std::string& what) {
  if (!rows.is_array() || static_cast<Index>(rows.size()) != r)
    throw ParseError(what + ": expected " + std::to_string(r) + " rows", 0);
  RMatrix m(r, c);
  for (Index i = 0; i < r; ++i) {
    const json& row = rows[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Index>(row.size()) != c)
      throw ParseError(what + ": expected " + std::to_string(c) + " columns", 0);
    for (Index j = 0; j < c; ++j) m(i, j) = number(row[static_cast<std::size_t>(j)]);
  }
  return m;
}

}  // namespace

json model_to_json(const AnyModel& model, const json& metadata) {
  json doc = json::object();
  doc["format_version"] = kModelFormatVersion;
  doc["kind"] = std::string(kind_name(model));
  if (const auto* q = std::get_if<Hqmm>(&model)) {
    doc["n"] = q->latent_dim();
    doc["s"] = q->alphabet_size();
    doc["w"] = q->env_dim();
    json ops = json::array();
    for (const auto& k : q->all_ops()) ops.push_back(complex_matrix(k));
    doc["kraus"] = std::move(ops);
    doc["rho0"] = complex_matrix(q->rho0().matrix());
  } else {
    const auto& h = std::get<Hmm>(model);
    doc["n"] = h.num_states();
    doc["s"] = h.alphabet_size();
    doc["transition"] = real_matrix(h.transition());
    doc["emission"] = real_matrix(h.emission());
    json prior = json::array();
    for (Index i = 0; i < h.prior().size(); ++i) prior.push_back(encode_double(h.prior()(i)));
    doc["prior"] = std::move(prior);
  }
  doc["metadata"] = metadata;
  return doc;
}

ModelFile model_from_json(const json& doc) {
  const json& version = field(doc, "format_version");
  if (!version.is_number_integer() || version.get<int>() != kModelFormatVersion)
    throw ParseError("unsupported model format version " + version.dump(), 0);
  const json& kind = field(doc, "kind");
  if (!kind.is_string()) throw ParseError("'kind' must be a string", 0);
  json metadata = doc.contains("metadata") ? doc.at("metadata") : json::object();

  const Index n = dimension(doc, "n");
  const Index s = dimension(doc, "s");
  if (kind == "hqmm") {
    const Index w = dimension(doc, "w");
    const json& ops = field(doc, "kraus");
    if (!ops.is_array() || static_cast<Index>(ops.size()) != s * w)
      throw ParseError("'kraus' must hold s*w operators", 0);
    std::vector<CMatrix> kraus;
    for (std::size_t i = 0; i < ops.size(); ++i)
      kraus.push_back(read_complex(ops[i], n, n, "kraus[" + std::to_string(i) + "]"));
    DensityMatrix rho0(read_complex(field(doc, "rho0"), n, n, "rho0"));
    return {Hqmm(n, s, w, std::move(kraus), std::move(rho0)), std::move(metadata)};
  }
  if (kind == "hmm") {
    RMatrix a = read_real(field(doc, "transition"), n, n, "transition");
    RMatrix c = read_real(field(doc, "emission"), s, n, "emission");
    const json& p = field(doc, "prior");
    if (!p.is_array() || static_cast<Index>(p.size()) != n) throw ParseError("'prior' must have n entries", 0);
    RVector prior(n);
    for (Index i = 0; i < n; ++i) prior(i) = number(p[static_cast<std::size_t>(i)]);
    return {Hmm(std::move(a), std::move(c), std::move(prior)), std::move(metadata)};
  }
  throw ParseError("unknown model kind '" + kind.get<std::string>() + "'", 0);
}

void save_model(const std::filesystem::path& path, const AnyModel& model, const json& metadata) {
  const json doc = model_to_json(model, metadata);
  std::ofstream out(path);
  if (!out) throw Error("cannot write model file " + path.string());
  out << doc.dump(1) << '\n';
  if (!out) throw Error("failed writing model file " + path.string());
}

ModelFile load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open model file " + path.string(), 0);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what(), 0);
  }
  return model_from_json(doc);
}

}  // namespace hqmm
