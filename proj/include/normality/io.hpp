#pragma once

// JSON encodings: matrix files, reports, family specs.
//
// Matrix file: {"rows": r, "cols": c, "data": [[re, im], ...]} row-major.
// Doubles are written in shortest round-trip form, so write-then-read is
// bit-exact.

#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>

#include "json.hpp"

#include "normality/families.hpp"
#include "normality/operators.hpp"
#include "normality/veritas.hpp"

namespace normality {

using json = nlohmann::json;

/// Malformed input; the message names the offending field.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// I/O failure (unreadable or unwritable path).
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline json matrix_to_json(const Matrix& m) {
  json data = json::array();
  for (const Complex& z : m.entries()) data.push_back(json::array({z.real(), z.imag()}));
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

inline Matrix matrix_from_json(const json& j) {
  if (!j.is_object()) throw FormatError("matrix: expected a JSON object");
  auto dimension = [&](const char* field) -> std::size_t {
    if (!j.contains(field)) throw FormatError(std::string("missing field '") + field + "'");
    const json& v = j.at(field);
    if (!v.is_number_integer() || v.get<long long>() < 1) {
      throw FormatError(std::string("field '") + field + "': expected a positive integer");
    }
    return v.get<std::size_t>();
  };
  const std::size_t rows = dimension("rows");
  const std::size_t cols = dimension("cols");
  if (!j.contains("data")) throw FormatError("missing field 'data'");
  const json& data = j.at("data");
  if (!data.is_array()) throw FormatError("field 'data': expected an array");
  if (data.size() != rows * cols) {
    throw FormatError("field 'data': expected " + std::to_string(rows * cols) +
                      " entries, found " + std::to_string(data.size()));
  }
  std::vector<Complex> entries;
  entries.reserve(data.size());
  for (std::size_t k = 0; k < data.size(); ++k) {
    const json& pair = data[k];
    const std::string where = "data[" + std::to_string(k) + "]";
    if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() || !pair[1].is_number()) {
      throw FormatError(where + ": expected a [re, im] number pair");
    }
    const double re = pair[0].get<double>();
    const double im = pair[1].get<double>();
    if (!std::isfinite(re) || !std::isfinite(im)) throw FormatError(where + ": non-finite value");
    entries.emplace_back(re, im);
  }
  return Matrix(rows, cols, std::move(entries));
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw FormatError("'" + path + "' is not valid JSON: " + e.what());
  }
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << text;
  if (!out) throw IoError("write failed for '" + path + "'");
}

inline Matrix read_matrix_file(const std::string& path) {
  return matrix_from_json(read_json_file(path));
}

inline void write_matrix_file(const std::string& path, const Matrix& m) {
  write_text_file(path, matrix_to_json(m).dump(2) + "\n");
}

inline json optional_bool(const std::optional<bool>& b) {
  return b ? json(*b) : json(nullptr);
}

inline json report_to_json(const VerificationReport& r) {
  json hyps = json::array();
  for (const auto& h : r.hypotheses) hyps.push_back({{"name", h.name}, {"met", h.met}});
  return {{"claim_id", r.claim_id},
          {"hypotheses", std::move(hyps)},
          {"hypotheses_met", r.hypotheses_met()},
          {"conclusion_holds", optional_bool(r.conclusion_holds)},
          {"raw_conclusion", optional_bool(r.raw_conclusion)},
          {"defects", r.defects},
          {"witness", r.witness ? matrix_to_json(*r.witness) : json(nullptr)},
          {"trials", r.trials},
          {"notes", r.notes}};
}

inline json class_report_to_json(const ClassReport& c) {
  json p = json::object();
  for (const auto& [value, holds] : c.p_hyponormal) p[detail::format_number(value)] = holds;
  return {{"normal", c.normal},
          {"hyponormal", c.hyponormal},
          {"p_hyponormal", std::move(p)},
          {"log_hyponormal", optional_bool(c.log_hyponormal)},
          {"defects", c.defects},
          {"consistent", c.consistent}};
}

inline json complex_to_json(Complex z) { return json::array({z.real(), z.imag()}); }

inline json arc_to_json(const std::optional<Arc>& arc) {
  if (!arc) return nullptr;
  return {{"start_angle", arc->start_angle}, {"length", arc->length}, {"margin", arc->margin}};
}

inline json spectrum_to_json(const SpectralDecomposition& s) {
  json values = json::array();
  json mult = json::array();
  for (std::size_t k = 0; k < s.size(); ++k) {
    values.push_back(complex_to_json(s.eigenvalues[k]));
    mult.push_back(s.bases[k].cols());
  }
  return {{"eigenvalues", std::move(values)}, {"multiplicities", std::move(mult)}};
}

inline Tolerances tolerances_from_json(const json& j) {
  Tolerances tol;
  if (j.contains("eq_tol")) tol.eq_tol = j.at("eq_tol").get<double>();
  if (j.contains("psd_tol")) tol.psd_tol = j.at("psd_tol").get<double>();
  if (j.contains("rank_tol")) tol.rank_tol = j.at("rank_tol").get<double>();
  tol.validate();
  return tol;
}

inline json tolerances_to_json(const Tolerances& tol) {
  return {{"eq_tol", tol.eq_tol}, {"psd_tol", tol.psd_tol}, {"rank_tol", tol.rank_tol}};
}

inline FamilySpec family_spec_from_json(const json& j) {
  FamilySpec spec;
  if (!j.contains("kind")) throw FormatError("family: missing field 'kind'");
  const auto kind = parse_family_kind(j.at("kind").get<std::string>());
  if (!kind) throw FormatError("family: unknown kind '" + j.at("kind").get<std::string>() + "'");
  spec.kind = *kind;
  if (j.contains("dim")) spec.dim = j.at("dim").get<std::size_t>();
  if (j.contains("seed")) spec.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("cond_bound")) spec.cond_bound = j.at("cond_bound").get<double>();
  if (j.contains("weights")) {
    for (const auto& w : j.at("weights")) {
      if (!w.is_array() || w.size() != 2) throw FormatError("family: weights must be [re, im] pairs");
      spec.weights.emplace_back(w[0].get<double>(), w[1].get<double>());
    }
    spec.dim = spec.weights.size();
  }
  if (j.contains("arc")) {
    const json& a = j.at("arc");
    spec.arc.start_angle = a.value("start_angle", 0.0);
    spec.arc.length = a.value("length", std::numbers::pi);
    spec.arc.margin = a.value("margin", 0.1);
  }
  if (j.contains("modulus")) {
    const auto m = j.at("modulus").get<std::string>();
    if (m == "random") spec.modulus = ModulusMode::random;
    else if (m == "commuting") spec.modulus = ModulusMode::commuting;
    else if (m == "identity") spec.modulus = ModulusMode::identity;
    else throw FormatError("family: unknown modulus mode '" + m + "'");
  }
  if (spec.dim == 0) throw FormatError("family: dim must be positive");
  return spec;
}

}  // namespace normality
