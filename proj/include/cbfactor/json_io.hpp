#pragma once

// JSON encodings.
//   matrix:   {"rows": r, "cols": c, "data": [[re, im], ...]}   row-major
//   vector:   [[re, im], ...]   (plain numbers are read as real entries)
//   sequence: {"coeffs": [[re, im], ...]}
// Malformed input raises Error(InvalidInput) or Error(LengthMismatch).

#include <string>
#include <vector>

#include <json.hpp>

#include "cbfactor/calculus.hpp"
#include "cbfactor/group.hpp"
#include "cbfactor/schur.hpp"

namespace cbf::json_io {

using nlohmann::json;

[[noreturn]] inline void invalid(const std::string& what) { throw Error(ErrorKind::InvalidInput, what); }

inline cplx complex_from(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  invalid("expected a number or a [re, im] pair");
}

inline json complex_to(cplx z) { return json::array({z.real(), z.imag()}); }

inline ComplexVector vector_from(const json& j) {
  if (!j.is_array()) invalid("expected an array of [re, im] pairs");
  ComplexVector v(static_cast<Eigen::Index>(j.size()));
  for (size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = complex_from(j[i]);
  return v;
}

inline json vector_to(const ComplexVector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(complex_to(v(i)));
  return out;
}

inline ComplexMatrix matrix_from(const json& j) {
  if (!j.is_object() || !j.contains("rows") || !j.contains("cols") || !j.contains("data"))
    invalid("matrix needs rows, cols and data");
  if (!j["rows"].is_number_integer() || !j["cols"].is_number_integer()) invalid("rows and cols must be integers");
  const auto r = j["rows"].get<long long>(), c = j["cols"].get<long long>();
  if (r < 1 || c < 1) invalid("matrix dimensions must be positive");
  const json& data = j["data"];
  if (!data.is_array()) invalid("matrix data must be an array");
  if (static_cast<long long>(data.size()) != r * c)
    throw Error(ErrorKind::LengthMismatch, "matrix data has " + std::to_string(data.size()) + " entries, expected " +
                                               std::to_string(r * c));
  ComplexMatrix m(r, c);
  for (long long i = 0; i < r; ++i)
    for (long long k = 0; k < c; ++k) m(i, k) = complex_from(data[static_cast<size_t>(i * c + k)]);
  return m;
}

inline json matrix_to(const ComplexMatrix& m) {
  json data = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index k = 0; k < m.cols(); ++k) data.push_back(complex_to(m(i, k)));
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

inline std::vector<ComplexMatrix> matrices_from(const json& j) {
  if (!j.is_array() || j.empty()) invalid("expected a nonempty array of matrices");
  std::vector<ComplexMatrix> out;
  for (const auto& e : j) out.push_back(matrix_from(e));
  return out;
}

/// Exponent from a number or the strings "inf"/"infinity".
inline double exponent_from(const json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf" || s == "infinity") return std::numeric_limits<double>::infinity();
    invalid("unknown exponent '" + s + "'");
  }
  if (!j.is_number()) invalid("exponent must be a number or \"inf\"");
  const double p = j.get<double>();
  if (!(p >= 1.0)) invalid("exponent must be >= 1");
  return p;
}

inline json exponent_to(double p) { return std::isinf(p) ? json("inf") : json(p); }

inline json certificate_to(const Nu2Certificate& c, bool with_gram) {
  json a1 = json::array(), a2 = json::array();
  for (Eigen::Index s = 0; s < c.a1.cols(); ++s) a1.push_back(matrix_to(c.a1.col(s)));
  for (Eigen::Index t = 0; t < c.a2.cols(); ++t) a2.push_back(matrix_to(c.a2.col(t)));
  json out = {{"value", c.value},   {"dual_lower", c.dual_lower}, {"K", c.k},
              {"a1", std::move(a1)}, {"a2", std::move(a2)},       {"residual", c.reconstruction_residual}};
  if (with_gram) out["gram"] = matrix_to(c.gram);
  return out;
}

inline GroupDesc group_desc_from(const json& j) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) invalid("group description needs a kind");
  GroupDesc g;
  g.kind = j["kind"].get<std::string>();
  if (g.kind == "table") {
    if (!j.contains("table")) invalid("table groups need a table");
    try {
      g.table = j["table"].get<std::vector<std::vector<int>>>();
    } catch (const nlohmann::json::exception&) {
      invalid("group table must be an array of integer rows");
    }
  } else {
    if (!j.contains("n") || !j["n"].is_number_integer()) invalid("group description needs an integer n");
    g.n = j["n"].get<int>();
  }
  return g;
}

inline HankelSequence sequence_from(const json& j, Eigen::Index n) {
  if (!j.is_object() || !j.contains("coeffs")) invalid("sequence needs coeffs");
  HankelSequence m{vector_from(j["coeffs"]), n, j.value("completely_monotone", false)};
  m.validate();
  return m;
}

inline AnalyticPolynomial polynomial_from(const json& j) {
  if (!j.is_object() || !j.contains("coeffs")) invalid("polynomial needs coeffs");
  AnalyticPolynomial f{vector_from(j["coeffs"])};
  if (f.coeffs.size() == 0) invalid("polynomial needs at least one coefficient");
  if (!all_finite(f.coeffs)) invalid("polynomial has non-finite coefficients");
  return f;
}

/// {"low": k, "coeffs": [...]}
inline TrigPolynomial trig_from(const json& j) {
  if (!j.is_object() || !j.contains("coeffs")) invalid("trigonometric polynomial needs coeffs");
  TrigPolynomial f{j.value("low", 0), vector_from(j["coeffs"])};
  if (f.coeffs.size() == 0) invalid("trigonometric polynomial needs at least one coefficient");
  return f;
}

/// [{"f": trig, "h": polynomial}, ...]
inline A0Decomposition decomposition_from(const json& j) {
  if (!j.is_array()) invalid("decomposition must be an array of {f, h} pairs");
  A0Decomposition dec;
  for (const auto& e : j) {
    if (!e.is_object() || !e.contains("f") || !e.contains("h")) invalid("decomposition entries need f and h");
    dec.pairs.emplace_back(trig_from(e["f"]), polynomial_from(e["h"]));
  }
  return dec;
}

}  // namespace cbf::json_io
