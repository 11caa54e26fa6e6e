#include "riskbound/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "riskbound/errors.hpp"

namespace riskbound {

namespace {

template <typename T>
Json optional_json(const std::optional<T>& v) {
  return v ? Json(*v) : Json(nullptr);
}

[[noreturn]] void schema_fail(const std::string& path, const std::string& what) {
  throw SchemaError(path + ": " + what);
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json vector_to_json(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Matrix matrix_from_json(const Json& node, const std::string& path) {
  if (!node.is_array() || node.empty()) schema_fail(path, "expected a nonempty array of rows");
  const std::size_t rows = node.size();
  if (!node[0].is_array() || node[0].empty()) {
    schema_fail(path + "[0]", "expected a nonempty array of numbers");
  }
  const std::size_t cols = node[0].size();
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows; ++i) {
    const std::string row_path = path + "[" + std::to_string(i) + "]";
    const Json& row = node[i];
    if (!row.is_array()) schema_fail(row_path, "expected an array of numbers");
    if (row.size() != cols) {
      schema_fail(row_path, "expected " + std::to_string(cols) + " entries, found " +
                                std::to_string(row.size()));
    }
    for (std::size_t j = 0; j < cols; ++j) {
      if (!row[j].is_number()) {
        schema_fail(row_path + "[" + std::to_string(j) + "]", "expected a number");
      }
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = row[j].get<double>();
    }
  }
  return m;
}

ProblemDocument parse_problem(const Json& doc) {
  if (!doc.is_object()) schema_fail("$", "expected a JSON object");
  ProblemDocument out;

  auto matrix_field = [&](const char* key) -> std::optional<Matrix> {
    if (!doc.contains(key)) return std::nullopt;
    return matrix_from_json(doc.at(key), std::string("$.") + key);
  };

  if (doc.contains("P")) {
    for (const char* key : {"s", "c", "i0"}) {
      if (!doc.contains(key)) schema_fail(std::string("$.") + key, "missing required field");
    }
    if (!doc.at("s").is_number_integer()) schema_fail("$.s", "expected an integer");
    if (!doc.at("i0").is_number_integer()) schema_fail("$.i0", "expected an integer");
    const auto s = doc.at("s").get<long long>();
    const auto i0 = doc.at("i0").get<long long>();
    Matrix p = *matrix_field("P");
    Matrix c = *matrix_field("c");
    if (s < 2) schema_fail("$.s", "must be at least 2");
    if (p.rows() != s || p.cols() != s) schema_fail("$.P", "expected an s x s matrix");
    if (c.rows() != s || c.cols() != s) schema_fail("$.c", "expected an s x s matrix");
    if (i0 < 1 || i0 > s) schema_fail("$.i0", "must lie in [1, s]");
    out.chain = ChainSpec::create(std::move(p), std::move(c),
                                  static_cast<std::size_t>(i0 - 1));
  }
  out.phi = matrix_field("Phi");
  out.a = matrix_field("A");
  out.b = matrix_field("B");
  if (doc.contains("family")) out.family = doc.at("family");

  if (out.chain && out.phi &&
      out.phi->rows() != static_cast<Eigen::Index>(out.chain->size())) {
    schema_fail("$.Phi", "expected one row per state");
  }
  if (!out.chain && !(out.a && out.b)) {
    schema_fail("$.P", "missing required field (or provide both A and B)");
  }
  if (out.a && out.b && (out.a->rows() != out.b->rows() || out.a->cols() != out.b->cols())) {
    schema_fail("$.B", "must have the same shape as A");
  }
  if (out.chain && out.b && !out.a &&
      out.b->rows() != static_cast<Eigen::Index>(out.chain->size())) {
    schema_fail("$.B", "expected an s x s matrix");
  }
  return out;
}

Json to_json(const ProblemDocument& doc) {
  Json out = Json::object();
  if (doc.chain) {
    out["s"] = doc.chain->size();
    out["P"] = matrix_to_json(doc.chain->p);
    out["c"] = matrix_to_json(doc.chain->c);
    out["i0"] = doc.chain->i0 + 1;
  }
  if (doc.phi) out["Phi"] = matrix_to_json(*doc.phi);
  if (doc.a) out["A"] = matrix_to_json(*doc.a);
  if (doc.b) out["B"] = matrix_to_json(*doc.b);
  if (doc.family) out["family"] = *doc.family;
  return out;
}

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError(path.string() + ": cannot open file");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw SchemaError(path.string() + ": invalid JSON: " + e.what());
  }
}

ProblemDocument read_problem(const std::filesystem::path& path) {
  return parse_problem(read_json(path));
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw SchemaError(path.string() + ": cannot open file for writing");
  out << text;
  if (!out) throw SchemaError(path.string() + ": write failed");
}

Json to_json(const ChainValidationReport& r) {
  return {{"row_stochastic", r.row_stochastic}, {"irreducible", r.irreducible},
          {"aperiodic", r.aperiodic},           {"strictly_positive", r.strictly_positive},
          {"period", r.period},                 {"valid", r.valid()}};
}

Json to_json(const FeatureFlags& f) {
  return {{"dagger", f.dagger}, {"star", f.star}, {"td_condition", optional_json(f.td_condition)}};
}

Json to_json(const BoundValue& v) {
  Json out = {{"value", optional_json(v.value)}, {"valid", v.valid}};
  if (!v.note.empty()) out["note"] = v.note;
  return out;
}

Json to_json(const Verdict& v) {
  return {{"applicable", v.applicable}, {"holds", v.holds}, {"margin", v.margin}};
}

Json to_json(const BoundReport& r) {
  Json out;
  out["lambda"] = r.lambda;
  out["mu"] = r.mu;
  out["direction"] = to_string(r.direction);
  out["swapped"] = r.swapped;
  out["actual"] = optional_json(r.actual);
  out["bounded_gap"] = optional_json(r.bounded_gap);
  out["norms"] = {{"A", r.norm_a}, {"B", r.norm_b}, {"A_minus_B", r.norm_difference}};
  out["spectral_variation"] = to_json(r.spectral_variation);
  out["bapat_ratio"] = to_json(r.bapat_ratio);
  out["L"] = optional_json(r.l);
  out["lindqvist_lower"] = to_json(r.lindqvist_lower);
  out["lindqvist_additive"] = to_json(r.lindqvist_additive);
  out["operator_norm"] = to_json(r.operator_norm);
  out["operator_norm"]["alpha"] = optional_json(r.alpha);
  out["normal_matrix"] = {{"value", r.normal_matrix.value},
                          {"normal", r.normal_matrix.normal},
                          {"eigen_gap", r.normal_matrix.eigen_gap},
                          {"holds", r.normal_matrix.holds},
                          {"diagnostic_only", true}};
  if (r.validity) {
    out["lindqvist_validity"] = {{"holds", r.validity->holds},
                                 {"l_below_perron_value", r.validity->l_clause},
                                 {"min_row_sum_below_perron_value", r.validity->row_sum_clause},
                                 {"L", r.validity->l},
                                 {"perron_value", r.validity->perron_value},
                                 {"min_row_sum", r.validity->min_row_sum}};
  } else {
    out["lindqvist_validity"] = nullptr;
  }
  out["orderings"] = {{"additive_below_lower", to_json(r.orderings.additive_below_lower)},
                      {"ratio_below_lower", to_json(r.orderings.ratio_below_lower)},
                      {"lower_below_ratio", to_json(r.orderings.lower_below_ratio)}};
  out["warnings"] = r.warnings;
  return out;
}

Json to_json(const RlConditions& r) {
  return {{"expanded_validity", r.expanded_validity},
          {"diagonal_match", r.diagonal_match},
          {"off_diagonal_match", r.off_diagonal_match},
          {"dominant_diagonal", r.dominant_diagonal},
          {"recessive_diagonal", r.recessive_diagonal},
          {"every_column_has_excess", r.every_column_has_excess},
          {"min_row_sum", r.min_row_sum},
          {"expanded_L", r.expanded_l}};
}

Json to_json(const ExpandedBounds& e) {
  return {{"bapat_ratio", e.ratio},
          {"L", e.l},
          {"lindqvist_lower", {{"value", optional_json(e.lower.value)}, {"valid", e.lower.valid}}},
          {"lindqvist_additive", e.additive}};
}

Json to_json(const ZeroErrorCertificate& z) {
  return {{"similarity",
           {{"holds", z.similarity.holds},
            {"lambda0", z.similarity.lambda0},
            {"beta", vector_to_json(z.similarity.beta)},
            {"residual", z.similarity.residual}}},
          {"log_balance", {{"holds", z.log_balance.holds}, {"value", z.log_balance.value}}},
          {"certified", z.certified},
          {"relative_gap", z.relative_gap}};
}

}  // namespace riskbound
