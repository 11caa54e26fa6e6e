#include "riskbound/families.hpp"

#include <cmath>

#include "riskbound/errors.hpp"

namespace riskbound {

std::string_view to_string(FamilyKind kind) {
  switch (kind) {
    case FamilyKind::kConstant:
      return "constant";
    case FamilyKind::kDiagonal:
      return "diagonal";
    case FamilyKind::kCorner:
      return "corner";
    case FamilyKind::kPrimed:
      return "primed";
    case FamilyKind::kShift:
      return "shift";
  }
  return "unknown";
}

FamilyKind parse_family_kind(std::string_view name) {
  for (auto kind : {FamilyKind::kConstant, FamilyKind::kDiagonal, FamilyKind::kCorner,
                    FamilyKind::kPrimed, FamilyKind::kShift}) {
    if (to_string(kind) == name) return kind;
  }
  throw DomainError("unknown family '" + std::string(name) + "'");
}

void ExampleFamily::validate() const {
  if (s < 2) throw DomainError("family: s must be at least 2");
  switch (kind) {
    case FamilyKind::kConstant:
    case FamilyKind::kDiagonal:
    case FamilyKind::kCorner:
      if (!(p > q && q > 0.0)) throw DomainError("family: requires p > q > 0");
      break;
    case FamilyKind::kPrimed:
      if (!(p > q && q > 0.0)) throw DomainError("family: requires p > q > 0");
      if (!(q_prime > q)) throw DomainError("family: requires q' > q");
      break;
    case FamilyKind::kShift:
      if (!(eps > 0.0 && eps < 1.0)) throw DomainError("family: requires eps in (0, 1)");
      break;
  }
}

Json ExampleFamily::to_json() const {
  Json out = {{"kind", std::string(to_string(kind))}, {"s", s}};
  if (kind == FamilyKind::kShift) {
    out["eps"] = eps;
  } else {
    out["p"] = p;
    out["q"] = q;
    if (kind == FamilyKind::kPrimed) out["qprime"] = q_prime;
  }
  return out;
}

ExampleFamily family_from_json(const Json& node) {
  if (!node.is_object()) throw SchemaError("$.family: expected an object");
  auto number = [&](const char* key, bool required) -> double {
    if (!node.contains(key)) {
      if (required) throw SchemaError(std::string("$.family.") + key + ": missing required field");
      return 0.0;
    }
    if (!node.at(key).is_number()) {
      throw SchemaError(std::string("$.family.") + key + ": expected a number");
    }
    return node.at(key).get<double>();
  };
  if (!node.contains("kind") || !node.at("kind").is_string()) {
    throw SchemaError("$.family.kind: expected a string");
  }
  if (!node.contains("s") || !node.at("s").is_number_unsigned()) {
    throw SchemaError("$.family.s: expected a positive integer");
  }
  ExampleFamily f;
  try {
    f.kind = parse_family_kind(node.at("kind").get<std::string>());
  } catch (const DomainError& e) {
    throw SchemaError(std::string("$.family.kind: ") + e.what());
  }
  f.s = node.at("s").get<std::size_t>();
  const bool shift = f.kind == FamilyKind::kShift;
  f.p = number("p", !shift);
  f.q = number("q", !shift);
  f.q_prime = number("qprime", f.kind == FamilyKind::kPrimed);
  f.eps = number("eps", shift);
  return f;
}

MatrixPair generate_pair(const ExampleFamily& family) {
  family.validate();
  const auto n = static_cast<Eigen::Index>(family.s);
  MatrixPair pair;
  switch (family.kind) {
    case FamilyKind::kConstant:
      pair.a = Matrix::Constant(n, n, family.p);
      pair.b = Matrix::Constant(n, n, family.q);
      break;
    case FamilyKind::kDiagonal:
    case FamilyKind::kPrimed:
      pair.a = Matrix::Constant(n, n, family.q);
      pair.a.diagonal().setConstant(family.p);
      pair.b = Matrix::Constant(
          n, n, family.kind == FamilyKind::kPrimed ? family.q_prime : family.q);
      break;
    case FamilyKind::kCorner:
      pair.a = Matrix::Constant(n, n, family.q);
      pair.a(0, 0) = family.p;
      pair.b = Matrix::Constant(n, n, family.q);
      break;
    case FamilyKind::kShift:
      pair.a = Matrix::Zero(n, n);
      for (Eigen::Index i = 0; i + 1 < n; ++i) pair.a(i, i + 1) = 1.0;
      pair.b = pair.a;
      pair.b(n - 1, 0) = family.eps;
      break;
  }
  return pair;
}

std::optional<ChainSpec> companion_chain(const Matrix& a) {
  if (a.rows() != a.cols() || a.rows() < 2) {
    throw DimensionError("companion_chain: matrix must be square with s >= 2");
  }
  if (!is_nonnegative(a)) {
    throw DomainError("companion_chain: matrix must be nonnegative");
  }
  const Vector sums = a.rowwise().sum();
  if (!(sums.minCoeff() > 0.0)) return std::nullopt;
  Matrix p = sums.cwiseInverse().asDiagonal() * a;
  Matrix c = sums.array().log().matrix().replicate(1, a.cols());
  ChainSpec chain = ChainSpec::create(std::move(p), std::move(c), 0);
  if (validate_chain(chain.p).valid()) {
    chain.i0 = default_reference_state(stationary_distribution(chain.p));
  }
  return chain;
}

ProblemDocument generate_example(const ExampleFamily& family) {
  MatrixPair pair = generate_pair(family);
  ProblemDocument doc;
  doc.chain = companion_chain(pair.a);
  doc.a = std::move(pair.a);
  doc.b = std::move(pair.b);
  doc.family = family.to_json();
  return doc;
}

std::optional<Json> family_asymptotics(const ExampleFamily& family) {
  const double p = family.p;
  const double q = family.q;
  switch (family.kind) {
    case FamilyKind::kConstant:
      return Json{{"actual_exact", std::log(p / q)},
                  {"bapat_ratio_exact", std::log(p / q)},
                  {"spectral_variation_limit", std::log(3.0 + (p - q) / q)}};
    case FamilyKind::kDiagonal:
      return Json{{"actual_limit", 0.0},
                  {"bapat_ratio_limit", 0.0},
                  {"operator_norm_exact", std::log(p / q)},
                  {"spectral_variation_limit", std::log(3.0)}};
    case FamilyKind::kCorner:
      // ||A||, ||B|| and ||A - B|| coincide with the diagonal family.
      return Json{{"actual_limit", 0.0}, {"spectral_variation_limit", std::log(3.0)}};
    case FamilyKind::kPrimed:
      return Json{{"actual_limit", std::log(q / family.q_prime)},
                  {"lambda_equals_mu_at_s", (p - q) / (family.q_prime - q)},
                  {"spectral_variation_limit", std::log(1.0 + (q + family.q_prime) / q)}};
    case FamilyKind::kShift:
      return std::nullopt;
  }
  return std::nullopt;
}

}  // namespace riskbound
