#pragma once

// Parametric matrix pairs on which the bounds can be compared in closed
// form, plus the stochastic chain that realizes a nonnegative matrix as
// C o P.

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

#include "riskbound/io.hpp"

namespace riskbound {

enum class FamilyKind {
  kConstant,  ///< A all p, B all q
  kDiagonal,  ///< A: p on the diagonal, q elsewhere; B all q
  kCorner,    ///< A: p at (1,1), q elsewhere; B all q
  kPrimed,    ///< A as kDiagonal; B all q'
  kShift,     ///< A: ones on the superdiagonal; B: A plus eps at (s,1)
};

std::string_view to_string(FamilyKind kind);
FamilyKind parse_family_kind(std::string_view name);

struct ExampleFamily {
  FamilyKind kind = FamilyKind::kConstant;
  std::size_t s = 2;
  double p = 0.0;
  double q = 0.0;
  double q_prime = 0.0;
  double eps = 0.0;

  /// Throws DomainError when a parameter constraint is violated.
  void validate() const;
  Json to_json() const;
};

struct MatrixPair {
  Matrix a;
  Matrix b;
};

/// Inverse of ExampleFamily::to_json. Throws SchemaError on malformed input.
ExampleFamily family_from_json(const Json& node);

MatrixPair generate_pair(const ExampleFamily& family);

/// Chain with P = A / rowsum and c(i,j) = ln(rowsum_i), so that C o P = A.
/// Empty when A has a zero row. i0 is the state of largest stationary mass
/// when the chain is valid, 0 otherwise.
std::optional<ChainSpec> companion_chain(const Matrix& a);

/// Pair, companion chain (when one exists) and the family parameters.
ProblemDocument generate_example(const ExampleFamily& family);

/// Large-s limits of the actual error and the spectral variation bound, in
/// closed form. Empty for the shift family.
std::optional<Json> family_asymptotics(const ExampleFamily& family);

}  // namespace riskbound
