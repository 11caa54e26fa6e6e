#pragma once

// JSON problem documents and report serialization.
//
// Problem document (row-major matrices, i0 one-based):
//   {"s": 3, "P": [[...]], "c": [[...]], "i0": 1,
//    "Phi": [[...]],              optional feature matrix
//    "A": [[...]], "B": [[...]],  optional explicit matrix pair
//    "family": {...}}             optional generator parameters
// A document without "P" must carry both "A" and "B".

#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "riskbound/bounds.hpp"
#include "riskbound/chain_model.hpp"

namespace riskbound {

using Json = nlohmann::json;

struct ProblemDocument {
  std::optional<ChainSpec> chain;
  std::optional<Matrix> phi;
  std::optional<Matrix> a;
  std::optional<Matrix> b;
  std::optional<Json> family;
};

/// Throws SchemaError whose message starts with the offending JSON path.
ProblemDocument parse_problem(const Json& doc);
Json to_json(const ProblemDocument& doc);

/// File wrappers; I/O failures are reported as SchemaError too.
ProblemDocument read_problem(const std::filesystem::path& path);
Json read_json(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

Json matrix_to_json(const Matrix& m);
Json vector_to_json(const Vector& v);
Matrix matrix_from_json(const Json& node, const std::string& path);

Json to_json(const ChainValidationReport& r);
Json to_json(const FeatureFlags& f);
Json to_json(const BoundValue& v);
Json to_json(const Verdict& v);
Json to_json(const BoundReport& r);
Json to_json(const RlConditions& r);
Json to_json(const ExpandedBounds& e);
Json to_json(const ZeroErrorCertificate& z);

/// printf("%.17g"); used for CSV output.
std::string format_double(double v);

}  // namespace riskbound
