#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "riskbound/analysis.hpp"
#include "riskbound/errors.hpp"

namespace py = pybind11;
using namespace riskbound;

namespace {

// Reports travel as JSON text; the Python wrapper decodes them.
std::string dump(const Json& j) { return j.dump(); }

ProblemDocument parse_text(const std::string& text) {
  try {
    return parse_problem(Json::parse(text));
  } catch (const Json::parse_error& e) {
    throw SchemaError(std::string("$: invalid JSON: ") + e.what());
  }
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Perron values, projected systems and error bounds for risk-sensitive costs";

  auto base = py::register_exception<Error>(m, "Error");
  py::register_exception<SchemaError>(m, "SchemaError", base.ptr());
  py::register_exception<StructureError>(m, "StructureError", base.ptr());
  py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<PreconditionError>(m, "PreconditionError", base.ptr());
  py::register_exception<RankError>(m, "RankError", base.ptr());

  m.def(
      "perron_pair",
      [](const Matrix& a, bool biorthogonal) {
        const PerronPair p = perron_pair(
            a, biorthogonal ? Normalization::kBiorthogonal : Normalization::kL1Unit);
        return py::make_tuple(p.value, p.right, p.left);
      },
      py::arg("a"), py::arg("biorthogonal") = false,
      "(value, right, left) for a nonnegative irreducible matrix.");
  m.def("spectral_radius", [](const Matrix& a) { return spectral_radius(a); }, py::arg("a"));
  m.def("induced_one_norm", &induced_one_norm, py::arg("a"));

  m.def(
      "validate_chain",
      [](const Matrix& p) { return dump(to_json(validate_chain(p))); }, py::arg("p"));
  m.def(
      "stationary_distribution",
      [](const Matrix& p) { return stationary_distribution(p).pi; }, py::arg("p"));
  m.def(
      "projected_system",
      [](const Matrix& p, const Matrix& c, const Matrix& phi) {
        const ChainSpec chain = ChainSpec::create(p, c, 0);
        require_valid(chain);
        const ProjectedSystem s = projected_system(chain, FeatureMatrix(phi));
        return py::make_tuple(s.mu, s.q, s.gamma.entries);
      },
      py::arg("p"), py::arg("c"), py::arg("phi"), "(mu, Q, C o P) for a valid chain.");

  m.def(
      "bound_report",
      [](const Matrix& a, const Matrix& b) { return dump(to_json(bound_report(a, b))); },
      py::arg("a"), py::arg("b"));
  m.def(
      "analyze",
      [](const std::string& text) {
        const AnalysisOutcome out = analyze(parse_text(text));
        Json j = out.report;
        j["chain_valid"] = out.chain_valid;
        if (!out.failure.empty()) j["failure"] = out.failure;
        return dump(j);
      },
      py::arg("document"));
  m.def(
      "generate_example",
      [](const std::string& family) {
        return dump(to_json(generate_example(family_from_json(Json::parse(family)))));
      },
      py::arg("family"));
  m.def(
      "simulate",
      [](const std::string& text, const std::string& algorithm, std::size_t horizon,
         std::uint64_t seed) {
        SimulationRequest request;
        request.algorithm = parse_algorithm(algorithm);
        request.horizon = horizon;
        request.seed = seed;
        SimulationResult result = simulate(parse_text(text), request);
        return py::make_tuple(dump(result.summary), std::move(result.trace.estimates));
      },
      py::arg("document"), py::arg("algorithm"), py::arg("horizon"), py::arg("seed") = 0,
      "(summary JSON, estimate per step).");
}
