#include "riskbound/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <sstream>
#include <thread>
#include <tuple>

#include "riskbound/errors.hpp"

namespace riskbound {

namespace {

std::string first_failure(const ChainValidationReport& r) {
  if (!r.square) return "square: false";
  if (!r.row_stochastic) return "row_stochastic: false";
  if (!r.irreducible) return "irreducible: false";
  if (!r.aperiodic) return "aperiodic: false";
  return {};
}

Json projected_json(const ProjectedSystem& system) {
  return {{"mu", system.mu},
          {"risk_sensitive_cost", system.mu > 0.0 ? Json(std::log(system.mu)) : Json(nullptr)},
          {"q_irreducible", system.q_irreducible},
          {"Q", matrix_to_json(system.q)},
          {"projection", matrix_to_json(system.projection)},
          {"warnings", system.warnings}};
}

}  // namespace

AnalysisOutcome analyze(const ProblemDocument& doc) {
  AnalysisOutcome out;
  Json& report = out.report;
  report = Json::object();

  std::optional<Matrix> a = doc.a;
  std::optional<Matrix> b = doc.b;
  std::optional<ComparisonHypotheses> hypotheses;

  if (doc.chain) {
    const ChainSpec& chain = *doc.chain;
    const ChainValidationReport validation = validate_chain(chain.p);
    report["chain"] = {{"s", chain.size()},
                       {"i0", chain.i0 + 1},
                       {"validation", to_json(validation)}};
    if (!validation.valid()) {
      out.chain_valid = false;
      out.failure = first_failure(validation);
      return out;
    }

    const StationaryDistribution pi = stationary_distribution(chain);
    const MultiplicativeMatrix gamma = multiplicative_matrix(chain);
    const PerronPair perron = perron_pair(gamma.entries);
    report["chain"]["pi"] = vector_to_json(pi.pi);
    report["chain"]["stationary_residual"] = pi.residual;
    report["chain"]["default_reference_state"] = default_reference_state(pi) + 1;
    report["lambda"] = perron.value;
    report["risk_sensitive_cost"] = std::log(perron.value);
    report["V"] = vector_to_json(perron.right);
    if (!a) a = gamma.entries;

    if (doc.phi) {
      const FeatureMatrix features(*doc.phi);
      const FeatureFlags flags = check_assumptions(*doc.phi, &pi);
      report["features"] = to_json(flags);
      report["features"]["M"] = features.features();
      try {
        const ProjectedSystem system = projected_system(chain, features);
        report["projected"] = projected_json(system);
        report["mu"] = system.mu;
        if (!b) b = system.q;

        if (flags.star && gamma.positive) {
          const RlConditions conditions = check_rl_conditions(chain, features, system);
          report["rl_conditions"] = to_json(conditions);
          if (!doc.a && !doc.b) hypotheses = hypotheses_from(conditions);
          const PerronPair bi = perron_pair(gamma.entries, Normalization::kBiorthogonal);
          report["expanded_bounds"] =
              to_json(expanded_rl_bounds(chain, features, pi, bi, system.mu));
          try {
            report["zero_error_certificate"] =
                to_json(zero_error_certificate(gamma.entries, system.q, bi.left, bi.right));
          } catch (const DomainError& e) {
            report["zero_error_certificate"] = {{"error", e.what()}};
          }
        }
      } catch (const RankError& e) {
        report["projected"] = {{"error", e.what()},
                               {"dependent_columns", e.dependent_columns()}};
      } catch (const PreconditionError& e) {
        report["projected"] = {{"error", e.what()}};
      }
    }
  }

  if (a && b) {
    const BoundReport bounds = bound_report(*a, *b, hypotheses);
    report["bounds"] = to_json(bounds);
    if (!report.contains("lambda")) report["lambda"] = bounds.lambda;
    if (!report.contains("mu")) report["mu"] = bounds.mu;
  }

  if (doc.family) {
    report["family"] = *doc.family;
    const auto asymptotics = family_asymptotics(family_from_json(*doc.family));
    report["asymptotics"] = asymptotics ? *asymptotics : Json(nullptr);
  }
  return out;
}

std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::kAverageCost:
      return "avg";
    case Algorithm::kLspe:
      return "lspe";
    case Algorithm::kTd:
      return "td";
  }
  return "unknown";
}

Algorithm parse_algorithm(std::string_view name) {
  for (auto a : {Algorithm::kAverageCost, Algorithm::kLspe, Algorithm::kTd}) {
    if (to_string(a) == name) return a;
  }
  throw DomainError("unknown algorithm '" + std::string(name) + "'");
}

SimulationResult simulate(const ProblemDocument& doc, const SimulationRequest& request) {
  if (!doc.chain) throw SchemaError("$.P: a chain is required for simulation");
  const ChainSpec& chain = *doc.chain;
  require_valid(chain);
  if (request.algorithm != Algorithm::kAverageCost && !doc.phi) {
    throw SchemaError("$.Phi: required for " + std::string(to_string(request.algorithm)));
  }

  LearnerOptions options = request.options;
  if (!options.i0) options.i0 = chain.i0;
  const auto trajectory = sample_trajectory(chain, request.horizon, request.seed);

  SimulationResult result;
  switch (request.algorithm) {
    case Algorithm::kAverageCost: {
      const StationaryDistribution pi = stationary_distribution(chain);
      result.trace =
          run_average_cost(trajectory, expected_step_costs(chain), options.schedule, &pi);
      break;
    }
    case Algorithm::kLspe:
      result.trace = run_lspe(trajectory, chain, FeatureMatrix(*doc.phi), options);
      break;
    case Algorithm::kTd:
      result.trace = run_td(trajectory, chain, FeatureMatrix(*doc.phi), options);
      break;
  }
  result.trace.seed = request.seed;

  const LearnerTrace& t = result.trace;
  Json& s = result.summary;
  s["algorithm"] = std::string(to_string(request.algorithm));
  s["horizon"] = request.horizon;
  s["seed"] = request.seed;
  s["steps"] = t.estimates.size();
  s["target"] = t.target ? Json(*t.target) : Json(nullptr);
  s["final_estimate"] = t.estimates.empty() ? Json(nullptr) : Json(t.estimates.back());
  s["rel_error"] = t.final_abs_rel_error ? Json(*t.final_abs_rel_error) : Json(nullptr);
  s["diverged"] = t.diverged;
  if (!t.diagnostic.empty()) s["diagnostic"] = t.diagnostic;
  return result;
}

std::string trace_csv(const LearnerTrace& trace, std::size_t thin) {
  if (thin == 0) thin = 1;
  std::ostringstream os;
  os << "n,estimate,target,abs_error\n";
  const std::size_t count = trace.estimates.size();
  for (std::size_t k = 0; k < count; ++k) {
    const std::size_t n = k + 1;
    if (n % thin != 0 && n != count) continue;
    const double estimate = trace.estimates[k];
    os << n << ',' << format_double(estimate) << ',';
    if (trace.target) {
      os << format_double(*trace.target) << ','
         << format_double(std::abs(estimate - *trace.target));
    } else {
      os << ',';
    }
    os << '\n';
  }
  return os.str();
}

std::vector<SweepRow> run_sweep(const SweepGrid& grid, std::size_t workers) {
  std::vector<ExampleFamily> points;
  for (std::size_t s : grid.sizes) {
    for (double p : grid.p) {
      for (double q : grid.q) {
        for (double qp : grid.q_prime) {
          for (double eps : grid.eps) {
            ExampleFamily f{grid.kind, s, p, q, qp, eps};
            f.validate();
            points.push_back(f);
          }
        }
      }
    }
  }
  std::sort(points.begin(), points.end(), [](const ExampleFamily& l, const ExampleFamily& r) {
    return std::tie(l.s, l.p, l.q, l.q_prime, l.eps) <
           std::tie(r.s, r.p, r.q, r.q_prime, r.eps);
  });

  std::vector<SweepRow> rows(points.size());
  std::vector<std::exception_ptr> errors(points.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t k = next++; k < points.size(); k = next++) {
      try {
        const MatrixPair pair = generate_pair(points[k]);
        rows[k] = SweepRow{points[k], bound_report(pair.a, pair.b)};
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(points.size(), 1));
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  auto cell = [](const std::optional<double>& v) {
    return v ? format_double(*v) : std::string();
  };
  auto bound = [&](const BoundValue& v) {
    return v.valid ? cell(v.value) : std::string();
  };
  std::ostringstream os;
  os << "family,s,p,q,qprime,eps,lambda,mu,actual,spectral_variation,bapat_ratio,L,"
        "lindqvist_lower,lindqvist_additive,operator_norm,norm_difference\n";
  for (const auto& row : rows) {
    const ExampleFamily& f = row.family;
    const BoundReport& r = row.report;
    os << to_string(f.kind) << ',' << f.s << ',' << format_double(f.p) << ','
       << format_double(f.q) << ',' << format_double(f.q_prime) << ','
       << format_double(f.eps) << ',' << format_double(r.lambda) << ','
       << format_double(r.mu) << ',' << cell(r.actual) << ','
       << bound(r.spectral_variation) << ',' << bound(r.bapat_ratio) << ',' << cell(r.l)
       << ',' << bound(r.lindqvist_lower) << ',' << bound(r.lindqvist_additive) << ','
       << bound(r.operator_norm) << ',' << format_double(r.norm_difference) << '\n';
  }
  return os.str();
}

std::size_t default_workers() {
  if (const char* env = std::getenv("RISKBOUND_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace riskbound
