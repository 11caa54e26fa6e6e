// riskbound: analyze problem documents, run the learners, generate and sweep
// the example families.
//
// Exit codes: 0 success, 1 other failure, 2 validation, 3 divergence,
// 4 schema or I/O.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "riskbound/analysis.hpp"
#include "riskbound/errors.hpp"

namespace {

using namespace riskbound;

constexpr int kExitOk = 0;
constexpr int kExitOther = 1;
constexpr int kExitValidation = 2;
constexpr int kExitDivergence = 3;
constexpr int kExitSchema = 4;

void emit(const Json& doc, const std::string& out) {
  const std::string text = doc.dump(2) + "\n";
  if (out.empty()) {
    std::cout << text;
  } else {
    write_text(out, text);
  }
}

struct AnalyzeArgs {
  std::string spec;
  std::string out;
};

int cmd_analyze(const AnalyzeArgs& args) {
  const ProblemDocument doc = read_problem(args.spec);
  const AnalysisOutcome outcome = analyze(doc);
  emit(outcome.report, args.out);
  if (!outcome.chain_valid) {
    std::cerr << "riskbound: chain " << outcome.failure << '\n';
    return kExitValidation;
  }
  return kExitOk;
}

struct SimulateArgs {
  std::string spec;
  std::string alg = "avg";
  std::size_t horizon = 100'000;
  std::uint64_t seed = 0;
  std::string out;
  std::string summary;
  std::size_t thin = 1;
  double step_a = 1.0;
  double step_b = 100.0;
  std::optional<double> kappa;
  double epsilon = 1e-6;
};

int cmd_simulate(const SimulateArgs& args) {
  const ProblemDocument doc = read_problem(args.spec);
  SimulationRequest request;
  request.algorithm = parse_algorithm(args.alg);
  request.horizon = args.horizon;
  request.seed = args.seed;
  request.options.schedule = args.kappa ? StepSchedule::polynomial(args.step_a, *args.kappa)
                                        : StepSchedule::harmonic(args.step_a, args.step_b);
  request.options.epsilon_guard = args.epsilon;
  request.options.thin = args.thin;

  const SimulationResult result = simulate(doc, request);
  write_text(args.out, trace_csv(result.trace, args.thin));
  emit(result.summary, args.summary);
  if (!args.summary.empty()) emit(result.summary, "");
  if (result.trace.diverged) {
    std::cerr << "riskbound: " << result.trace.diagnostic << '\n';
    return kExitDivergence;
  }
  return kExitOk;
}

struct FamilyArgs {
  std::string family;
  std::size_t s = 0;
  double p = 0.0;
  double q = 0.0;
  double q_prime = 0.0;
  double eps = 0.0;
  std::string out;
};

int cmd_generate(const FamilyArgs& args) {
  ExampleFamily f{parse_family_kind(args.family), args.s, args.p, args.q, args.q_prime,
                  args.eps};
  emit(to_json(generate_example(f)), args.out);
  return kExitOk;
}

struct SweepArgs {
  std::string family;
  std::vector<std::size_t> sizes;
  std::vector<double> p{0.0};
  std::vector<double> q{0.0};
  std::vector<double> q_prime{0.0};
  std::vector<double> eps{0.0};
  std::size_t workers = 0;
  std::string out;
};

int cmd_sweep(const SweepArgs& args) {
  SweepGrid grid{parse_family_kind(args.family), args.sizes, args.p, args.q, args.q_prime,
                 args.eps};
  const std::size_t workers = args.workers > 0 ? args.workers : default_workers();
  const std::string csv = sweep_csv(run_sweep(grid, workers));
  if (args.out.empty()) {
    std::cout << csv;
  } else {
    write_text(args.out, csv);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Error bounds for risk-sensitive cost approximation"};
  app.require_subcommand(1);

  AnalyzeArgs analyze_args;
  auto* analyze_cmd = app.add_subcommand("analyze", "Analyze a problem document");
  analyze_cmd->add_option("spec", analyze_args.spec, "Problem JSON")->required();
  analyze_cmd->add_option("--out", analyze_args.out, "Report path (default stdout)");

  SimulateArgs sim;
  auto* simulate_cmd = app.add_subcommand("simulate", "Run a stochastic-approximation learner");
  simulate_cmd->add_option("spec", sim.spec, "Problem JSON")->required();
  simulate_cmd->add_option("--alg", sim.alg, "avg, lspe or td")
      ->check(CLI::IsMember({"avg", "lspe", "td"}));
  simulate_cmd->add_option("--horizon", sim.horizon, "Number of transitions")
      ->check(CLI::PositiveNumber);
  simulate_cmd->add_option("--seed", sim.seed, "RNG seed");
  simulate_cmd->add_option("--out", sim.out, "Trace CSV path")->required();
  simulate_cmd->add_option("--summary", sim.summary, "Also write the summary JSON here");
  simulate_cmd->add_option("--thin", sim.thin, "Write every n-th step")
      ->check(CLI::PositiveNumber);
  simulate_cmd->add_option("--step-a", sim.step_a, "Step size numerator a");
  simulate_cmd->add_option("--step-b", sim.step_b, "Harmonic offset b in a/(n+b)");
  simulate_cmd->add_option("--kappa", sim.kappa, "Use a/(n+1)^kappa instead");
  simulate_cmd->add_option("--epsilon", sim.epsilon, "Denominator guard");

  FamilyArgs gen;
  auto* generate_cmd = app.add_subcommand("generate", "Write an example family document");
  const std::vector<std::string> families{"constant", "diagonal", "corner", "primed", "shift"};
  generate_cmd->add_option("--family", gen.family)->required()->check(CLI::IsMember(families));
  generate_cmd->add_option("--s", gen.s, "Matrix size")->required();
  generate_cmd->add_option("--p", gen.p);
  generate_cmd->add_option("--q", gen.q);
  generate_cmd->add_option("--qprime", gen.q_prime);
  generate_cmd->add_option("--eps", gen.eps);
  generate_cmd->add_option("--out", gen.out, "Output path (default stdout)");

  SweepArgs sweep;
  auto* sweep_cmd = app.add_subcommand("sweep", "Tabulate every bound over a family grid");
  sweep_cmd->add_option("--family", sweep.family)->required()->check(CLI::IsMember(families));
  sweep_cmd->add_option("--s", sweep.sizes, "Sizes, comma separated")
      ->required()
      ->delimiter(',');
  sweep_cmd->add_option("--p", sweep.p)->delimiter(',');
  sweep_cmd->add_option("--q", sweep.q)->delimiter(',');
  sweep_cmd->add_option("--qprime", sweep.q_prime)->delimiter(',');
  sweep_cmd->add_option("--eps", sweep.eps)->delimiter(',');
  sweep_cmd->add_option("--workers", sweep.workers, "Thread count (default RISKBOUND_WORKERS)");
  sweep_cmd->add_option("--out", sweep.out, "CSV path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*analyze_cmd) return cmd_analyze(analyze_args);
    if (*simulate_cmd) return cmd_simulate(sim);
    if (*generate_cmd) return cmd_generate(gen);
    if (*sweep_cmd) return cmd_sweep(sweep);
  } catch (const SchemaError& e) {
    std::cerr << "riskbound: " << e.what() << '\n';
    return kExitSchema;
  } catch (const StructureError& e) {
    std::cerr << "riskbound: " << e.what() << '\n';
    return kExitValidation;
  } catch (const DomainError& e) {
    std::cerr << "riskbound: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "riskbound: " << e.what() << '\n';
    return kExitOther;
  }
  return kExitOther;
}
