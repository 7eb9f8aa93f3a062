// Command-line front end: audit, compile, analyse, simulate and validate
// adiabatic schedules. Exit status 0 means pass, 1 a failed verdict and 2 an
// input error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hqc/calibration.hpp"
#include "hqc/report.hpp"
#include "hqc/schedule_io.hpp"
#include "hqc/sim.hpp"

namespace {

using namespace hqc;

constexpr int kPass = 0;
constexpr int kVerdictFailure = 1;
constexpr int kInputError = 2;

/// Problem with the command line or an input file.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string code_path;
  std::string circuit_path;
  std::string schedule_path;
  std::string format = "text";
  std::string out_path;
  std::string ramp = "cosine";
  double duration = 0.0;  // 0: the calibrated default for the code size
  std::vector<std::string> stage_durations;  // "stage:T", 1-based
  std::vector<std::string> breaks;           // "stage:term", 1-based
  double c_b = 0.5;
  std::string rewrite_path;
  std::size_t rewrite_at = 0;
  std::optional<std::size_t> max_weight;
  std::string filter;
  std::uint64_t seed = 1;
  std::string syndrome_mode = "max-likelihood";
  std::size_t steps_per_unit = 0;  // 0: library or calibrated default
  double max_step_norm = 0.0;
  double tolerance = 0.0;          // 0: the library default for the command
  std::vector<double> sweep_durations = {5.0, 20.0, 80.0};
  std::vector<std::size_t> boundaries;
};

/// Resolves a path as given, then relative to $HQC_CORPUS_DIR.
std::string resolve(const std::string& path) {
  namespace fs = std::filesystem;
  if (path.empty() || fs::exists(path)) return path;
  if (const char* dir = std::getenv("HQC_CORPUS_DIR")) {
    const fs::path candidate = fs::path(dir) / path;
    if (fs::exists(candidate)) return candidate.string();
  }
  throw InputError(path + ": no such file (also looked in $HQC_CORPUS_DIR)");
}

/// Runs a loader and prefixes any parse diagnostic with the file name.
template <typename Fn>
auto load_from(const std::string& path, Fn&& fn) {
  const std::string resolved = resolve(path);
  try {
    return fn(resolved);
  } catch (const hqc::ParseError& e) {
    throw InputError(path + ": " + e.what());
  } catch (const SizeMismatch& e) {
    throw InputError(path + ": " + e.what());
  }
}

std::pair<std::size_t, std::string> split_pair(const std::string& spec, const char* what) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) throw InputError(std::string(what) + " '" + spec + "' must look like STAGE:VALUE");
  try {
    const std::size_t stage = std::stoul(spec.substr(0, colon));
    if (stage == 0) throw InputError(std::string(what) + " stages are 1-based");
    return {stage, spec.substr(colon + 1)};
  } catch (const std::logic_error&) {
    throw InputError(std::string(what) + " '" + spec + "' has a non-numeric stage");
  }
}

StabilizerCode load_code_arg(const RunConfig& cfg) {
  if (cfg.code_path.empty()) throw InputError("--code is required");
  return load_from(cfg.code_path, [](const std::string& p) { return load_code(p); });
}

ErrorSet local_errors_for(const RunConfig& cfg, const StabilizerCode& code) {
  if (!cfg.max_weight && cfg.filter.empty()) return default_local_errors(code);
  const std::size_t w = cfg.max_weight ? *cfg.max_weight : 1;
  return cfg.filter.empty() ? local_error_set(code, w) : local_error_set(code, w, cfg.filter);
}

double default_duration(const StabilizerCode& code) {
  if (code.n <= 3) return calibration::kRepetitionStageDuration;
  if (code.n <= 7) return calibration::kSteaneStageDuration;
  return calibration::kSteaneCnotStageDuration;
}

SimOptions sim_options(const RunConfig& cfg, std::size_t n) {
  SimOptions o = n > 7 ? calibration::steane_cnot_sim_options() : SimOptions{};
  if (cfg.steps_per_unit > 0) o.steps_per_unit = cfg.steps_per_unit;
  if (cfg.max_step_norm > 0.0) o.max_step_norm = cfg.max_step_norm;
  if (cfg.tolerance > 0.0) o.ft_tolerance = cfg.tolerance;
  o.seed = cfg.seed;
  if (cfg.syndrome_mode == "sample") o.syndrome_mode = SyndromeMode::Sample;
  else if (cfg.syndrome_mode != "max-likelihood") throw InputError("--syndrome-mode must be max-likelihood or sample");
  return o;
}

SynthesisOptions synthesis_options(const RunConfig& cfg, const StabilizerCode& code) {
  SynthesisOptions o;
  try {
    o.ramp.family = parse_ramp_family(cfg.ramp);
  } catch (const DomainError& e) {
    throw InputError(e.what());
  }
  o.ramp.duration = cfg.duration > 0.0 ? cfg.duration : default_duration(code);
  o.c_b = cfg.c_b;
  o.local_errors = local_errors_for(cfg, code);
  for (const auto& spec : cfg.breaks) {
    const auto [stage, term] = split_pair(spec, "--break");
    try {
      const std::size_t t = std::stoul(term);
      if (t == 0) throw InputError("--break terms are 1-based");
      o.break_overrides[stage - 1] = t - 1;
    } catch (const std::logic_error&) {
      throw InputError("--break '" + spec + "' has a non-numeric term");
    }
  }
  for (const auto& spec : cfg.stage_durations) {
    const auto [stage, value] = split_pair(spec, "--stage-duration");
    try {
      o.stage_durations[stage - 1] = std::stod(value);
    } catch (const std::logic_error&) {
      throw InputError("--stage-duration '" + spec + "' has a non-numeric duration");
    }
  }
  if (!cfg.rewrite_path.empty()) {
    const PauliSum terms = load_from(cfg.rewrite_path, [&](const std::string& p) { return load_terms(p, code.n); });
    o.rewrites.emplace_back(cfg.rewrite_at, terms);
  }
  return o;
}

struct Output {
  std::string path;
  void write(const std::string& text) const {
    if (path.empty()) {
      std::cout << text;
      return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot open '" + path + "' for writing");
    out << text;
  }
};

/// Either loads --schedule or compiles --code/--circuit. Returns nullopt, after
/// printing the audit, when the circuit is not fault-tolerant.
std::optional<Schedule> obtain_schedule(const RunConfig& cfg) {
  if (!cfg.schedule_path.empty()) return load_from(cfg.schedule_path, [](const std::string& p) { return load_schedule(p); });
  const StabilizerCode code = load_code_arg(cfg);
  if (cfg.circuit_path.empty()) throw InputError("--circuit is required");
  const Circuit circuit = load_from(cfg.circuit_path, [&](const std::string& p) { return load_circuit(p, code.n); });
  const auto v = validate(code);
  if (!v.ok()) throw InputError(cfg.code_path + ": " + v.violations.front());
  const SynthesisOptions opts = synthesis_options(cfg, code);
  const AuditReport audit = audit_fault_tolerance(code, circuit, *opts.local_errors);
  if (!audit.passed()) {
    std::cerr << emit_audit(audit, ReportFormat::Text);
    return std::nullopt;
  }
  try {
    return synthesize(code, circuit, opts);
  } catch (const DomainError& e) {
    throw InputError(e.what());
  }
}

int cmd_audit(const RunConfig& cfg, ReportFormat fmt, const Output& out) {
  const StabilizerCode code = load_code_arg(cfg);
  if (cfg.circuit_path.empty()) throw InputError("--circuit is required");
  const Circuit circuit = load_from(cfg.circuit_path, [&](const std::string& p) { return load_circuit(p, code.n); });
  const AuditReport report = audit_fault_tolerance(code, circuit, local_errors_for(cfg, code));
  out.write(emit_audit(report, fmt));
  return report.passed() ? kPass : kVerdictFailure;
}

int cmd_compile(const RunConfig& cfg, const Output& out) {
  const auto s = obtain_schedule(cfg);
  if (!s) return kVerdictFailure;
  out.write(export_schedule(*s));
  return validate_schedule(*s).ok() ? kPass : kVerdictFailure;
}

int cmd_gaps(const RunConfig& cfg, ReportFormat fmt, const Output& out) {
  const auto s = obtain_schedule(cfg);
  if (!s) return kVerdictFailure;
  const auto gaps = gap_report(*s);
  out.write(emit_gaps(gaps, fmt));
  for (const auto& g : gaps)
    if (g.coupled_gap < 1.0) return kVerdictFailure;
  return kPass;
}

int cmd_weights(const RunConfig& cfg, ReportFormat fmt, const Output& out) {
  RunConfig naive_cfg = cfg;
  naive_cfg.rewrite_path.clear();
  const auto naive = obtain_schedule(naive_cfg);
  if (!naive) return kVerdictFailure;
  const WeightReport before = max_weight(*naive);
  if (cfg.rewrite_path.empty()) {
    out.write(emit_weights(before, nullptr, fmt));
    return kPass;
  }
  const PauliSum terms =
      load_from(cfg.rewrite_path, [&](const std::string& p) { return load_terms(p, naive->num_qubits()); });
  if (cfg.rewrite_at > naive->stages.size()) throw InputError("--rewrite-at is past the last stage");
  const PauliSum& current =
      cfg.rewrite_at < naive->stages.size() ? naive->stages[cfg.rewrite_at].incoming : naive->final_terms;
  if (const auto v = rewrite_violations(current, terms); !v.empty()) {
    std::cerr << "rewrite rejected: " << v.front() << "\n";
    return kVerdictFailure;
  }
  const Schedule rewritten = rewrite_generators(*naive, cfg.rewrite_at, terms, cfg.c_b);
  const WeightReport after = max_weight(rewritten);
  out.write(emit_weights(before, &after, fmt));
  const auto check = validate_schedule(rewritten);
  for (const auto& v : check.violations) std::cerr << "violation: " << v << "\n";
  return check.ok() ? kPass : kVerdictFailure;
}

int cmd_simulate(const RunConfig& cfg, ReportFormat fmt, const Output& out) {
  const auto s = obtain_schedule(cfg);
  if (!s) return kVerdictFailure;
  const auto check = validate_schedule(*s);
  if (!check.ok()) {
    for (const auto& v : check.violations) std::cerr << "violation: " << v << "\n";
    return kVerdictFailure;
  }
  const SimOptions opts = sim_options(cfg, s->num_qubits());
  const HolonomyReport r = holonomy(*s, opts);
  out.write(emit_holonomy(r, fmt));
  const double tol = cfg.tolerance > 0.0 ? cfg.tolerance : opts.ft_tolerance;
  return r.infidelity <= tol ? kPass : kVerdictFailure;
}

int cmd_fttest(const RunConfig& cfg, ReportFormat fmt, const Output& out) {
  // --max-weight/--filter pick the injected errors; the compile-time audit
  // keeps the code's default local error set.
  RunConfig compile_cfg = cfg;
  compile_cfg.max_weight.reset();
  compile_cfg.filter.clear();
  const auto s = obtain_schedule(compile_cfg);
  if (!s) return kVerdictFailure;
  const SimOptions opts = sim_options(cfg, s->num_qubits());
  ErrorSet errors = local_errors_for(cfg, s->code);
  if (errors.elements.size() == 1 && errors.elements[0].is_identity_up_to_phase())
    throw InputError("the default error set is {I} for this code; pass --max-weight and/or --filter");
  for (auto b : cfg.boundaries)
    if (b > s->stages.size()) throw InputError("--boundary " + std::to_string(b) + " is past the last stage");
  const auto results = ft_matrix(*s, build_decoder(s->code), errors.elements, cfg.boundaries, opts);
  out.write(emit_ft(results, fmt == ReportFormat::Text ? ReportFormat::Csv : fmt));
  for (const auto& r : results)
    if (!r.passed) return kVerdictFailure;
  return kPass;
}

int cmd_sweep(const RunConfig& cfg, ReportFormat fmt, const Output& out) {
  const auto s = obtain_schedule(cfg);
  if (!s) return kVerdictFailure;
  const auto sweep = convergence_sweep(*s, cfg.sweep_durations, sim_options(cfg, s->num_qubits()));
  out.write(emit_sweep(sweep, fmt));
  return kPass;
}

int cmd_validate(const RunConfig& cfg, ReportFormat fmt, const Output& out) {
  if (cfg.schedule_path.empty()) throw InputError("--schedule is required");
  const Schedule s = load_from(cfg.schedule_path, [](const std::string& p) { return load_schedule(p); });
  const auto report = validate_schedule(s);
  out.write(emit_validation(report, fmt));
  return report.ok() ? kPass : kVerdictFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Compile fault-tolerant Clifford circuits into adiabatic Hamiltonian schedules and verify them."};
  app.require_subcommand(1);
  RunConfig cfg;

  auto add_format = [&](CLI::App* sub) {
    sub->add_option("--format", cfg.format, "Report format")->check(CLI::IsMember({"text", "json", "csv"}));
    sub->add_option("-o,--out", cfg.out_path, "Write the report to this file instead of stdout");
  };
  auto add_inputs = [&](CLI::App* sub) {
    sub->add_option("--code", cfg.code_path, "Stabilizer code file");
    sub->add_option("--circuit", cfg.circuit_path, "Clifford circuit file");
  };
  auto add_error_set = [&](CLI::App* sub) {
    sub->add_option("--max-weight", cfg.max_weight, "Largest error weight in the local error set");
    sub->add_option("--filter", cfg.filter, "Restrict local errors to these letters, e.g. X or XZ");
  };
  auto add_synthesis = [&](CLI::App* sub) {
    add_inputs(sub);
    add_error_set(sub);
    sub->add_option("--schedule", cfg.schedule_path, "Use a compiled schedule JSON instead of --code/--circuit");
    sub->add_option("--ramp", cfg.ramp, "Ramp family")->check(CLI::IsMember({"linear", "cosine", "bump"}));
    sub->add_option("--duration", cfg.duration, "Duration of every stage")->check(CLI::PositiveNumber);
    sub->add_option("--stage-duration", cfg.stage_durations, "Per-stage duration STAGE:T (1-based, repeatable)");
    sub->add_option("--break", cfg.breaks, "Degeneracy-break term STAGE:TERM (1-based, repeatable)");
    sub->add_option("--c-b", cfg.c_b, "Degeneracy-break strength");
    sub->add_option("--rewrite", cfg.rewrite_path, "Replacement generator terms file");
    sub->add_option("--rewrite-at", cfg.rewrite_at, "Boundary (stages completed) where the rewrite is spliced");
  };
  auto add_sim = [&](CLI::App* sub) {
    sub->add_option("--seed", cfg.seed, "Seed for sampled syndrome extraction");
    sub->add_option("--syndrome-mode", cfg.syndrome_mode, "max-likelihood or sample");
    sub->add_option("--steps-per-unit", cfg.steps_per_unit, "Minimum RK4 steps per unit time");
    sub->add_option("--max-step-norm", cfg.max_step_norm, "Upper bound on dt * sum |coeff|");
    sub->add_option("--tolerance", cfg.tolerance, "Infidelity tolerance for the verdict");
  };

  auto* audit = app.add_subcommand("audit", "Check a circuit for fault tolerance on a code");
  add_inputs(audit);
  add_error_set(audit);
  add_format(audit);
  auto* compile = app.add_subcommand("compile", "Compile a circuit into a schedule JSON document");
  add_synthesis(compile);
  compile->add_option("-o,--out", cfg.out_path, "Write the schedule to this file instead of stdout");
  auto* gaps = app.add_subcommand("gaps", "Per-stage ground and coupled-pair gaps");
  add_synthesis(gaps);
  add_format(gaps);
  auto* weights = app.add_subcommand("weights", "Maximum term weight, optionally before and after a rewrite");
  add_synthesis(weights);
  add_format(weights);
  auto* simulate = app.add_subcommand("simulate", "Integrate the schedule and extract the holonomy");
  add_synthesis(simulate);
  add_sim(simulate);
  add_format(simulate);
  auto* fttest = app.add_subcommand("fttest", "Inject local errors at stage boundaries, decode and compare");
  add_synthesis(fttest);
  add_sim(fttest);
  add_format(fttest);
  fttest->add_option("--boundary", cfg.boundaries, "Boundary index to test (repeatable; default all)");
  auto* sweep = app.add_subcommand("sweep", "Holonomy infidelity against the uniform stage duration");
  add_synthesis(sweep);
  add_sim(sweep);
  add_format(sweep);
  sweep->add_option("--durations", cfg.sweep_durations, "Stage durations to sweep")->delimiter(',');
  auto* validate_cmd = app.add_subcommand("validate", "Check a schedule JSON document");
  validate_cmd->add_option("--schedule", cfg.schedule_path, "Schedule JSON file")->required();
  add_format(validate_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kInputError;
  }

  try {
    const ReportFormat fmt = parse_report_format(cfg.format);
    const Output out{cfg.out_path};
    if (*audit) return cmd_audit(cfg, fmt, out);
    if (*compile) return cmd_compile(cfg, out);
    if (*gaps) return cmd_gaps(cfg, fmt, out);
    if (*weights) return cmd_weights(cfg, fmt, out);
    if (*simulate) return cmd_simulate(cfg, fmt, out);
    if (*fttest) return cmd_fttest(cfg, fmt, out);
    if (*sweep) return cmd_sweep(cfg, fmt, out);
    if (*validate_cmd) return cmd_validate(cfg, fmt, out);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const hqc::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const SizeMismatch& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kVerdictFailure;
  }
  return kInputError;
}
