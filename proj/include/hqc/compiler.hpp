#pragma once

// Schedule synthesis: one adiabatic stage per primitive gate, with degeneracy
// breaking for even anticommuting sets, generator rewrites at stage
// boundaries, and exact spectrum, gap and weight analytics.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "hqc/circuit.hpp"
#include "hqc/code.hpp"
#include "hqc/errors.hpp"
#include "hqc/pauli.hpp"

namespace hqc {

enum class RampFamily { Linear, Cosine, Bump };

inline std::string ramp_family_name(RampFamily f) {
  switch (f) {
    case RampFamily::Linear: return "linear";
    case RampFamily::Cosine: return "cosine";
    case RampFamily::Bump: return "bump";
  }
  return "?";
}

inline RampFamily parse_ramp_family(const std::string& name) {
  if (name == "linear") return RampFamily::Linear;
  if (name == "cosine") return RampFamily::Cosine;
  if (name == "bump") return RampFamily::Bump;
  throw DomainError("unknown ramp family '" + name + "' (expected linear, cosine or bump)");
}

/// Monotone map f: [0,1] -> [0,1] with f(0) = 0 and f(1) = 1.
struct RampSpec {
  RampFamily family = RampFamily::Cosine;
  double duration = 50.0;

  double value(double s) const {
    if (s <= 0.0) return 0.0;
    if (s >= 1.0) return 1.0;
    switch (family) {
      case RampFamily::Linear: return s;
      case RampFamily::Cosine: return 0.5 * (1.0 - std::cos(std::numbers::pi * s));
      case RampFamily::Bump: {
        const double a = std::exp(-1.0 / s), b = std::exp(-1.0 / (1.0 - s));
        return a / (a + b);
      }
    }
    return s;
  }

  friend bool operator==(const RampSpec&, const RampSpec&) = default;
};

/// cos(f*pi/2) and sin(f*pi/2), exact at the endpoints.
inline std::pair<double, double> quarter_cos_sin(double f) {
  if (f <= 0.0) return {1.0, 0.0};
  if (f >= 1.0) return {0.0, 1.0};
  const double a = f * std::numbers::pi / 2;
  return {std::cos(a), std::sin(a)};
}

/// coeff*cos(f pi/2)*pauli + partner_coeff*sin(f pi/2)*partner, or the constant
/// coeff*pauli when the term commutes with the stage generator.
struct InterpolatedTerm {
  double coeff = 0.0;
  PauliOp pauli;
  double partner_coeff = 0.0;
  std::optional<PauliOp> partner;

  bool rotates() const noexcept { return partner.has_value(); }

  friend bool operator==(const InterpolatedTerm&, const InterpolatedTerm&) = default;
};

struct BreakInfo {
  std::size_t index = 0;  // term index, 0-based
  double c_b = 0.5;

  friend bool operator==(const BreakInfo&, const BreakInfo&) = default;
};

struct Stage {
  Gate gate;
  PauliSum incoming;  // terms at the stage start, before any break
  std::vector<std::size_t> anticommuting;
  std::vector<std::size_t> commuting;
  std::optional<BreakInfo> break_info;
  std::vector<InterpolatedTerm> terms;  // break already applied
  PauliSum outgoing;                    // full-angle image of `incoming`, break restored
  RampSpec ramp;
  double start_time = 0.0;

  double end_time() const noexcept { return start_time + ramp.duration; }
};

/// Instantaneous swap of the term list at a stage boundary (number of stages before it).
struct Rewrite {
  std::size_t boundary = 0;
  PauliSum before;
  PauliSum after;
};

struct Schedule {
  StabilizerCode code;
  Circuit circuit;  // macro-expanded
  PauliSum initial;
  std::vector<Stage> stages;
  std::vector<Rewrite> rewrites;
  PauliSum final_terms;
  bool audit_skipped = false;

  std::size_t num_qubits() const noexcept { return code.n; }
  double total_time() const noexcept { return stages.empty() ? 0.0 : stages.back().end_time(); }

  /// t_0, ..., t_p
  std::vector<double> boundaries() const {
    std::vector<double> out{0.0};
    for (const auto& s : stages) out.push_back(s.end_time());
    return out;
  }

  const Rewrite* rewrite_at(std::size_t boundary) const {
    for (const auto& r : rewrites)
      if (r.boundary == boundary) return &r;
    return nullptr;
  }
};

struct SynthesisOptions {
  RampSpec ramp;
  std::map<std::size_t, double> stage_durations;     // 0-based stage -> duration
  std::map<std::size_t, std::size_t> break_overrides;  // 0-based stage -> 0-based term
  double c_b = 0.5;
  bool skip_audit = false;
  std::optional<ErrorSet> local_errors;  // audit set; defaults to the code's declared distance
  std::vector<std::pair<std::size_t, PauliSum>> rewrites;  // boundary -> replacement terms
};

/// -P for a negative coefficient, +P otherwise: the generator whose +1 eigenspace is low in energy.
inline PauliOp signed_generator(const WeightedTerm& t) { return t.coeff < 0 ? t.pauli : t.pauli.negated(); }

inline std::vector<PauliOp> signed_generators(const PauliSum& h) {
  std::vector<PauliOp> out;
  for (const auto& t : h) out.push_back(signed_generator(t));
  return out;
}

/// The code Hamiltonian -sum_j S_j.
inline PauliSum code_hamiltonian(const StabilizerCode& code) {
  std::vector<WeightedTerm> terms;
  for (const auto& g : code.generators) terms.push_back({-1.0, g});
  return PauliSum(code.n, std::move(terms));
}

/// Full-angle conjugation of every term by one primitive gate.
inline PauliSum conjugate_terms(const Gate& g, const PauliSum& h) {
  const PauliOp gen = g.generator(h.num_qubits());
  std::vector<WeightedTerm> out;
  for (const auto& t : h) out.push_back(WeightedTerm::from_signed(t.coeff, conjugate_rotation(gen, g.angle_sign(), t.pauli)));
  return PauliSum(h.num_qubits(), std::move(out));
}

/// Ground-space and group checks for swapping `before` for `after`.
inline std::vector<std::string> rewrite_violations(const PauliSum& before, const PauliSum& after) {
  std::vector<std::string> v;
  if (before.num_qubits() != after.num_qubits()) {
    v.push_back("rewrite changes the qubit count");
    return v;
  }
  if (before.size() != after.size()) v.push_back("rewrite changes the number of terms");
  const auto old_gens = signed_generators(before);
  const auto new_gens = signed_generators(after);
  for (std::size_t j = 0; j < new_gens.size(); ++j) {
    const auto d = group_membership(new_gens[j], old_gens);
    if (!d) {
      v.push_back("group mismatch: new term " + after[j].pauli.to_string(false) + " is outside the current group");
    } else if (d->phase != 0) {
      v.push_back("ground-space sign violation: new term " + std::to_string(j + 1) +
                  " is -1 on the current ground space");
    }
  }
  for (std::size_t j = 0; j < old_gens.size(); ++j)
    if (!group_membership(old_gens[j], new_gens))
      v.push_back("group mismatch: current term " + before[j].pauli.to_string(false) +
                  " is not generated by the new terms");
  return v;
}

/// Parses "<coefficient> <pauli>" lines ('#' comments) into a term list.
inline PauliSum parse_terms(const std::string& text, std::size_t n) {
  std::istringstream in(text);
  std::vector<WeightedTerm> terms;
  std::size_t lineno = 0;
  for (std::string raw; std::getline(in, raw);) {
    ++lineno;
    const auto tok = detail::split_ws(detail::strip_comment(raw));
    if (tok.empty()) continue;
    if (tok.size() != 2) throw ParseError(lineno, "expected '<coefficient> <pauli>'");
    double c = 0.0;
    try {
      std::size_t pos = 0;
      c = std::stod(tok[0], &pos);
      if (pos != tok[0].size()) throw std::invalid_argument(tok[0]);
    } catch (const std::exception&) {
      throw ParseError(lineno, "bad coefficient '" + tok[0] + "'");
    }
    PauliOp p = detail::parse_pauli_at(tok[1], lineno, n);
    if (!p.is_hermitian()) throw ParseError(lineno, "term must be Hermitian");
    terms.push_back(WeightedTerm::from_signed(c, p));
  }
  try {
    return PauliSum(n, std::move(terms));
  } catch (const DomainError& e) {
    throw ParseError(lineno, e.what());
  }
}

inline PauliSum load_terms(const std::string& path, std::size_t n) { return parse_terms(detail::read_file(path), n); }

namespace detail {

inline Stage build_stage(const Gate& gate, const PauliSum& incoming, std::optional<std::size_t> break_override,
                         double c_b, const RampSpec& ramp, double start, std::size_t stage_index) {
  const std::size_t n = incoming.num_qubits();
  const PauliOp gen = gate.generator(n);
  Stage st;
  st.gate = gate;
  st.incoming = incoming;
  st.ramp = ramp;
  st.start_time = start;
  for (std::size_t j = 0; j < incoming.size(); ++j)
    (commutes(gen, incoming[j].pauli) ? st.commuting : st.anticommuting).push_back(j);

  const std::string where = "stage " + std::to_string(stage_index + 1) + " (" + gate.to_string() + ")";
  if (st.anticommuting.empty()) {
    if (group_membership(gen, signed_generators(incoming)))
      throw DomainError(where + ": generator lies in the current stabilizer group (trivial gate)");
    throw DomainError(where + ": generator commutes with every term but is outside the group: logical operator - "
                      "scheme inapplicable");
  }
  if (st.anticommuting.size() % 2 == 0) {
    if (!(c_b > 0.0 && c_b < 1.0)) throw DomainError("degeneracy-break constant must lie in (0, 1)");
    const std::size_t b = break_override.value_or(st.anticommuting.front());
    if (std::find(st.anticommuting.begin(), st.anticommuting.end(), b) == st.anticommuting.end())
      throw DomainError(where + ": break term " + std::to_string(b + 1) + " does not anticommute with the gate");
    st.break_info = BreakInfo{b, c_b};
  } else if (break_override) {
    throw DomainError(where + ": break override given but the anticommuting set is odd");
  }

  for (std::size_t j = 0; j < incoming.size(); ++j) {
    WeightedTerm t = incoming[j];
    if (st.break_info && st.break_info->index == j) t.coeff *= 1.0 - c_b;
    if (commutes(gen, t.pauli)) {
      st.terms.push_back({t.coeff, t.pauli, 0.0, std::nullopt});
    } else {
      const auto pair = partial_rotation_terms(gen, gate.angle_sign(), t);
      st.terms.push_back({pair.cos_term.coeff, pair.cos_term.pauli, pair.sin_term.coeff, pair.sin_term.pauli});
    }
  }
  st.outgoing = conjugate_terms(gate, incoming);
  return st;
}

}  // namespace detail

/// Compiles an audited, macro-expanded circuit into a stage-per-gate schedule.
inline Schedule synthesize(const StabilizerCode& code, const Circuit& circuit, const SynthesisOptions& opts = {}) {
  const auto report = validate(code);
  if (!report.ok()) throw DomainError("invalid code: " + report.violations.front());
  if (circuit.n != code.n) throw SizeMismatch(code.n, circuit.n);
  const Circuit expanded = expand_macros(circuit);
  if (opts.ramp.duration <= 0.0) throw DomainError("stage duration must be positive");

  if (!opts.skip_audit) {
    const ErrorSet e_local = opts.local_errors ? *opts.local_errors : default_local_errors(code);
    const auto audit = audit_fault_tolerance(code, expanded, e_local);
    if (!audit.gate_validity_ok()) throw DomainError("audit failed: " + audit.gate_issues.front().message);
    if (!audit.containment_ok())
      throw DomainError("audit failed: error " + audit.containment_failures.front().error.to_string(false) +
                        " injected after gate " + std::to_string(audit.containment_failures.front().injection_point) +
                        " is not corrected");
  }
  for (const auto& [stage, term] : opts.break_overrides)
    if (stage >= expanded.size()) throw DomainError("break override names stage " + std::to_string(stage + 1) +
                                                    " but the circuit has " + std::to_string(expanded.size()));
  for (const auto& [stage, d] : opts.stage_durations)
    if (stage >= expanded.size() || !(d > 0.0))
      throw DomainError("invalid duration override for stage " + std::to_string(stage + 1));

  Schedule s;
  s.code = code;
  s.circuit = expanded;
  s.initial = code_hamiltonian(code);
  s.audit_skipped = opts.skip_audit;

  PauliSum current = s.initial;
  double t = 0.0;
  auto apply_rewrite = [&](std::size_t boundary) {
    for (const auto& [at, terms] : opts.rewrites) {
      if (at != boundary) continue;
      const auto v = rewrite_violations(current, terms);
      if (!v.empty()) throw DomainError("rewrite at boundary " + std::to_string(boundary) + ": " + v.front());
      s.rewrites.push_back({boundary, current, terms});
      current = terms;
    }
  };
  for (std::size_t l = 0; l < expanded.size(); ++l) {
    apply_rewrite(l);
    RampSpec ramp = opts.ramp;
    if (auto it = opts.stage_durations.find(l); it != opts.stage_durations.end()) ramp.duration = it->second;
    std::optional<std::size_t> override_b;
    if (auto it = opts.break_overrides.find(l); it != opts.break_overrides.end()) override_b = it->second;
    s.stages.push_back(detail::build_stage(expanded.gates[l], current, override_b, opts.c_b, ramp, t, l));
    current = s.stages.back().outgoing;
    t = s.stages.back().end_time();
  }
  apply_rewrite(expanded.size());
  for (const auto& [at, terms] : opts.rewrites)
    if (at > expanded.size()) throw DomainError("rewrite boundary " + std::to_string(at) + " is past the last stage");
  s.final_terms = current;
  return s;
}

/// Rebuilds the schedule with an extra generator rewrite at `boundary`. An
/// identity rewrite returns the schedule unchanged.
inline Schedule rewrite_generators(const Schedule& schedule, std::size_t boundary, const PauliSum& new_terms,
                                   double c_b = 0.5) {
  if (boundary > schedule.stages.size()) throw DomainError("rewrite boundary past the end of the schedule");
  const PauliSum& current = boundary < schedule.stages.size() ? schedule.stages[boundary].incoming : schedule.final_terms;
  if (new_terms == current) return schedule;
  SynthesisOptions opts;
  opts.skip_audit = true;
  opts.c_b = c_b;
  for (std::size_t l = 0; l < schedule.stages.size(); ++l) {
    const Stage& st = schedule.stages[l];
    opts.stage_durations[l] = st.ramp.duration;
    if (l == 0) opts.ramp = st.ramp;
    if (st.break_info) {
      opts.c_b = st.break_info->c_b;
      // Stages before the swap keep their breaks verbatim; later ones re-derive them.
      if (l < boundary) opts.break_overrides[l] = st.break_info->index;
    }
  }
  for (const auto& r : schedule.rewrites) opts.rewrites.emplace_back(r.boundary, r.after);
  opts.rewrites.emplace_back(boundary, new_terms);
  Schedule out = synthesize(schedule.code, schedule.circuit, opts);
  for (std::size_t l = 0; l < out.stages.size(); ++l) out.stages[l].ramp.family = schedule.stages[l].ramp.family;
  out.audit_skipped = schedule.audit_skipped;
  return out;
}

/// Terms of one stage at ramp value f, dropping terms whose coefficient is exactly zero.
inline PauliSum stage_hamiltonian(const Stage& st, double f) {
  const auto [c, s] = quarter_cos_sin(f);
  std::vector<WeightedTerm> out;
  for (const auto& t : st.terms) {
    if (!t.rotates()) {
      out.push_back({t.coeff, t.pauli});
      continue;
    }
    if (c != 0.0) out.push_back({t.coeff * c, t.pauli});
    if (s != 0.0) out.push_back({t.partner_coeff * s, *t.partner});
  }
  return PauliSum(st.incoming.num_qubits(), std::move(out));
}

/// Index of the stage active at time t; at a boundary the later stage wins.
inline std::size_t stage_at(const Schedule& s, double t) {
  if (s.stages.empty() || t < 0.0 || t > s.total_time())
    throw DomainError("time " + std::to_string(t) + " outside [0, " + std::to_string(s.total_time()) + "]");
  std::size_t l = 0;
  while (l + 1 < s.stages.size() && t >= s.stages[l + 1].start_time) ++l;
  return l;
}

/// Ramp value of stage l at time t.
inline double ramp_at(const Stage& st, double t) { return st.ramp.value((t - st.start_time) / st.ramp.duration); }

inline PauliSum hamiltonian_at(const Schedule& s, double t) {
  if (s.stages.empty()) {
    if (t != 0.0) throw DomainError("time outside an empty schedule");
    return s.final_terms;
  }
  if (t == s.total_time()) return s.final_terms;
  const Stage& st = s.stages[stage_at(s, t)];
  return stage_hamiltonian(st, ramp_at(st, t));
}

/// Renders a stage as "c cos P + c' sin P' + c Q" with 1-based qubit strings.
inline std::string format_stage(const Stage& st) {
  std::string out;
  auto emit = [&](double c, const std::string& trig, const PauliOp& p) {
    std::string num = std::to_string(std::abs(c));
    num.erase(num.find_last_not_of('0') + 1);
    if (num.back() == '.') num.pop_back();
    out += (out.empty() ? (c < 0 ? "-" : "") : (c < 0 ? " - " : " + "));
    if (num != "1") out += num + (trig.empty() ? " " : "");
    out += trig + (trig.empty() ? "" : " ") + p.to_string(false);
  };
  for (const auto& t : st.terms) {
    if (t.rotates()) {
      emit(t.coeff, "cos", t.pauli);
      emit(t.partner_coeff, "sin", *t.partner);
    } else {
      emit(t.coeff, "", t.pauli);
    }
  }
  return out;
}

/// Eigenvalues of one stage, indexed by label bitmask (bit j set means s_j = -1).
/// Label s_j is the eigenvalue of -sign(c_j) P_j, so all-zero is the ground label.
struct StageSpectrum {
  std::vector<double> magnitudes;  // |c_j| with the break applied
  std::vector<double> energies;
  std::size_t multiplicity = 1;  // 2^(n - #terms)

  double ground_energy() const { return energies.at(0); }
  std::vector<int> labels(std::size_t index) const {
    std::vector<int> s(magnitudes.size());
    for (std::size_t j = 0; j < s.size(); ++j) s[j] = ((index >> j) & 1u) ? -1 : 1;
    return s;
  }
};

inline constexpr std::size_t kMaxSpectrumTerms = 24;

inline std::vector<double> stage_magnitudes(const Stage& st) {
  std::vector<double> m;
  for (const auto& t : st.terms) m.push_back(std::abs(t.coeff));
  return m;
}

inline StageSpectrum stage_spectrum(const Schedule& s, std::size_t stage) {
  const Stage& st = s.stages.at(stage);
  StageSpectrum out;
  out.magnitudes = stage_magnitudes(st);
  const std::size_t m = out.magnitudes.size();
  if (m > kMaxSpectrumTerms) throw DomainError("spectrum enumeration guard: " + std::to_string(m) + " terms");
  if (m > s.num_qubits()) throw DomainError("more terms than qubits");
  out.multiplicity = std::size_t{1} << (s.num_qubits() - m);
  out.energies.resize(std::size_t{1} << m);
  for (std::size_t idx = 0; idx < out.energies.size(); ++idx) {
    double e = 0.0;
    for (std::size_t j = 0; j < m; ++j) e += ((idx >> j) & 1u) ? out.magnitudes[j] : -out.magnitudes[j];
    out.energies[idx] = e;
  }
  return out;
}

struct GapEntry {
  std::size_t stage = 0;  // 0-based
  std::size_t anticommuting = 0;
  bool broken = false;
  double ground_energy = 0.0;
  double ground_gap = 0.0;
  double coupled_gap = 0.0;
};

/// Ground gap and the minimum gap between labels the gate couples (all
/// anticommuting signs flipped), per stage.
inline std::vector<GapEntry> gap_report(const Schedule& s) {
  std::vector<GapEntry> out;
  for (std::size_t l = 0; l < s.stages.size(); ++l) {
    const Stage& st = s.stages[l];
    const StageSpectrum sp = stage_spectrum(s, l);
    std::size_t flip = 0;
    for (auto j : st.anticommuting) flip |= std::size_t{1} << j;
    GapEntry g{l, st.anticommuting.size(), st.break_info.has_value(), sp.ground_energy(), 0.0, 0.0};
    g.ground_gap = std::numeric_limits<double>::infinity();
    g.coupled_gap = std::numeric_limits<double>::infinity();
    for (std::size_t idx = 0; idx < sp.energies.size(); ++idx) {
      if (idx != 0) g.ground_gap = std::min(g.ground_gap, sp.energies[idx] - sp.ground_energy());
      g.coupled_gap = std::min(g.coupled_gap, std::abs(sp.energies[idx] - sp.energies[idx ^ flip]));
    }
    if (sp.energies.size() == 1) g.ground_gap = 0.0;
    out.push_back(g);
  }
  return out;
}

struct WeightReport {
  std::size_t overall = 0;
  std::vector<std::size_t> per_stage;
};

/// Largest weight among every term that appears at some f in [0, 1].
inline WeightReport max_weight(const Schedule& s) {
  WeightReport r;
  for (const auto& t : s.initial) r.overall = std::max(r.overall, weight(t.pauli));
  for (const auto& st : s.stages) {
    std::size_t w = 0;
    for (const auto& t : st.terms) {
      w = std::max(w, weight(t.pauli));
      if (t.partner) w = std::max(w, weight(*t.partner));
    }
    for (const auto& t : st.outgoing) w = std::max(w, weight(t.pauli));
    r.per_stage.push_back(w);
    r.overall = std::max(r.overall, w);
  }
  for (const auto& rw : s.rewrites)
    for (const auto& t : rw.after) r.overall = std::max(r.overall, weight(t.pauli));
  return r;
}

namespace detail {

/// Terms sorted into a canonical order for multiset comparison.
inline std::vector<WeightedTerm> canonical_terms(const PauliSum& h) {
  std::vector<WeightedTerm> v = h.terms();
  std::sort(v.begin(), v.end(), [](const WeightedTerm& a, const WeightedTerm& b) {
    if (!a.pauli.same_masks(b.pauli)) return lexicographic_less(a.pauli, b.pauli);
    return a.coeff < b.coeff;
  });
  return v;
}

}  // namespace detail

inline bool same_term_multiset(const PauliSum& a, const PauliSum& b) {
  return a.num_qubits() == b.num_qubits() && detail::canonical_terms(a) == detail::canonical_terms(b);
}

struct ScheduleReport {
  std::vector<std::string> violations;
  bool cyclic = false;                  // endpoint terms equal the initial terms
  bool endpoint_same_group = false;     // endpoint generates the same signed group

  bool ok() const noexcept { return violations.empty(); }
};

inline ScheduleReport validate_schedule(const Schedule& s) {
  ScheduleReport r;
  auto fail = [&](std::string m) { r.violations.push_back(std::move(m)); };
  if (!same_term_multiset(s.initial, code_hamiltonian(s.code))) fail("initial terms are not -sum of the code generators");
  if (s.stages.size() != s.circuit.size()) fail("stage count differs from the gate count");

  PauliSum current = s.initial;
  double t = 0.0;
  for (std::size_t l = 0; l <= s.stages.size(); ++l) {
    if (const Rewrite* rw = s.rewrite_at(l)) {
      if (!(rw->before == current)) fail("rewrite at boundary " + std::to_string(l) + " does not start from the chained terms");
      for (const auto& v : rewrite_violations(rw->before, rw->after)) fail("rewrite at boundary " + std::to_string(l) + ": " + v);
      current = rw->after;
    }
    if (l == s.stages.size()) break;
    const Stage& st = s.stages[l];
    const std::string where = "stage " + std::to_string(l + 1);
    if (l < s.circuit.size() && !(st.gate == s.circuit.gates[l])) fail(where + ": gate differs from the circuit");
    if (!(st.incoming == current)) fail(where + ": incoming terms do not chain from the previous stage");
    if (std::abs(st.start_time - t) > 1e-12 * std::max(1.0, t)) fail(where + ": start time does not chain");
    if (!(st.ramp.duration > 0.0)) fail(where + ": duration must be positive");
    if (st.ramp.value(0.0) != 0.0 || st.ramp.value(1.0) != 1.0) fail(where + ": ramp boundary values");
    if (st.anticommuting.size() + st.commuting.size() != st.incoming.size()) fail(where + ": A and B do not partition the terms");
    const PauliOp gen = st.gate.generator(s.num_qubits());
    for (auto j : st.anticommuting)
      if (j >= st.incoming.size() || commutes(gen, st.incoming[j].pauli)) fail(where + ": bad anticommuting index");
    for (auto j : st.commuting)
      if (j >= st.incoming.size() || !commutes(gen, st.incoming[j].pauli)) fail(where + ": bad commuting index");
    const bool even = st.anticommuting.size() % 2 == 0;
    if (even != st.break_info.has_value()) fail(where + ": break present iff the anticommuting set is even");
    if (st.break_info) {
      const auto& b = *st.break_info;
      if (std::find(st.anticommuting.begin(), st.anticommuting.end(), b.index) == st.anticommuting.end())
        fail(where + ": break index outside the anticommuting set");
      if (!(b.c_b > 0.0 && b.c_b < 1.0)) fail(where + ": break constant outside (0, 1)");
    }
    if (st.terms.size() != st.incoming.size()) {
      fail(where + ": interpolated term count");
    } else {
      for (std::size_t j = 0; j < st.terms.size(); ++j) {
        const auto& it = st.terms[j];
        const double scale = (st.break_info && st.break_info->index == j) ? 1.0 - st.break_info->c_b : 1.0;
        if (!it.pauli.same_masks(st.incoming[j].pauli) || it.coeff != st.incoming[j].coeff * scale)
          fail(where + ": interpolated term " + std::to_string(j + 1) + " does not start at the incoming term");
        if (it.rotates() != !commutes(gen, st.incoming[j].pauli))
          fail(where + ": term " + std::to_string(j + 1) + " rotation flag");
        if (it.rotates()) {
          const auto expect = partial_rotation_terms(gen, st.gate.angle_sign(), {it.coeff, it.pauli}).sin_term;
          if (!(expect == WeightedTerm{it.partner_coeff, *it.partner}))
            fail(where + ": term " + std::to_string(j + 1) + " partner is not the full-angle image");
        }
      }
    }
    if (!(st.outgoing == conjugate_terms(st.gate, st.incoming))) fail(where + ": outgoing terms are not the full-angle image");
    current = st.outgoing;
    t = st.end_time();
  }
  if (!(current == s.final_terms)) fail("final terms do not chain from the last stage");
  r.cyclic = same_term_multiset(s.final_terms, s.initial);
  r.endpoint_same_group = rewrite_violations(s.initial, s.final_terms).empty();
  if (!r.cyclic)
    fail(std::string("cyclicity: final terms differ from the initial terms") +
         (r.endpoint_same_group ? " (same stabilizer group, different representation)" : ""));
  return r;
}

}  // namespace hqc
