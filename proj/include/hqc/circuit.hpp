#pragma once

// Clifford circuits over {RX, RZZ, S} with H, X and CNOT macros: parsing,
// Pauli propagation, the fault-tolerance audit, and the exact logical action.

#include <Eigen/Dense>

#include <algorithm>
#include <cctype>
#include <sstream>
#include <string>
#include <vector>

#include "hqc/code.hpp"
#include "hqc/errors.hpp"
#include "hqc/pauli.hpp"
#include "hqc/state.hpp"

namespace hqc {

using ComplexMatrix = Eigen::MatrixXcd;

enum class GateKind { RX, RZZ, S, H, X, CNOT };

/// Gate acting on 0-based qubits. Primitive gates equal exp(-i*angle_sign*pi/4*generator).
struct Gate {
  GateKind kind = GateKind::RX;
  std::size_t q1 = 0;
  std::size_t q2 = 0;

  static Gate rx(std::size_t q) { return {GateKind::RX, q, 0}; }
  static Gate s(std::size_t q) { return {GateKind::S, q, 0}; }
  static Gate rzz(std::size_t a, std::size_t b) { return {GateKind::RZZ, a, b}; }

  bool is_primitive() const noexcept { return kind == GateKind::RX || kind == GateKind::RZZ || kind == GateKind::S; }
  bool is_two_qubit() const noexcept { return kind == GateKind::RZZ || kind == GateKind::CNOT; }

  PauliOp generator(std::size_t n) const {
    switch (kind) {
      case GateKind::RX: return PauliOp::single(n, q1, 'X');
      case GateKind::S: return PauliOp::single(n, q1, 'Z');
      case GateKind::RZZ: {
        PauliOp p = PauliOp::single(n, q1, 'Z');
        p.set_letter(q2, 'Z');
        return p;
      }
      default: throw DomainError("macro gate " + to_string() + " has no generator; expand it first");
    }
  }

  /// +1 for RX and S, -1 for RZZ = exp(+i*pi/4*ZZ).
  int angle_sign() const {
    if (!is_primitive()) throw DomainError("macro gate " + to_string() + " has no angle sign");
    return kind == GateKind::RZZ ? -1 : 1;
  }

  std::string mnemonic() const {
    switch (kind) {
      case GateKind::RX: return "RX";
      case GateKind::RZZ: return "RZZ";
      case GateKind::S: return "S";
      case GateKind::H: return "H";
      case GateKind::X: return "X";
      case GateKind::CNOT: return "CNOT";
    }
    return "?";
  }

  /// Human-facing form with 1-based qubits, e.g. "RZZ 1 8".
  std::string to_string() const {
    std::string s = mnemonic() + " " + std::to_string(q1 + 1);
    if (is_two_qubit()) s += " " + std::to_string(q2 + 1);
    return s;
  }

  friend bool operator==(const Gate&, const Gate&) = default;
};

struct Circuit {
  std::size_t n = 0;
  std::vector<Gate> gates;

  std::size_t size() const noexcept { return gates.size(); }
  bool is_primitive() const {
    return std::all_of(gates.begin(), gates.end(), [](const Gate& g) { return g.is_primitive(); });
  }
};

/// Rewrites H, X and CNOT into RX/RZZ/S sequences; each expansion matches the
/// macro up to a global phase.
inline Circuit expand_macros(const Circuit& c) {
  Circuit out{c.n, {}};
  for (const Gate& g : c.gates) {
    switch (g.kind) {
      case GateKind::X:
        out.gates.insert(out.gates.end(), {Gate::rx(g.q1), Gate::rx(g.q1)});
        break;
      case GateKind::H:
        out.gates.insert(out.gates.end(), {Gate::s(g.q1), Gate::rx(g.q1), Gate::s(g.q1)});
        break;
      case GateKind::CNOT: {
        const std::size_t ctl = g.q1, tgt = g.q2;
        out.gates.insert(out.gates.end(), {Gate::s(tgt), Gate::rx(tgt), Gate::s(tgt), Gate::s(tgt), Gate::rzz(ctl, tgt),
                                           Gate::s(ctl), Gate::s(tgt), Gate::rx(tgt), Gate::s(tgt)});
        break;
      }
      default:
        out.gates.push_back(g);
    }
  }
  return out;
}

/// One gate per line, 1-based qubits: RX q, RZZ a b, S q, H q, X q, CNOT c t.
/// Macros are expanded. '#' starts a comment.
inline Circuit parse_circuit(const std::string& text, std::size_t n) {
  Circuit c{n, {}};
  std::istringstream in(text);
  std::size_t lineno = 0;
  for (std::string raw; std::getline(in, raw);) {
    ++lineno;
    auto tok = detail::split_ws(detail::strip_comment(raw));
    if (tok.empty()) continue;
    std::string m = tok[0];
    std::transform(m.begin(), m.end(), m.begin(), [](unsigned char ch) { return std::toupper(ch); });
    if (m == "T" || m == "TDG" || m == "PI8" || m == "PI/8" || m == "T\xE2\x80\xA0")
      throw ParseError(lineno, "pi/8 gate '" + tok[0] +
                                   "' rejected: adiabatic schedules are only defined for Clifford circuits "
                                   "(RX, RZZ, S and the H/X/CNOT macros)");
    GateKind kind;
    std::size_t arity = 1;
    if (m == "RX") kind = GateKind::RX;
    else if (m == "S") kind = GateKind::S;
    else if (m == "H") kind = GateKind::H;
    else if (m == "X") kind = GateKind::X;
    else if (m == "RZZ") kind = GateKind::RZZ, arity = 2;
    else if (m == "CNOT" || m == "CX") kind = GateKind::CNOT, arity = 2;
    else throw ParseError(lineno, "unknown gate mnemonic '" + tok[0] + "'");
    if (tok.size() != arity + 1)
      throw ParseError(lineno, m + " takes " + std::to_string(arity) + " qubit index" + (arity > 1 ? "es" : ""));
    std::size_t qs[2] = {0, 0};
    for (std::size_t a = 0; a < arity; ++a) {
      const std::size_t q = detail::parse_count(tok[a + 1], lineno);
      if (q < 1 || q > n)
        throw ParseError(lineno, "qubit index " + tok[a + 1] + " out of range 1.." + std::to_string(n));
      qs[a] = q - 1;
    }
    if (arity == 2 && qs[0] == qs[1]) throw ParseError(lineno, m + " needs two distinct qubits");
    c.gates.push_back({kind, qs[0], qs[1]});
  }
  return expand_macros(c);
}

inline Circuit load_circuit(const std::string& path, std::size_t n) { return parse_circuit(detail::read_file(path), n); }

inline std::string format_circuit(const Circuit& c) {
  std::string out;
  for (const auto& g : c.gates) out += g.to_string() + "\n";
  return out;
}

/// Conjugates e through gates [from_index, end): the error injected after the
/// first `from_index` gates, seen at the end of the circuit.
inline PauliOp propagate_pauli(const Circuit& c, std::size_t from_index, const PauliOp& e) {
  if (e.num_qubits() != c.n) throw SizeMismatch(c.n, e.num_qubits());
  if (from_index > c.gates.size()) throw DomainError("propagate_pauli: injection index past the end of the circuit");
  PauliOp cur = e;
  for (std::size_t i = from_index; i < c.gates.size(); ++i) {
    const Gate& g = c.gates[i];
    cur = conjugate_rotation(g.generator(c.n), g.angle_sign(), cur);
  }
  return cur;
}

/// Conjugates each signed generator through one gate.
inline std::vector<PauliOp> conjugate_all(const Gate& g, std::size_t n, const std::vector<PauliOp>& ops) {
  const PauliOp gen = g.generator(n);
  std::vector<PauliOp> out;
  out.reserve(ops.size());
  for (const auto& op : ops) out.push_back(conjugate_rotation(gen, g.angle_sign(), op));
  return out;
}

struct GateIssue {
  std::size_t stage = 0;  // 1-based
  Gate gate;
  bool logical_operator = false;  // false: the generator lies in the current group
  std::string message;
};

struct ContainmentFailure {
  PauliOp error;
  std::size_t injection_point = 0;  // number of gates applied before the error
  PauliOp propagated;
  Syndrome syndrome;
  PauliOp correction;
};

struct AuditReport {
  std::vector<GateIssue> gate_issues;
  std::vector<ContainmentFailure> containment_failures;
  std::size_t checked_propagations = 0;

  bool gate_validity_ok() const noexcept { return gate_issues.empty(); }
  bool containment_ok() const noexcept { return containment_failures.empty(); }
  bool passed() const noexcept { return gate_validity_ok() && containment_ok(); }
};

/// Validity of one stage against the current (signed) generators; nullopt when fine.
inline std::optional<GateIssue> check_stage_gate(const Gate& g, std::size_t n, const std::vector<PauliOp>& current,
                                                 std::size_t stage) {
  const PauliOp gen = g.generator(n);
  const bool anticommutes_any =
      std::any_of(current.begin(), current.end(), [&](const PauliOp& s) { return !commutes(gen, s); });
  if (anticommutes_any) return std::nullopt;
  const bool in_group = group_membership(gen, current).has_value();
  GateIssue issue{stage, g, !in_group, ""};
  issue.message = in_group
                      ? "stage " + std::to_string(stage) + " (" + g.to_string() + "): generator " +
                            gen.to_string(false) + " lies in the current stabilizer group (trivial gate)"
                      : "stage " + std::to_string(stage) + " (" + g.to_string() + "): generator " +
                            gen.to_string(false) +
                            " commutes with every stabilizer generator but is outside the group: logical operator "
                            "- scheme inapplicable";
  return issue;
}

/// Check (a): every gate generator anticommutes with some current generator.
/// Check (b): every local error, injected at every gate boundary and carried to
/// the end, is fixed by the lookup decoder up to a stabilizer.
inline AuditReport audit_fault_tolerance(const StabilizerCode& code, const Circuit& circuit, const ErrorSet& e_local) {
  if (!circuit.is_primitive()) throw DomainError("audit_fault_tolerance requires a macro-expanded circuit");
  if (circuit.n != code.n) throw SizeMismatch(code.n, circuit.n);
  AuditReport report;

  std::vector<PauliOp> current = code.generators;
  for (std::size_t l = 0; l < circuit.gates.size(); ++l) {
    if (auto issue = check_stage_gate(circuit.gates[l], code.n, current, l + 1))
      report.gate_issues.push_back(std::move(*issue));
    current = conjugate_all(circuit.gates[l], code.n, current);
  }

  const SyndromeTable decoder = build_decoder(code);
  for (const auto& e : e_local.elements) {
    for (std::size_t q = 0; q <= circuit.gates.size(); ++q) {
      const PauliOp f = propagate_pauli(circuit, q, e);
      ++report.checked_propagations;
      const Syndrome s = syndrome(code, f);
      const PauliOp& corr = decoder.correction(s);
      if (!group_membership(corr * f, code.generators))
        report.containment_failures.push_back({e, q, f, s, corr});
    }
  }
  return report;
}

/// Applies the circuit exactly, one quarter rotation per gate.
inline StateVector apply_circuit(const Circuit& c, StateVector v, std::size_t from = 0,
                                 std::size_t to = static_cast<std::size_t>(-1)) {
  to = std::min(to, c.gates.size());
  for (std::size_t i = from; i < to; ++i) {
    const Gate& g = c.gates[i];
    v = apply_quarter_rotation(g.generator(c.n), g.angle_sign(), v);
  }
  return v;
}

/// <basis_i| U |basis_j> for the circuit unitary U restricted to the code space.
inline ComplexMatrix logical_action_oracle(const StabilizerCode& code, const Circuit& circuit,
                                           double leakage_tolerance = 1e-10) {
  if (!circuit.is_primitive()) throw DomainError("logical_action_oracle requires a macro-expanded circuit");
  const auto basis = codeword_basis(code);
  const std::size_t K = basis.size();
  ComplexMatrix m(K, K);
  for (std::size_t j = 0; j < K; ++j) {
    const StateVector out = apply_circuit(circuit, basis[j]);
    double captured = 0.0;
    for (std::size_t i = 0; i < K; ++i) {
      m(i, j) = inner(basis[i], out);
      captured += std::norm(m(i, j));
    }
    if (1.0 - captured > leakage_tolerance)
      throw DomainError("circuit leaks " + std::to_string(1.0 - captured) + " of codeword " + std::to_string(j) +
                        " out of the code space");
  }
  return m;
}

}  // namespace hqc
