#include <gtest/gtest.h>

#include <random>

#include "corpus.hpp"
#include "dense_oracle.hpp"
#include "hqc/circuit.hpp"

namespace hqc {
namespace {

using testing::corpus_circuit;
using testing::corpus_code;
using testing::dense;
using testing::Mat;

PauliOp P(const char* s) { return PauliOp::parse(s); }

double phase_infidelity(const Mat& a, const Mat& b) { return 1.0 - std::abs((a.adjoint() * b).trace()) / a.rows(); }

Mat dense_unitary(const Circuit& c) {
  const std::size_t dim = std::size_t{1} << c.n;
  Mat u = Mat::Identity(dim, dim);
  for (const auto& g : c.gates) u = testing::quarter_rotation(g.generator(c.n), g.angle_sign()) * u;
  return u;
}

// Textbook matrices built from computational-basis action.
Mat dense_macro(const Gate& g, std::size_t n) {
  const std::size_t dim = std::size_t{1} << n;
  Mat u = Mat::Zero(dim, dim);
  switch (g.kind) {
    case GateKind::X: return dense(PauliOp::single(n, g.q1, 'X'));
    case GateKind::H:
      return std::sqrt(0.5) * (dense(PauliOp::single(n, g.q1, 'X')) + dense(PauliOp::single(n, g.q1, 'Z')));
    case GateKind::CNOT:
      for (std::size_t j = 0; j < dim; ++j) u(((j >> g.q1) & 1) ? j ^ (std::size_t{1} << g.q2) : j, j) = 1.0;
      return u;
    default: throw std::logic_error("not a macro");
  }
}

TEST(Circuit, ParseExamples) {
  const Circuit c = parse_circuit("RX 1\nRX 1\nRX 2\nRX 2\nRX 3\nRX 3\n", 3);
  ASSERT_EQ(c.size(), 6u);
  EXPECT_EQ(c.gates[2], Gate::rx(1));

  const Circuit h = parse_circuit("H 2", 3);
  EXPECT_EQ(h.gates, (std::vector<Gate>{Gate::s(1), Gate::rx(1), Gate::s(1)}));

  EXPECT_EQ(parse_circuit("X 1", 1).gates, (std::vector<Gate>{Gate::rx(0), Gate::rx(0)}));
  EXPECT_TRUE(parse_circuit("# nothing\n\n", 2).gates.empty());
  EXPECT_EQ(parse_circuit("rzz 1 3 # comment", 3).gates, (std::vector<Gate>{Gate::rzz(0, 2)}));
}

TEST(Circuit, ParseRejectsPiOverEightAndBadInput) {
  try {
    parse_circuit("RX 1\nT 1\n", 1);
    FAIL() << "expected rejection";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_NE(std::string(e.what()).find("Clifford"), std::string::npos);
  }
  EXPECT_THROW(parse_circuit("TDG 1", 1), ParseError);
  EXPECT_THROW(parse_circuit("FOO 1", 1), ParseError);
  EXPECT_THROW(parse_circuit("RX 4", 3), ParseError);
  EXPECT_THROW(parse_circuit("RX 0", 3), ParseError);
  EXPECT_THROW(parse_circuit("RZZ 1 1", 3), ParseError);
  EXPECT_THROW(parse_circuit("RZZ 1", 3), ParseError);
}

TEST(Circuit, CnotExpandsToNineGates) {
  const Circuit c = expand_macros(Circuit{2, {{GateKind::CNOT, 0, 1}}});
  const std::vector<Gate> expected = {Gate::s(1),      Gate::rx(1), Gate::s(1), Gate::s(1),  Gate::rzz(0, 1),
                                      Gate::s(0),      Gate::s(1),  Gate::rx(1), Gate::s(1)};
  EXPECT_EQ(c.gates, expected);
  EXPECT_TRUE(expand_macros(Circuit{2, {}}).gates.empty());
  EXPECT_EQ(format_circuit(c).substr(0, 4), "S 2\n");
}

TEST(Circuit, MacroExpansionsMatchTextbookUnitaries) {
  for (std::size_t n = 1; n <= 3; ++n) {
    std::vector<Gate> macros;
    for (std::size_t q = 0; q < n; ++q) {
      macros.push_back({GateKind::H, q, 0});
      macros.push_back({GateKind::X, q, 0});
      for (std::size_t t = 0; t < n; ++t)
        if (t != q) macros.push_back({GateKind::CNOT, q, t});
    }
    const double dim = static_cast<double>(std::size_t{1} << n);
    for (const auto& g : macros) {
      const Mat expanded = dense_unitary(expand_macros(Circuit{n, {g}}));
      const Mat target = dense_macro(g, n);
      EXPECT_NEAR(std::abs((target.adjoint() * expanded).trace()) / dim, 1.0, 1e-12) << g.to_string() << " n=" << n;
    }
  }
}

TEST(Circuit, CnotExpansionConjugatesLikeCnot) {
  const Circuit c = expand_macros(Circuit{2, {{GateKind::CNOT, 0, 1}}});
  EXPECT_EQ(propagate_pauli(c, 0, P("XI")), P("XX"));
  EXPECT_EQ(propagate_pauli(c, 0, P("IX")), P("IX"));
  EXPECT_EQ(propagate_pauli(c, 0, P("IZ")), P("ZZ"));
  EXPECT_EQ(propagate_pauli(c, 0, P("ZI")), P("ZI"));
}

TEST(Circuit, PropagateExamples) {
  const Circuit xbar = corpus_circuit("rep3_xbar.circ", 3);
  EXPECT_EQ(propagate_pauli(xbar, 2, P("IXI")), P("IXI"));
  EXPECT_EQ(propagate_pauli(xbar, xbar.size(), P("-ZZI")), P("-ZZI"));
  EXPECT_THROW(propagate_pauli(xbar, 7, P("IXI")), DomainError);
  EXPECT_THROW(propagate_pauli(xbar, 0, P("XI")), SizeMismatch);
}

TEST(Circuit, PropagateMatchesDenseConjugation) {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + trial % 3;
    Circuit c{n, {}};
    const int len = static_cast<int>(rng() % 8);
    for (int i = 0; i < len; ++i) {
      const std::size_t q = rng() % n;
      switch (rng() % 3) {
        case 0: c.gates.push_back(Gate::rx(q)); break;
        case 1: c.gates.push_back(Gate::s(q)); break;
        default:
          if (n > 1) c.gates.push_back(Gate::rzz(q, (q + 1 + rng() % (n - 1)) % n));
      }
    }
    const std::size_t from = rng() % (c.size() + 1);
    Circuit suffix{n, std::vector<Gate>(c.gates.begin() + static_cast<std::ptrdiff_t>(from), c.gates.end())};
    const PauliOp e = testing::random_pauli(rng, n, true);
    const Mat u = dense_unitary(suffix);
    EXPECT_TRUE(dense(propagate_pauli(c, from, e)).isApprox(u * dense(e) * u.adjoint(), 1e-12));
  }
}

TEST(Circuit, AuditRepetitionXbarPasses) {
  const auto code = corpus_code("rep3.code");
  const auto report = audit_fault_tolerance(code, corpus_circuit("rep3_xbar.circ", 3), local_error_set(code, 1, "X"));
  EXPECT_TRUE(report.passed());
  EXPECT_EQ(report.checked_propagations, 3u * 7u);
}

TEST(Circuit, AuditRepetitionZbarFailsGateValidity) {
  const auto code = corpus_code("rep3.code");
  const auto report = audit_fault_tolerance(code, corpus_circuit("rep3_zbar.circ", 3), local_error_set(code, 1, "X"));
  EXPECT_FALSE(report.gate_validity_ok());
  ASSERT_FALSE(report.gate_issues.empty());
  const auto& first = report.gate_issues.front();
  EXPECT_EQ(first.stage, 1u);
  EXPECT_TRUE(first.logical_operator);
  EXPECT_NE(first.message.find("logical operator"), std::string::npos);
  EXPECT_NE(first.message.find("scheme inapplicable"), std::string::npos);
}

TEST(Circuit, AuditFlagsTrivialGate) {
  const Circuit c{3, {Gate::rzz(0, 1)}};
  const auto issue = check_stage_gate(c.gates[0], 3, {P("ZZI"), P("IZZ")}, 1);
  ASSERT_TRUE(issue);
  EXPECT_FALSE(issue->logical_operator);
}

TEST(Circuit, AuditSteaneTransversalPasses) {
  const auto code = corpus_code("steane.code");
  const auto e_local = local_error_set(code, 1);
  for (const char* name : {"steane_xbar.circ", "steane_hbar.circ"}) {
    const auto report = audit_fault_tolerance(code, corpus_circuit(name, 7), e_local);
    EXPECT_TRUE(report.passed()) << name;
  }
  const auto code2 = corpus_code("steane2.code");
  EXPECT_TRUE(audit_fault_tolerance(code2, corpus_circuit("steane_cnot.circ", 14), local_error_set(code2, 1)).passed());
}

TEST(Circuit, AuditContainmentIsMonotone) {
  const auto code = corpus_code("rep3.code");
  const Circuit c = corpus_circuit("rep3_xbar.circ", 3);
  const std::vector<ErrorSet> chain = {local_error_set(code, 0), local_error_set(code, 1, "X"),
                                       local_error_set(code, 1, "XZ"), local_error_set(code, 1),
                                       local_error_set(code, 2)};
  std::vector<std::pair<std::string, std::size_t>> previous;
  for (const auto& set : chain) {
    const auto report = audit_fault_tolerance(code, c, set);
    std::vector<std::pair<std::string, std::size_t>> failures;
    for (const auto& f : report.containment_failures) failures.emplace_back(f.error.to_string(), f.injection_point);
    for (const auto& f : previous) EXPECT_NE(std::find(failures.begin(), failures.end(), f), failures.end());
    previous = failures;
  }
  EXPECT_FALSE(previous.empty());
}

TEST(Circuit, LogicalActionOracleExamples) {
  const auto rep = corpus_code("rep3.code");
  Mat x(2, 2);
  x << 0, 1, 1, 0;
  EXPECT_NEAR(phase_infidelity(logical_action_oracle(rep, corpus_circuit("rep3_xbar.circ", 3)), x), 0.0, 1e-12);
  EXPECT_NEAR(phase_infidelity(logical_action_oracle(rep, Circuit{3, {}}), Mat::Identity(2, 2)), 0.0, 1e-12);

  const auto code2 = corpus_code("steane2.code");
  Mat cnot = Mat::Zero(4, 4);
  cnot(0, 0) = cnot(1, 1) = cnot(2, 3) = cnot(3, 2) = 1.0;
  const Mat m = logical_action_oracle(code2, corpus_circuit("steane_cnot.circ", 14));
  EXPECT_NEAR(phase_infidelity(m, cnot), 0.0, 1e-10);
}

TEST(Circuit, LogicalActionOracleRejectsLeakage) {
  const auto rep = corpus_code("rep3.code");
  EXPECT_THROW(logical_action_oracle(rep, Circuit{3, {Gate::rx(0)}}), DomainError);
}

TEST(Circuit, LogicalActionOracleComposes) {
  const auto code = corpus_code("steane.code");
  const Circuit a = corpus_circuit("steane_hbar.circ", 7);
  const Circuit b = corpus_circuit("steane_xbar.circ", 7);
  Circuit ab{7, a.gates};
  ab.gates.insert(ab.gates.end(), b.gates.begin(), b.gates.end());
  const Mat product = logical_action_oracle(code, b) * logical_action_oracle(code, a);
  EXPECT_NEAR(phase_infidelity(logical_action_oracle(code, ab), product), 0.0, 1e-10);
  Mat h(2, 2);
  h << 1, 1, 1, -1;
  EXPECT_NEAR(phase_infidelity(logical_action_oracle(code, a), h * std::sqrt(0.5)), 0.0, 1e-10);
}

}  // namespace
}  // namespace hqc
