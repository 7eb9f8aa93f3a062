#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <random>

#include "corpus.hpp"
#include "dense_oracle.hpp"
#include "hqc/calibration.hpp"
#include "hqc/sim.hpp"

namespace hqc {
namespace {

using testing::corpus_circuit;
using testing::corpus_code;
using testing::dense;
using testing::Mat;
using testing::to_eigen;
using testing::Vec;

PauliOp P(const char* s) { return PauliOp::parse(s); }

Schedule rep3_xbar(double duration) {
  SynthesisOptions o;
  o.ramp.duration = duration;
  return synthesize(corpus_code("rep3.code"), corpus_circuit("rep3_xbar.circ", 3), o);
}

Schedule steane_xbar(double duration) {
  SynthesisOptions o;
  o.ramp.duration = duration;
  return synthesize(corpus_code("steane.code"), corpus_circuit("steane_xbar.circ", 7), o);
}

// exp(-i H t) v from a dense eigendecomposition.
Vec dense_propagate(const Mat& h, const Vec& v, double t) {
  Eigen::SelfAdjointEigenSolver<Mat> eig(h);
  const Eigen::VectorXcd phases = (eig.eigenvalues().cast<std::complex<double>>() * std::complex<double>{0, -t}).array().exp();
  return eig.eigenvectors() * phases.asDiagonal() * eig.eigenvectors().adjoint() * v;
}

double state_distance(const StateVector& a, const Vec& b) { return (to_eigen(a) - b).norm(); }

TEST(Sim, GroupedHamiltonianMatchesDense) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> coeff(0.0, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 1 + trial % 4;
    std::vector<std::pair<int, PackedTerm>> parts;
    Mat expected = Mat::Zero(std::size_t{1} << n, std::size_t{1} << n);
    const double c = 0.3, s = -0.7;
    const double scale[3] = {1.0, c, s};
    for (int k = 0; k < 6; ++k) {
      const PauliOp p = testing::random_pauli(rng, n, true).unsigned_part();
      const double w = coeff(rng);
      const int part = k % 3;
      parts.emplace_back(part, pack(w, p));
      expected += scale[part] * w * dense(p);
    }
    const detail::GroupedHamiltonian h(n, parts);
    StateVector v = StateVector::zeros(n);
    for (std::size_t i = 0; i < v.dim(); ++i) v[i] = {coeff(rng), coeff(rng)};
    std::vector<Complex> out(v.dim());
    h.apply(c, s, v.amplitudes(), out);
    EXPECT_NEAR((Eigen::Map<Vec>(out.data(), out.size()) - expected * to_eigen(v)).norm(), 0.0, 1e-12);
  }
}

TEST(Sim, EvolveConstantOnEigenstateIsAPhase) {
  const PauliSum h(3, {{-1.0, P("ZZI")}, {-1.0, P("IZZ")}});
  const StateVector out = evolve_constant(h, StateVector::basis(3, 0b000), 3.0);
  Vec expected = Vec::Zero(8);
  expected(0) = std::exp(Complex{0, 2.0 * 3.0});
  EXPECT_LT(state_distance(out, expected), 1e-8);
}

TEST(Sim, EvolveConstantMatchesDenseExponential) {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> g(0.0, 1.0);
  const PauliSum h(3, {{0.7, P("XYZ")}, {-1.1, P("ZZI")}, {0.4, P("IXI")}, {0.9, P("YIY")}});
  StateVector v = StateVector::zeros(3);
  for (std::size_t i = 0; i < v.dim(); ++i) v[i] = {g(rng), g(rng)};
  v.normalize();
  const StateVector out = evolve_constant(h, v, 2.5);
  EXPECT_LT(state_distance(out, dense_propagate(dense(h), to_eigen(v), 2.5)), 1e-6);
  EXPECT_EQ(evolve_constant(h, v, 0.0).amplitudes(), v.amplitudes());
}

TEST(Sim, EmptyScheduleLeavesStateUnchanged) {
  const Schedule s = synthesize(corpus_code("rep3.code"), Circuit{3, {}});
  const StateVector v = StateVector::basis(3, 0b101);
  EXPECT_EQ(evolve(s, v).amplitudes(), v.amplitudes());
  const auto r = holonomy(s);
  EXPECT_NEAR(compare_up_to_phase(r.gamma, Mat::Identity(2, 2)), 0.0, 1e-12);
  EXPECT_NEAR(r.leakage, 0.0, 1e-12);
}

TEST(Sim, RepetitionStageOneRotatesTheCodeword) {
  const Schedule s = rep3_xbar(50.0);
  const Evolver ev(s, {});
  StateVector v = StateVector::basis(3, 0b000);
  ev.advance(0, 0, ev.steps(0), v);
  const Vec expected = testing::quarter_rotation(P("XII"), +1) * to_eigen(StateVector::basis(3, 0b000));
  EXPECT_GT(std::abs(to_eigen(v).dot(expected)), 1.0 - 1e-4);
}

TEST(Sim, HolonomyAtCalibratedDurations) {
  const auto rep = holonomy(rep3_xbar(calibration::kRepetitionStageDuration));
  EXPECT_LE(rep.infidelity, 1e-3);
  EXPECT_LE(rep.leakage, 1e-4);
  const auto st = holonomy(steane_xbar(calibration::kSteaneStageDuration));
  EXPECT_LE(st.infidelity, 1e-3);
  EXPECT_LE(st.leakage, 1e-4);
}

TEST(Sim, HolonomyMatchesHorizontalLift) {
  // Discrete parallel transport: a fine product of ground-space projectors
  // approaches the horizontal lift, whose endpoint overlap is the holonomy.
  const Schedule s = rep3_xbar(calibration::kRepetitionStageDuration);
  const auto basis = codeword_basis(s.code);
  Mat frame(8, 2);
  frame.col(0) = to_eigen(basis[0]);
  frame.col(1) = to_eigen(basis[1]);
  Mat w = frame;
  const int grid = 400;
  for (const auto& st : s.stages)
    for (int k = 1; k <= grid; ++k) {
      Eigen::SelfAdjointEigenSolver<Mat> eig(dense(stage_hamiltonian(st, static_cast<double>(k) / grid)));
      const Mat ground = eig.eigenvectors().leftCols(2);
      w = ground * (ground.adjoint() * w);
    }
  Mat lift = frame.adjoint() * w;
  Eigen::SelfAdjointEigenSolver<Mat> gram(lift.adjoint() * lift);
  lift = lift * gram.operatorInverseSqrt();
  // The finite-T run also carries a small global phase from the second-order
  // energy shift, so the comparison is up to phase.
  const auto r = holonomy(s);
  EXPECT_LT(compare_up_to_phase(lift, r.gamma), 1e-4);
  EXPECT_LT(compare_up_to_phase(lift, r.target), 1e-6);
}

TEST(Sim, HolonomyRejectsNonCyclicSchedule) {
  const auto code2 = corpus_code("steane2.code");
  const Schedule naive = synthesize(code2, corpus_circuit("steane_cnot.circ", 14));
  EXPECT_THROW(holonomy(naive), DomainError);
}

TEST(Sim, NormDriftIsReportedNotHidden) {
  SimOptions coarse;
  coarse.steps_per_unit = 1;
  coarse.max_step_norm = 100.0;
  const PauliSum h(2, {{5.0, P("XI")}, {3.0, P("ZZ")}});
  EXPECT_THROW(evolve_constant(h, StateVector::basis(2, 1), 10.0, coarse), NumericalError);
}

TEST(Sim, CompareUpToPhaseExamples) {
  const Mat id = Mat::Identity(2, 2);
  EXPECT_NEAR(compare_up_to_phase(id, std::exp(Complex{0, 0.7}) * id), 0.0, 1e-15);
  Mat x(2, 2);
  x << 0, 1, 1, 0;
  EXPECT_NEAR(compare_up_to_phase(id, x), 1.0, 1e-15);
  EXPECT_THROW(compare_up_to_phase(id, Mat::Identity(4, 4)), SizeMismatch);
}

TEST(Sim, InjectAndRunWithoutEventsEqualsEvolve) {
  const Schedule s = rep3_xbar(5.0);
  const StateVector v = codeword_basis(s.code)[1];
  EXPECT_EQ(inject_and_run(s, v, {}).amplitudes(), evolve(s, v).amplitudes());
}

TEST(Sim, InjectedBitFlipLandsInItsSyndrome) {
  const Schedule s = rep3_xbar(calibration::kRepetitionStageDuration);
  const double t2 = s.boundaries()[2];
  const StateVector out = inject_and_run(s, codeword_basis(s.code)[0], {{t2, P("IXI")}});
  const auto m = syndrome_project(s.code, out);
  EXPECT_EQ(m.syndrome, (Syndrome{1, 1}));
  EXPECT_GE(m.probability, 1.0 - 1e-3);
}

TEST(Sim, InjectionSnapsToSteps) {
  const Schedule s = rep3_xbar(5.0);
  const Evolver ev(s, {});
  const auto at_boundary = ev.locate(s.boundaries()[3]);
  EXPECT_EQ(at_boundary.stage, 3u);
  EXPECT_EQ(at_boundary.step, 0u);
  const auto at_end = ev.locate(s.total_time());
  EXPECT_EQ(at_end.stage, 5u);
  EXPECT_EQ(at_end.step, ev.steps(5));
  const auto mid = ev.locate(s.stages[1].start_time + 2.5);
  EXPECT_EQ(mid.stage, 1u);
  EXPECT_EQ(mid.step, ev.steps(1) / 2);
  EXPECT_THROW(ev.locate(-1.0), DomainError);
  EXPECT_THROW(inject_and_run(s, StateVector(3), {{2.0, P("XII")}, {1.0, P("XII")}}), DomainError);
}

TEST(Sim, SyndromeProjectExamples) {
  const auto code = corpus_code("rep3.code");
  const auto flipped = syndrome_project(code, StateVector::basis(3, 0b010));
  EXPECT_EQ(flipped.syndrome, (Syndrome{1, 1}));
  EXPECT_NEAR(flipped.probability, 1.0, 1e-12);

  StateVector mix = StateVector::zeros(3);
  mix[0b000] = std::sqrt(0.8);
  mix[0b001] = std::sqrt(0.2);
  const auto likely = syndrome_project(code, mix);
  EXPECT_EQ(likely.syndrome, (Syndrome{0, 0}));
  EXPECT_NEAR(likely.probability, 0.8, 1e-12);
  EXPECT_NEAR(std::abs(likely.state[0b000]), 1.0, 1e-12);

  const auto a = syndrome_project(code, mix, SyndromeMode::Sample, 99);
  const auto b = syndrome_project(code, mix, SyndromeMode::Sample, 99);
  EXPECT_EQ(a.syndrome, b.syndrome);
  int unlikely = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed)
    unlikely += syndrome_project(code, mix, SyndromeMode::Sample, seed).syndrome != Syndrome{0, 0};
  EXPECT_GT(unlikely, 15);
  EXPECT_LT(unlikely, 70);
  EXPECT_THROW(syndrome_project(code, StateVector::zeros(3)), NumericalError);
}

TEST(Sim, IdealFinalStateOracleNeedsBoundaryEvents) {
  const Schedule s = rep3_xbar(5.0);
  const auto out = ideal_final_state_oracle(s, {{s.boundaries()[1], P("IIX")}});
  ASSERT_EQ(out.size(), 2u);
  // X3 commutes with every gate: logical X gives |111>, then X3 clears qubit 3.
  EXPECT_NEAR(std::abs(out[0][0b011]), 1.0, 1e-12);
  EXPECT_THROW(ideal_final_state_oracle(s, {{1.0, P("IIX")}}), DomainError);
}

TEST(Sim, RepetitionFaultToleranceMatrix) {
  const Schedule s = rep3_xbar(calibration::kRepetitionStageDuration);
  const auto decoder = build_decoder(s.code);
  const std::vector<PauliOp> xs = {P("XII"), P("IXI"), P("IIX")};
  for (const auto& r : ft_matrix(s, decoder, xs)) {
    EXPECT_TRUE(r.passed) << r.event.error.to_string() << " at boundary " << *r.boundary << " inf " << r.infidelity;
    EXPECT_FALSE(r.logical_residue);
    EXPECT_LT(r.oracle_mismatch, 1e-3);
  }
  const std::vector<PauliOp> zs = {P("ZII"), P("IZI"), P("IIZ")};
  for (const auto& r : ft_matrix(s, decoder, zs)) {
    EXPECT_FALSE(r.passed) << r.event.error.to_string();
    EXPECT_TRUE(r.logical_residue);
    EXPECT_LT(r.oracle_mismatch, 1e-3);
  }
}

TEST(Sim, FtTrialAgreesWithMatrixEntry) {
  const Schedule s = rep3_xbar(calibration::kRepetitionStageDuration);
  const auto decoder = build_decoder(s.code);
  const auto single = ft_trial(s, decoder, {s.boundaries()[2], P("IXI")});
  const auto row = ft_matrix(s, decoder, {P("IXI")}, {2});
  ASSERT_EQ(row.size(), 1u);
  EXPECT_TRUE(single.passed);
  EXPECT_EQ(single.syndrome, row[0].syndrome);
  EXPECT_NEAR(single.infidelity, row[0].infidelity, 1e-12);
}

TEST(Sim, SteaneFaultToleranceMatrix) {
  const Schedule s = steane_xbar(calibration::kSteaneStageDuration);
  const auto decoder = build_decoder(s.code);
  const auto results = ft_matrix(s, decoder, local_error_set(s.code, 1).elements);
  EXPECT_EQ(results.size(), 21u * (s.stages.size() + 1));
  for (const auto& r : results) {
    EXPECT_TRUE(r.passed) << r.event.error.to_string() << " at boundary " << *r.boundary << " inf " << r.infidelity;
    EXPECT_LT(r.oracle_mismatch, 1e-3);
  }
}

TEST(Sim, ConvergenceSweepDecreases) {
  const auto sweep = convergence_sweep(rep3_xbar(1.0), {5.0, 20.0, 80.0});
  ASSERT_EQ(sweep.size(), 3u);
  EXPECT_GT(sweep[0].infidelity, sweep[1].infidelity);
  EXPECT_GT(sweep[1].infidelity, sweep[2].infidelity);
  EXPECT_GE(sweep[1].infidelity / sweep[2].infidelity, 4.0);
  EXPECT_DOUBLE_EQ(sweep[2].total_time, 80.0 * 6);
  EXPECT_THROW(convergence_sweep(rep3_xbar(1.0), {5.0}), DomainError);
}

TEST(Sim, RunsAreDeterministic) {
  const Schedule s = rep3_xbar(5.0);
  const auto a = holonomy(s);
  const auto b = holonomy(s);
  EXPECT_EQ(a.gamma, b.gamma);
  EXPECT_EQ(a.leakage, b.leakage);
}

}  // namespace
}  // namespace hqc
