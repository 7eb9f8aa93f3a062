#pragma once

// Schrodinger integration of compiled schedules: fixed-step RK4, holonomy
// extraction, error injection, syndrome projection and fault-tolerance trials.

#include <Eigen/Dense>

#include <algorithm>
#include <bit>
#include <iterator>
#include <cmath>
#include <complex>
#include <functional>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "hqc/circuit.hpp"
#include "hqc/code.hpp"
#include "hqc/compiler.hpp"
#include "hqc/errors.hpp"
#include "hqc/state.hpp"

namespace hqc {

enum class SyndromeMode { MaxLikelihood, Sample };

struct SimOptions {
  std::size_t steps_per_unit = 64;
  double max_step_norm = 0.1;        // dt * (bound on ||H||) never exceeds this
  double leakage_tolerance = 1e-6;   // reporting threshold
  double leakage_cap = 0.1;          // holonomy reports above this are unusable
  double norm_tolerance = 1e-9;
  double ft_tolerance = 1e-3;
  SyndromeMode syndrome_mode = SyndromeMode::MaxLikelihood;
  std::uint64_t seed = 1;
};

/// Operator-norm bound for a stage at any f: commuting terms count once, each
/// cos/sin pair at most sqrt(2) times its coefficient.
inline double stage_norm_bound(const Stage& st) {
  double b = 0.0;
  for (const auto& t : st.terms) b += t.rotates() ? std::sqrt(2.0) * std::max(std::abs(t.coeff), std::abs(t.partner_coeff)) : std::abs(t.coeff);
  return b;
}

inline std::size_t stage_steps(const Stage& st, const SimOptions& opts) {
  const double d = st.ramp.duration;
  const double by_density = std::ceil(static_cast<double>(opts.steps_per_unit) * d);
  const double by_norm = std::ceil(d * stage_norm_bound(st) / opts.max_step_norm);
  return static_cast<std::size_t>(std::max({1.0, by_density, by_norm}));
}

/// Ground energy of a stage: -sum |c_j| with the break applied.
inline double stage_ground_energy(const Stage& st) {
  double e = 0.0;
  for (const auto& t : st.terms) e -= std::abs(t.coeff);
  return e;
}

namespace detail {

/// H(f) = F + cos(pi f/2) C + sin(pi f/2) S with the terms grouped by x-mask.
/// Each group stores one complex diagonal per part indexed by the source
/// amplitude, so an application is one streaming pass per group.
class GroupedHamiltonian {
 public:
  GroupedHamiltonian(std::size_t n, const std::vector<std::pair<int, PackedTerm>>& parts) : dim_(std::size_t{1} << n) {
    for (const auto& [part, t] : parts) {
      auto it = std::find_if(groups_.begin(), groups_.end(), [&](const Group& g) { return g.x == t.x; });
      if (it == groups_.end()) {
        groups_.push_back({t.x, {}});
        it = std::prev(groups_.end());
      }
      auto& diag = it->diag[part];
      if (diag.empty()) diag.assign(2 * dim_, 0.0);
      for (std::size_t src = 0; src < dim_; ++src) {
        const double sign = (std::popcount(src & t.z) & 1) ? -1.0 : 1.0;
        diag[2 * src] += sign * t.factor.real();
        diag[2 * src + 1] += sign * t.factor.imag();
      }
    }
  }

  /// out += H(c, s) v. `out` must not alias `v`.
  void apply(double c, double s, const std::vector<Complex>& v, std::vector<Complex>& out) const {
    const double* in = reinterpret_cast<const double*>(v.data());
    double* acc = reinterpret_cast<double*>(out.data());
    const double scale[3] = {1.0, c, s};
    for (const auto& g : groups_) {
      // Fold the active parts into at most three (pointer, weight) pairs.
      const double* d[3];
      double w[3];
      int used = 0;
      for (int part = 0; part < 3; ++part)
        if (!g.diag[part].empty() && scale[part] != 0.0) {
          d[used] = g.diag[part].data();
          w[used++] = scale[part];
        }
      if (used == 0) continue;
      for (std::size_t src = 0; src < dim_; ++src) {
        double dr = w[0] * d[0][2 * src], di = w[0] * d[0][2 * src + 1];
        for (int u = 1; u < used; ++u) {
          dr += w[u] * d[u][2 * src];
          di += w[u] * d[u][2 * src + 1];
        }
        const std::size_t j = src ^ g.x;
        const double vr = in[2 * src], vi = in[2 * src + 1];
        acc[2 * j] += dr * vr - di * vi;
        acc[2 * j + 1] += dr * vi + di * vr;
      }
    }
  }

 private:
  struct Group {
    std::uint64_t x;
    std::vector<double> diag[3];  // fixed, cosine, sine
  };
  std::size_t dim_;
  std::vector<Group> groups_;
};

inline GroupedHamiltonian group_stage(const Stage& st, std::size_t n) {
  std::vector<std::pair<int, PackedTerm>> parts;
  for (const auto& t : st.terms) {
    if (t.rotates()) {
      parts.emplace_back(1, pack(t.coeff, t.pauli));
      parts.emplace_back(2, pack(t.partner_coeff, *t.partner));
    } else {
      parts.emplace_back(0, pack(t.coeff, t.pauli));
    }
  }
  return GroupedHamiltonian(n, parts);
}

/// One RK4 step of i dy/dt = (H(t) - E) y with E = <y|H(t)|y>, followed by the
/// exact phase exp(-i E h). Shifting by the instantaneous energy keeps the
/// RK4 amplification error small for states near an eigenspace.
class Rk4Stepper {
 public:
  // Apply(t, v, out) accumulates H(t) v into out.
  using Apply = std::function<void(double, const std::vector<Complex>&, std::vector<Complex>&)>;

  explicit Rk4Stepper(std::size_t dim) : hy_(dim), acc_(dim), tmp_(dim) {}

  void step(Apply& terms_at, double t, double h, std::vector<Complex>& y) {
    const std::size_t n = 2 * y.size();
    double* yv = reinterpret_cast<double*>(y.data());
    double* hy = reinterpret_cast<double*>(hy_.data());
    double* acc = reinterpret_cast<double*>(acc_.data());
    double* tmp = reinterpret_cast<double*>(tmp_.data());
    zero(hy_);
    terms_at(t, y, hy_);
    double e = 0.0;
    for (std::size_t j = 0; j < n; ++j) e += yv[j] * hy[j];
    // Each pass forms k = -i (H x - e x) on (re, im) pairs, folds it into the
    // weighted sum, prepares the next trial state and clears H x for reuse.
    const double weights[4] = {1.0, 2.0, 2.0, 1.0};
    const double next_scale[4] = {0.5 * h, 0.5 * h, h, 0.0};
    const double times[4] = {t, t + 0.5 * h, t + 0.5 * h, t + h};
    for (int stage = 0; stage < 4; ++stage) {
      if (stage > 0) terms_at(times[stage], tmp_, hy_);
      const double* x = stage == 0 ? yv : tmp;
      const double w = weights[stage], c = next_scale[stage];
      const bool first = stage == 0;
      for (std::size_t j = 0; j < n; j += 2) {
        const double kr = hy[j + 1] - e * x[j + 1];
        const double ki = -(hy[j] - e * x[j]);
        acc[j] = (first ? 0.0 : acc[j]) + w * kr;
        acc[j + 1] = (first ? 0.0 : acc[j + 1]) + w * ki;
        tmp[j] = yv[j] + c * kr;
        tmp[j + 1] = yv[j + 1] + c * ki;
        hy[j] = 0.0;
        hy[j + 1] = 0.0;
      }
    }
    const double cs = std::cos(e * h), sn = -std::sin(e * h);
    for (std::size_t j = 0; j < n; j += 2) {
      const double re = yv[j] + (h / 6.0) * acc[j], im = yv[j + 1] + (h / 6.0) * acc[j + 1];
      yv[j] = cs * re - sn * im;
      yv[j + 1] = cs * im + sn * re;
    }
  }

 private:
  static void zero(std::vector<Complex>& v) { std::fill(v.begin(), v.end(), Complex{0, 0}); }
  std::vector<Complex> hy_, acc_, tmp_;
};

inline std::string sci(double x) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << x;
  return os.str();
}

inline void check_norm(const StateVector& v, double reference, const SimOptions& opts, const std::string& where) {
  const double drift = std::abs(v.norm() - reference);
  if (!(drift <= opts.norm_tolerance))  // also catches NaN from an unstable step
    throw NumericalError("norm drift " + sci(drift) + " after " + where +
                         " exceeds tolerance; increase the step density");
}

}  // namespace detail

/// Where an event time lands: stage index and step within it, snapped to the
/// nearest step boundary. Step == steps(stage) means the end of that stage.
struct StepPosition {
  std::size_t stage = 0;
  std::size_t step = 0;
};

/// Integrates a schedule stage by stage; holds the per-stage step plans.
class Evolver {
 public:
  Evolver(const Schedule& s, SimOptions opts) : schedule_(&s), opts_(opts) {
    if (s.num_qubits() > kMaxDenseQubits) throw DomainError("evolution is limited to 14 qubits");
    for (const auto& st : s.stages) steps_.push_back(stage_steps(st, opts_));
  }

  const Schedule& schedule() const noexcept { return *schedule_; }
  const SimOptions& options() const noexcept { return opts_; }
  std::size_t steps(std::size_t stage) const { return steps_.at(stage); }
  std::size_t total_steps() const {
    std::size_t n = 0;
    for (auto k : steps_) n += k;
    return n;
  }

  /// Evolves v across steps [k0, k1) of one stage.
  void advance(std::size_t stage, std::size_t k0, std::size_t k1, StateVector& v) const {
    const Stage& st = schedule_->stages.at(stage);
    if (v.num_qubits() != schedule_->num_qubits()) throw SizeMismatch(schedule_->num_qubits(), v.num_qubits());
    k1 = std::min(k1, steps_[stage]);
    if (k0 >= k1) return;
    const double reference = v.norm();
    const double h = st.ramp.duration / static_cast<double>(steps_[stage]);
    const auto grouped = detail::group_stage(st, v.num_qubits());
    detail::Rk4Stepper::Apply terms_at = [&](double tau, const std::vector<Complex>& in, std::vector<Complex>& out) {
      const auto [c, s] = quarter_cos_sin(st.ramp.value(tau / st.ramp.duration));
      grouped.apply(c, s, in, out);
    };
    detail::Rk4Stepper stepper(v.dim());
    for (std::size_t k = k0; k < k1; ++k) stepper.step(terms_at, static_cast<double>(k) * h, h, v.amplitudes());
    detail::check_norm(v, reference, opts_, "stage " + std::to_string(stage + 1));
  }

  /// Evolves v through whole stages [from, to). Breaks and rewrites at the
  /// boundaries are instantaneous and need no evolution.
  void run_stages(std::size_t from, std::size_t to, StateVector& v) const {
    for (std::size_t l = from; l < to && l < steps_.size(); ++l) advance(l, 0, steps_[l], v);
  }

  StepPosition locate(double t) const {
    const Schedule& s = *schedule_;
    if (t < 0.0 || t > s.total_time()) throw DomainError("event time " + std::to_string(t) + " outside the schedule");
    if (s.stages.empty()) return {0, 0};
    const std::size_t l = stage_at(s, t);
    const Stage& st = s.stages[l];
    const double h = st.ramp.duration / static_cast<double>(steps_[l]);
    const auto k = static_cast<std::size_t>(std::llround((t - st.start_time) / h));
    return {l, std::min(k, steps_[l])};
  }

 private:
  const Schedule* schedule_;
  SimOptions opts_;
  std::vector<std::size_t> steps_;
};

inline StateVector evolve(const Schedule& s, StateVector v, const SimOptions& opts = {}) {
  const double reference = v.norm();
  Evolver(s, opts).run_stages(0, s.stages.size(), v);
  detail::check_norm(v, reference, opts, "the full schedule");
  return v;
}

/// Evolution under a time-independent Hamiltonian with the same integrator.
inline StateVector evolve_constant(const PauliSum& h, StateVector v, double duration, const SimOptions& opts = {}) {
  if (duration <= 0.0) return v;
  std::vector<std::pair<int, PackedTerm>> parts;
  for (const auto& t : h) parts.emplace_back(0, pack(t.coeff, t.pauli));
  const detail::GroupedHamiltonian grouped(v.num_qubits(), parts);
  const auto steps = static_cast<std::size_t>(std::max(
      {1.0, std::ceil(static_cast<double>(opts.steps_per_unit) * duration),
       std::ceil(duration * h.abs_coeff_sum() / opts.max_step_norm)}));
  const double dt = duration / static_cast<double>(steps);
  detail::Rk4Stepper::Apply terms_at = [&](double, const std::vector<Complex>& in, std::vector<Complex>& out) {
    grouped.apply(1.0, 0.0, in, out);
  };
  detail::Rk4Stepper stepper(v.dim());
  const double reference = v.norm();
  for (std::size_t k = 0; k < steps; ++k) stepper.step(terms_at, static_cast<double>(k) * dt, dt, v.amplitudes());
  detail::check_norm(v, reference, opts, "constant evolution");
  return v;
}

/// 1 - |Tr(u^dagger v)| / K.
inline double compare_up_to_phase(const ComplexMatrix& u, const ComplexMatrix& v) {
  if (u.rows() != v.rows() || u.cols() != v.cols() || u.rows() != u.cols())
    throw SizeMismatch(static_cast<std::size_t>(u.rows()), static_cast<std::size_t>(v.rows()));
  return 1.0 - std::abs((u.adjoint() * v).trace()) / static_cast<double>(u.rows());
}

/// Sum over stages of the ground energy times the duration.
inline double ground_dynamical_phase(const Schedule& s) {
  double phase = 0.0;
  for (const auto& st : s.stages) phase += stage_ground_energy(st) * st.ramp.duration;
  return phase;
}

struct HolonomyReport {
  ComplexMatrix gamma;
  ComplexMatrix target;
  double leakage = 0.0;
  double infidelity = 0.0;
  double dynamical_phase = 0.0;
  double total_time = 0.0;
  std::size_t steps = 0;
};

/// Code-space overlaps <basis_i|psi_j> and the leakage 1 - mean_j sum_i |.|^2.
inline std::pair<ComplexMatrix, double> code_space_overlaps(const std::vector<StateVector>& basis,
                                                            const std::vector<StateVector>& states) {
  const std::size_t K = basis.size();
  ComplexMatrix m(K, states.size());
  double captured = 0.0;
  for (std::size_t j = 0; j < states.size(); ++j)
    for (std::size_t i = 0; i < K; ++i) {
      m(i, j) = inner(basis[i], states[j]);
      captured += std::norm(m(i, j));
    }
  return {m, 1.0 - captured / static_cast<double>(states.size())};
}

inline HolonomyReport holonomy(const Schedule& s, const SimOptions& opts = {}) {
  const auto check = validate_schedule(s);
  if (!check.ok()) throw DomainError("holonomy requires a valid cyclic schedule: " + check.violations.front());
  const auto basis = codeword_basis(s.code);
  const Evolver ev(s, opts);
  HolonomyReport r;
  r.dynamical_phase = ground_dynamical_phase(s);
  r.total_time = s.total_time();
  r.steps = ev.total_steps();
  const Complex strip = std::exp(Complex{0, r.dynamical_phase});
  std::vector<StateVector> finals;
  for (const auto& b : basis) {
    StateVector v = b;
    ev.run_stages(0, s.stages.size(), v);
    detail::check_norm(v, 1.0, opts, "the full schedule");
    v *= strip;
    finals.push_back(std::move(v));
  }
  std::tie(r.gamma, r.leakage) = code_space_overlaps(basis, finals);
  if (r.leakage > opts.leakage_cap)
    throw NumericalError("leakage " + detail::sci(r.leakage) + " exceeds the cap; the run is not adiabatic");
  r.target = logical_action_oracle(s.code, s.circuit);
  r.infidelity = compare_up_to_phase(r.target, r.gamma);
  return r;
}

/// Copy of the schedule with every stage set to `duration` and start times rechained.
inline Schedule with_uniform_duration(const Schedule& s, double duration) {
  if (!(duration > 0.0)) throw DomainError("stage duration must be positive");
  Schedule out = s;
  double t = 0.0;
  for (auto& st : out.stages) {
    st.ramp.duration = duration;
    st.start_time = t;
    t = st.end_time();
  }
  return out;
}

struct SweepPoint {
  double stage_duration = 0.0;
  double total_time = 0.0;
  double infidelity = 0.0;
  double leakage = 0.0;
};

inline std::vector<SweepPoint> convergence_sweep(const Schedule& s, const std::vector<double>& durations,
                                                 const SimOptions& opts = {}) {
  if (durations.size() < 2) throw DomainError("a sweep needs at least two durations");
  std::vector<SweepPoint> out;
  for (double d : durations) {
    const Schedule scaled = with_uniform_duration(s, d);
    const auto r = holonomy(scaled, opts);
    out.push_back({d, scaled.total_time(), r.infidelity, r.leakage});
  }
  return out;
}

struct InjectionEvent {
  double time = 0.0;
  PauliOp error;
};

/// Boundary index when t equals a stage boundary exactly.
inline std::optional<std::size_t> boundary_index(const Schedule& s, double t) {
  const auto b = s.boundaries();
  for (std::size_t q = 0; q < b.size(); ++q)
    if (b[q] == t) return q;
  return std::nullopt;
}

inline StateVector inject_and_run(const Schedule& s, StateVector v, const std::vector<InjectionEvent>& events,
                                  const SimOptions& opts = {}) {
  const Evolver ev(s, opts);
  const double reference = v.norm();
  std::vector<std::pair<StepPosition, const PauliOp*>> placed;
  for (std::size_t i = 0; i < events.size(); ++i) {
    if (i > 0 && events[i].time < events[i - 1].time) throw DomainError("events must be sorted by time");
    if (events[i].error.num_qubits() != s.num_qubits()) throw SizeMismatch(s.num_qubits(), events[i].error.num_qubits());
    if (!events[i].error.is_hermitian()) throw DomainError("injected errors must be Hermitian");
    placed.emplace_back(ev.locate(events[i].time), &events[i].error);
  }
  StepPosition cur{0, 0};
  auto advance_to = [&](StepPosition target) {
    while (cur.stage < target.stage) {
      ev.advance(cur.stage, cur.step, ev.steps(cur.stage), v);
      cur = {cur.stage + 1, 0};
    }
    ev.advance(cur.stage, cur.step, target.step, v);
    cur.step = std::max(cur.step, target.step);
  };
  for (const auto& [pos, err] : placed) {
    if (!s.stages.empty()) advance_to(pos);
    v = apply_pauli(*err, v);
  }
  if (!s.stages.empty()) advance_to({s.stages.size() - 1, ev.steps(s.stages.size() - 1)});
  detail::check_norm(v, reference, opts, "the full schedule");
  return v;
}

struct SyndromeOutcome {
  Syndrome syndrome;
  StateVector state;
  double probability = 1.0;
};

/// Measures the generators one at a time with (I +- S_j)/2.
inline SyndromeOutcome syndrome_project(const StabilizerCode& code, StateVector v,
                                        SyndromeMode mode = SyndromeMode::MaxLikelihood, std::uint64_t seed = 1) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  SyndromeOutcome out;
  const double start = v.norm_squared();
  if (start <= 0.0) throw NumericalError("cannot measure the zero vector");
  out.syndrome.resize(code.generators.size());
  for (std::size_t j = 0; j < code.generators.size(); ++j) {
    StateVector plus = project_eigenspace(code.generators[j], +1, v);
    const double p_plus = plus.norm_squared() / v.norm_squared();
    bool take_plus = p_plus >= 0.5;
    if (mode == SyndromeMode::Sample) take_plus = unit(rng) < p_plus;
    const double p = take_plus ? p_plus : 1.0 - p_plus;
    if (p < 1e-12) throw NumericalError("degenerate syndrome branch for generator " + std::to_string(j + 1));
    v = take_plus ? std::move(plus) : project_eigenspace(code.generators[j], -1, v);
    v.normalize();
    out.syndrome[j] = take_plus ? 0 : 1;
    out.probability *= p;
  }
  out.state = std::move(v);
  return out;
}

/// Exact prediction F^T Omega psi_0 per codeword, where each F^T is the error
/// carried through the remaining gates. Events must sit on stage boundaries.
inline std::vector<StateVector> ideal_final_state_oracle(const Schedule& s, const std::vector<InjectionEvent>& events) {
  std::vector<PauliOp> carried;
  for (const auto& e : events) {
    const auto q = boundary_index(s, e.time);
    if (!q) throw DomainError("the Clifford oracle needs events on stage boundaries");
    carried.push_back(propagate_pauli(s.circuit, *q, e.error));
  }
  std::vector<StateVector> out;
  for (auto v : codeword_basis(s.code)) {
    v = apply_circuit(s.circuit, std::move(v));
    for (const auto& f : carried) v = apply_pauli(f, v);
    out.push_back(std::move(v));
  }
  return out;
}

struct FtResult {
  InjectionEvent event;
  std::optional<std::size_t> boundary;
  Syndrome syndrome;
  PauliOp correction;
  double branch_probability = 1.0;  // smallest over codewords
  double infidelity = 1.0;           // corrected logical action vs the circuit oracle
  double oracle_mismatch = 1.0;      // corrected states vs corrected Clifford prediction
  bool logical_residue = false;      // decoder leaves a logical operator
  bool passed = false;
};

namespace detail {

/// Syndrome, decode and compare, given the evolved (uncorrected) codeword images.
inline FtResult score_trial(const Schedule& s, const SyndromeTable& decoder, const std::vector<StateVector>& basis,
                            const ComplexMatrix& target, const InjectionEvent& event, std::vector<StateVector> finals,
                            const SimOptions& opts) {
  FtResult r;
  r.event = event;
  r.boundary = boundary_index(s, event.time);
  bool consistent = true;
  std::vector<StateVector> corrected;
  for (std::size_t j = 0; j < finals.size(); ++j) {
    auto m = syndrome_project(s.code, std::move(finals[j]), opts.syndrome_mode, opts.seed + j);
    if (j == 0) r.syndrome = m.syndrome;
    consistent &= (m.syndrome == r.syndrome);
    r.branch_probability = std::min(r.branch_probability, m.probability);
    corrected.push_back(std::move(m.state));
  }
  r.correction = decoder.correction(r.syndrome);
  for (auto& v : corrected) v = apply_pauli(r.correction, v);
  const auto [m, leak] = code_space_overlaps(basis, corrected);
  r.infidelity = consistent ? compare_up_to_phase(target, m) : 1.0;

  if (r.boundary) {
    const PauliOp carried = propagate_pauli(s.circuit, *r.boundary, event.error);
    r.logical_residue = !decoder_corrects(s.code, decoder, carried);
    const auto predicted = ideal_final_state_oracle(s, {event});
    Complex overlap{0, 0};
    for (std::size_t j = 0; j < corrected.size(); ++j)
      overlap += inner(apply_pauli(r.correction, predicted[j]), corrected[j]);
    r.oracle_mismatch = 1.0 - std::abs(overlap) / static_cast<double>(corrected.size());
  }
  r.passed = consistent && r.infidelity <= opts.ft_tolerance;
  return r;
}

}  // namespace detail

/// One injected error: evolve every codeword with it, measure, decode, compare.
inline FtResult ft_trial(const Schedule& s, const SyndromeTable& decoder, const InjectionEvent& event,
                         const SimOptions& opts = {}) {
  const auto basis = codeword_basis(s.code);
  std::vector<StateVector> finals;
  for (const auto& b : basis) finals.push_back(inject_and_run(s, b, {event}, opts));
  return detail::score_trial(s, decoder, basis, logical_action_oracle(s.code, s.circuit), event, std::move(finals),
                             opts);
}

/// Every error at every listed stage boundary (all boundaries when empty).
/// Codeword states at each boundary are computed once and reused.
inline std::vector<FtResult> ft_matrix(const Schedule& s, const SyndromeTable& decoder,
                                       const std::vector<PauliOp>& errors, std::vector<std::size_t> boundaries = {},
                                       const SimOptions& opts = {}) {
  const std::size_t p = s.stages.size();
  if (boundaries.empty())
    for (std::size_t q = 0; q <= p; ++q) boundaries.push_back(q);
  const auto basis = codeword_basis(s.code);
  const ComplexMatrix target = logical_action_oracle(s.code, s.circuit);
  const Evolver ev(s, opts);
  const auto times = s.boundaries();

  // cache[q][j]: codeword j evolved through the first q stages.
  std::vector<std::vector<StateVector>> cache(p + 1);
  cache[0] = basis;
  for (std::size_t q = 1; q <= p; ++q) {
    cache[q] = cache[q - 1];
    for (auto& v : cache[q]) ev.advance(q - 1, 0, ev.steps(q - 1), v);
  }
  std::vector<FtResult> out;
  for (std::size_t q : boundaries) {
    if (q > p) throw DomainError("boundary index past the end of the schedule");
    for (const auto& e : errors) {
      std::vector<StateVector> finals;
      for (const auto& v0 : cache[q]) {
        StateVector v = apply_pauli(e, v0);
        ev.run_stages(q, p, v);
        detail::check_norm(v, 1.0, opts, "the full schedule");
        finals.push_back(std::move(v));
      }
      out.push_back(detail::score_trial(s, decoder, basis, target, {times[q], e}, std::move(finals), opts));
    }
  }
  return out;
}

}  // namespace hqc
