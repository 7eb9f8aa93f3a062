#pragma once

// Dense state vectors and matrix-free Pauli actions on them.
//
// Basis index bit q holds the computational value of qubit q (0-based), the
// same bit position the Pauli masks use.

#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hqc/errors.hpp"
#include "hqc/pauli.hpp"

namespace hqc {

using Complex = std::complex<double>;

/// Largest qubit count the dense routines accept.
inline constexpr std::size_t kMaxDenseQubits = 14;

class StateVector {
 public:
  StateVector() = default;

  /// |0...0> on `n` qubits.
  explicit StateVector(std::size_t n) : n_(n), amps_(std::size_t{1} << checked(n), Complex{0, 0}) { amps_[0] = 1.0; }

  StateVector(std::size_t n, std::vector<Complex> amps) : n_(n), amps_(std::move(amps)) {
    checked(n);
    if (amps_.size() != (std::size_t{1} << n)) throw DomainError("amplitude count does not match 2^n");
  }

  /// Computational basis state |index>.
  static StateVector basis(std::size_t n, std::uint64_t index) {
    StateVector v(n);
    v.amps_[0] = 0.0;
    v.amps_.at(index) = 1.0;
    return v;
  }

  static StateVector zeros(std::size_t n) {
    StateVector v(n);
    v.amps_[0] = 0.0;
    return v;
  }

  std::size_t num_qubits() const noexcept { return n_; }
  std::size_t dim() const noexcept { return amps_.size(); }
  const std::vector<Complex>& amplitudes() const noexcept { return amps_; }
  std::vector<Complex>& amplitudes() noexcept { return amps_; }
  Complex operator[](std::size_t i) const { return amps_[i]; }
  Complex& operator[](std::size_t i) { return amps_[i]; }

  double norm_squared() const noexcept {
    double s = 0;
    for (const auto& a : amps_) s += std::norm(a);
    return s;
  }
  double norm() const noexcept { return std::sqrt(norm_squared()); }

  StateVector& operator*=(Complex c) {
    for (auto& a : amps_) a *= c;
    return *this;
  }
  StateVector& operator+=(const StateVector& o) {
    require_same(o);
    for (std::size_t i = 0; i < amps_.size(); ++i) amps_[i] += o.amps_[i];
    return *this;
  }
  StateVector& operator-=(const StateVector& o) {
    require_same(o);
    for (std::size_t i = 0; i < amps_.size(); ++i) amps_[i] -= o.amps_[i];
    return *this;
  }
  /// this += c * o
  void axpy(Complex c, const StateVector& o) {
    require_same(o);
    for (std::size_t i = 0; i < amps_.size(); ++i) amps_[i] += c * o.amps_[i];
  }

  void normalize() {
    const double nrm = norm();
    if (nrm == 0.0) throw NumericalError("cannot normalize the zero vector");
    *this *= 1.0 / nrm;
  }

  void require_same(const StateVector& o) const {
    if (o.n_ != n_) throw SizeMismatch(n_, o.n_);
  }

 private:
  static std::size_t checked(std::size_t n) {
    if (n > kMaxDenseQubits)
      throw DomainError("dense state vectors are limited to " + std::to_string(kMaxDenseQubits) + " qubits");
    return n;
  }

  std::size_t n_ = 0;
  std::vector<Complex> amps_;
};

/// <a|b>
inline Complex inner(const StateVector& a, const StateVector& b) {
  a.require_same(b);
  Complex s{0, 0};
  for (std::size_t i = 0; i < a.dim(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

inline Complex i_power(int k) {
  static const Complex kPowers[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  return kPowers[((k % 4) + 4) % 4];
}

/// A Pauli term prepared for fast application: factor * X^x Z^z on the basis.
struct PackedTerm {
  std::uint64_t x = 0;
  std::uint64_t z = 0;
  Complex factor{0, 0};
};

/// Folds the i-per-Y convention into the factor, since Y = i X Z.
inline PackedTerm pack(Complex coeff, const PauliOp& p) {
  const int num_y = std::popcount(p.x_bits() & p.z_bits());
  return {p.x_bits(), p.z_bits(), coeff * i_power(p.phase() + num_y)};
}

/// out += sum_t factor_t * P_t v. `out` must not alias `v`. Written with
/// explicit real arithmetic: std::complex products take a slow NaN-checking
/// path unless the caller compiles with relaxed complex semantics.
inline void accumulate_packed(std::span<const PackedTerm> terms, const std::vector<Complex>& v,
                              std::vector<Complex>& out) {
  const std::size_t dim = v.size();
  const double* in = reinterpret_cast<const double*>(v.data());
  double* acc = reinterpret_cast<double*>(out.data());
  for (const auto& t : terms) {
    const double fr = t.factor.real(), fi = t.factor.imag();
    for (std::size_t j = 0; j < dim; ++j) {
      const std::size_t src = j ^ t.x;
      const double sign = 1.0 - 2.0 * static_cast<double>(std::popcount(src & t.z) & 1);
      const double vr = in[2 * src], vi = in[2 * src + 1];
      acc[2 * j] += sign * (fr * vr - fi * vi);
      acc[2 * j + 1] += sign * (fr * vi + fi * vr);
    }
  }
}

inline StateVector apply_pauli(const PauliOp& p, const StateVector& v) {
  if (p.num_qubits() != v.num_qubits()) throw SizeMismatch(p.num_qubits(), v.num_qubits());
  StateVector out = StateVector::zeros(v.num_qubits());
  const PackedTerm t = pack(1.0, p);
  accumulate_packed(std::span(&t, 1), v.amplitudes(), out.amplitudes());
  return out;
}

/// H v for a Pauli sum, without forming a dense matrix; O(#terms * 2^n).
inline StateVector apply_pauli_sum(const PauliSum& h, const StateVector& v) {
  if (h.num_qubits() != v.num_qubits()) throw SizeMismatch(h.num_qubits(), v.num_qubits());
  std::vector<PackedTerm> packed;
  packed.reserve(h.size());
  for (const auto& t : h) packed.push_back(pack(t.coeff, t.pauli));
  StateVector out = StateVector::zeros(v.num_qubits());
  accumulate_packed(packed, v.amplitudes(), out.amplitudes());
  return out;
}

/// (I + sign*P)/2 applied to v.
inline StateVector project_eigenspace(const PauliOp& p, int sign, const StateVector& v) {
  StateVector out = apply_pauli(p, v);
  out *= 0.5 * sign;
  out.axpy(0.5, v);
  return out;
}

/// exp(-i*angle_sign*pi/4*gen) v = (cos(pi/4) - i*angle_sign*sin(pi/4)*gen) v.
inline StateVector apply_quarter_rotation(const PauliOp& gen, int angle_sign, const StateVector& v) {
  const double c = std::sqrt(0.5);
  StateVector out = apply_pauli(gen, v);
  out *= Complex{0, -angle_sign * c};
  out.axpy(c, v);
  return out;
}

}  // namespace hqc
