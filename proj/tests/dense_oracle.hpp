#pragma once

// Dense-matrix reference implementations used only by the tests. They build
// operators from single-qubit matrices and Kronecker structure, independent of
// the bit-packed paths in the library.

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <random>
#include <string>

#include "hqc/pauli.hpp"
#include "hqc/state.hpp"

namespace hqc::testing {

using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using cd = std::complex<double>;

inline Eigen::Matrix2cd single_qubit(char letter) {
  Eigen::Matrix2cd m;
  const cd i{0, 1};
  switch (letter) {
    case 'I': m << 1, 0, 0, 1; break;
    case 'X': m << 0, 1, 1, 0; break;
    case 'Y': m << 0, -i, i, 0; break;
    case 'Z': m << 1, 0, 0, -1; break;
    default: throw std::invalid_argument("bad letter");
  }
  return m;
}

/// Basis index bit q is qubit q, so qubit 0 is the least significant factor.
inline Mat dense(const PauliOp& p) {
  const std::size_t n = p.num_qubits();
  const std::size_t dim = std::size_t{1} << n;
  Mat m(dim, dim);
  const cd phase = std::pow(cd{0, 1}, p.phase());
  for (std::size_t r = 0; r < dim; ++r)
    for (std::size_t c = 0; c < dim; ++c) {
      cd v = phase;
      for (std::size_t q = 0; q < n && v != cd{0, 0}; ++q) v *= single_qubit(p.letter(q))((r >> q) & 1, (c >> q) & 1);
      m(r, c) = v;
    }
  return m;
}

inline Mat dense(const PauliSum& h) {
  const std::size_t dim = std::size_t{1} << h.num_qubits();
  Mat m = Mat::Zero(dim, dim);
  for (const auto& t : h) m += t.coeff * dense(t.pauli);
  return m;
}

/// exp(-i*angle_sign*pi/4*G) from the dense generator (G^2 = I).
inline Mat quarter_rotation(const PauliOp& gen, int angle_sign) {
  const Mat g = dense(gen);
  const double c = std::sqrt(0.5);
  return c * Mat::Identity(g.rows(), g.cols()) - cd{0, angle_sign * c} * g;
}

inline Vec to_eigen(const StateVector& v) {
  Vec out(v.dim());
  for (std::size_t i = 0; i < v.dim(); ++i) out(i) = v[i];
  return out;
}

inline PauliOp random_pauli(std::mt19937_64& rng, std::size_t n, bool hermitian = false) {
  static constexpr char kLetters[4] = {'I', 'X', 'Y', 'Z'};
  PauliOp p(n);
  std::uniform_int_distribution<int> letter(0, 3);
  for (std::size_t q = 0; q < n; ++q) p.set_letter(q, kLetters[letter(rng)]);
  std::uniform_int_distribution<int> ph(0, 3);
  const int phase = hermitian ? 2 * (ph(rng) % 2) : ph(rng);
  return p.times_i_power(phase);
}

}  // namespace hqc::testing
