#pragma once

// Signed n-qubit Pauli operators in symplectic form.
//
// An operator is stored as i^phase * P_1 (x) ... (x) P_n where each P_q is one of
// I, X, Y, Z selected by the bit pair (x_q, z_q): (0,0)=I, (1,0)=X, (1,1)=Y,
// (0,1)=Z. With Y stored directly, Hermitian operators carry phase 0 or 2.
// Qubit q (0-based) lives in bit q of the packed masks; the text format puts
// qubit 1 leftmost.

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hqc/errors.hpp"

namespace hqc {

class PauliOp {
 public:
  PauliOp() = default;

  /// Identity on `n` qubits.
  explicit PauliOp(std::size_t n) : n_(n), x_(word_count(n), 0), z_(word_count(n), 0) {}

  /// Single-qubit letter ('I', 'X', 'Y', 'Z') on qubit `q` (0-based).
  static PauliOp single(std::size_t n, std::size_t q, char letter) {
    PauliOp p(n);
    p.set_letter(q, letter);
    return p;
  }

  /// Parses "[+|-|−][i]XYZI..."; qubit 1 is the leftmost character.
  static PauliOp parse(std::string_view text);

  std::size_t num_qubits() const noexcept { return n_; }
  int phase() const noexcept { return phase_; }
  bool is_hermitian() const noexcept { return (phase_ & 1) == 0; }

  /// +1 or -1. Only meaningful for Hermitian operators.
  int sign() const {
    if (!is_hermitian()) throw DomainError("sign() of non-Hermitian Pauli " + to_string());
    return phase_ == 0 ? 1 : -1;
  }

  bool x(std::size_t q) const { return (x_[q >> 6] >> (q & 63)) & 1u; }
  bool z(std::size_t q) const { return (z_[q >> 6] >> (q & 63)) & 1u; }

  char letter(std::size_t q) const {
    static constexpr char kLetters[4] = {'I', 'X', 'Z', 'Y'};
    return kLetters[(x(q) ? 1 : 0) | (z(q) ? 2 : 0)];
  }

  std::span<const std::uint64_t> x_words() const noexcept { return x_; }
  std::span<const std::uint64_t> z_words() const noexcept { return z_; }

  /// Low 64 bits of the masks; the dense simulator only needs these.
  std::uint64_t x_bits() const noexcept { return x_.empty() ? 0 : x_[0]; }
  std::uint64_t z_bits() const noexcept { return z_.empty() ? 0 : z_[0]; }

  std::size_t weight() const noexcept {
    std::size_t w = 0;
    for (std::size_t i = 0; i < x_.size(); ++i) w += std::popcount(x_[i] | z_[i]);
    return w;
  }

  bool is_identity_up_to_phase() const noexcept {
    return std::all_of(x_.begin(), x_.end(), [](auto w) { return w == 0; }) &&
           std::all_of(z_.begin(), z_.end(), [](auto w) { return w == 0; });
  }

  /// Same operator with phase reset to +1.
  PauliOp unsigned_part() const {
    PauliOp p = *this;
    p.phase_ = 0;
    return p;
  }

  PauliOp negated() const { return times_i_power(2); }

  /// Multiplies by i^k.
  PauliOp times_i_power(int k) const {
    PauliOp p = *this;
    p.phase_ = ((p.phase_ + k) % 4 + 4) % 4;
    return p;
  }

  bool same_masks(const PauliOp& o) const noexcept { return n_ == o.n_ && x_ == o.x_ && z_ == o.z_; }

  friend bool operator==(const PauliOp& a, const PauliOp& b) noexcept {
    return a.phase_ == b.phase_ && a.same_masks(b);
  }

  /// Orders by mask letters, qubit 1 first, with I < X < Y < Z; phase last.
  friend bool lexicographic_less(const PauliOp& a, const PauliOp& b) {
    for (std::size_t q = 0; q < std::min(a.n_, b.n_); ++q) {
      const char la = a.letter(q), lb = b.letter(q);
      if (la != lb) return la < lb;
    }
    if (a.n_ != b.n_) return a.n_ < b.n_;
    return a.phase_ < b.phase_;
  }

  /// "+XYZ", "-XYZ", "+iXYZ", "-iXYZ"; `with_sign=false` drops the prefix.
  std::string to_string(bool with_sign = true) const {
    std::string s;
    if (with_sign) {
      static constexpr const char* kPrefix[4] = {"+", "+i", "-", "-i"};
      s = kPrefix[phase_];
    }
    s.reserve(s.size() + n_);
    for (std::size_t q = 0; q < n_; ++q) s.push_back(letter(q));
    return s;
  }

  void set_letter(std::size_t q, char letter) {
    if (q >= n_) throw DomainError("qubit index " + std::to_string(q) + " out of range");
    bool xb = false, zb = false;
    switch (letter) {
      case 'I': break;
      case 'X': xb = true; break;
      case 'Y': xb = zb = true; break;
      case 'Z': zb = true; break;
      default: throw DomainError(std::string("invalid Pauli letter '") + letter + "'");
    }
    const std::uint64_t bit = std::uint64_t{1} << (q & 63);
    x_[q >> 6] = xb ? (x_[q >> 6] | bit) : (x_[q >> 6] & ~bit);
    z_[q >> 6] = zb ? (z_[q >> 6] | bit) : (z_[q >> 6] & ~bit);
  }

  friend PauliOp operator*(const PauliOp& a, const PauliOp& b);
  friend bool commutes(const PauliOp& a, const PauliOp& b);

 private:
  static std::size_t word_count(std::size_t n) { return (n + 63) / 64; }

  std::size_t n_ = 0;
  std::vector<std::uint64_t> x_;
  std::vector<std::uint64_t> z_;
  int phase_ = 0;
};

inline void require_same_size(const PauliOp& a, const PauliOp& b) {
  if (a.num_qubits() != b.num_qubits()) throw SizeMismatch(a.num_qubits(), b.num_qubits());
}

/// Group product a*b with exact phase.
inline PauliOp operator*(const PauliOp& a, const PauliOp& b) {
  require_same_size(a, b);
  PauliOp r(a.n_);
  int exponent = a.phase_ + b.phase_;
  for (std::size_t w = 0; w < a.x_.size(); ++w) {
    const std::uint64_t ax = a.x_[w] & ~a.z_[w], ay = a.x_[w] & a.z_[w], az = ~a.x_[w] & a.z_[w];
    const std::uint64_t bx = b.x_[w] & ~b.z_[w], by = b.x_[w] & b.z_[w], bz = ~b.x_[w] & b.z_[w];
    // XY = iZ, YZ = iX, ZX = iY; the reversed orders pick up -i.
    const std::uint64_t plus = (ax & by) | (ay & bz) | (az & bx);
    const std::uint64_t minus = (ay & bx) | (az & by) | (ax & bz);
    exponent += std::popcount(plus) - std::popcount(minus);
    r.x_[w] = a.x_[w] ^ b.x_[w];
    r.z_[w] = a.z_[w] ^ b.z_[w];
  }
  r.phase_ = ((exponent % 4) + 4) % 4;
  return r;
}

inline PauliOp mul(const PauliOp& a, const PauliOp& b) { return a * b; }

/// True iff the symplectic inner product vanishes.
inline bool commutes(const PauliOp& a, const PauliOp& b) {
  require_same_size(a, b);
  int parity = 0;
  for (std::size_t w = 0; w < a.x_.size(); ++w)
    parity ^= std::popcount((a.x_[w] & b.z_[w]) ^ (a.z_[w] & b.x_[w])) & 1;
  return parity == 0;
}

inline std::size_t weight(const PauliOp& p) { return p.weight(); }

inline PauliOp PauliOp::parse(std::string_view text) {
  auto trim = [](std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
  };
  text = trim(text);
  int phase = 0;
  if (text.starts_with("+")) {
    text.remove_prefix(1);
  } else if (text.starts_with("-")) {
    phase = 2;
    text.remove_prefix(1);
  } else if (text.starts_with("\xE2\x88\x92")) {  // U+2212 minus sign
    phase = 2;
    text.remove_prefix(3);
  }
  if (text.starts_with("i")) {
    phase += 1;
    text.remove_prefix(1);
  }
  if (text.empty()) throw ParseError(0, "empty Pauli string");
  PauliOp p(text.size());
  for (std::size_t q = 0; q < text.size(); ++q) {
    const char c = text[q];
    if (c != 'I' && c != 'X' && c != 'Y' && c != 'Z')
      throw ParseError(0, "invalid character '" + std::string(1, c) + "' in Pauli string");
    p.set_letter(q, c);
  }
  p.phase_ = phase;
  return p;
}

/// exp(-i*angle_sign*pi/4*gen) * q * exp(+i*angle_sign*pi/4*gen).
///
/// Commuting operands pass through; otherwise the result is -i*angle_sign*gen*q,
/// which is Hermitian whenever gen and q are.
inline PauliOp conjugate_rotation(const PauliOp& gen, int angle_sign, const PauliOp& q) {
  require_same_size(gen, q);
  if (!gen.is_hermitian() || !q.is_hermitian())
    throw DomainError("conjugate_rotation requires Hermitian operands");
  if (angle_sign != 1 && angle_sign != -1) throw DomainError("angle_sign must be +1 or -1");
  if (commutes(gen, q)) return q;
  return (gen * q).times_i_power(angle_sign == 1 ? 3 : 1);
}

/// A real multiple of a phase-free Hermitian Pauli.
struct WeightedTerm {
  double coeff = 0.0;
  PauliOp pauli;

  /// Folds the sign of a Hermitian `signed_pauli` into the coefficient.
  static WeightedTerm from_signed(double coeff, const PauliOp& signed_pauli) {
    return {coeff * signed_pauli.sign(), signed_pauli.unsigned_part()};
  }

  friend bool operator==(const WeightedTerm&, const WeightedTerm&) = default;
};

/// Ordered Hermitian sum of weighted Pauli terms with distinct masks.
class PauliSum {
 public:
  PauliSum() = default;

  PauliSum(std::size_t n, std::vector<WeightedTerm> terms) : n_(n), terms_(std::move(terms)) {
    for (std::size_t i = 0; i < terms_.size(); ++i) {
      const auto& t = terms_[i];
      if (t.pauli.num_qubits() != n_) throw SizeMismatch(n_, t.pauli.num_qubits());
      if (t.pauli.phase() != 0) throw DomainError("PauliSum term must carry phase +1: " + t.pauli.to_string());
      if (!std::isfinite(t.coeff)) throw DomainError("non-finite coefficient in PauliSum");
      for (std::size_t j = 0; j < i; ++j)
        if (terms_[j].pauli.same_masks(t.pauli))
          throw DomainError("duplicate Pauli term " + t.pauli.to_string(false));
    }
  }

  std::size_t num_qubits() const noexcept { return n_; }
  std::size_t size() const noexcept { return terms_.size(); }
  bool empty() const noexcept { return terms_.empty(); }
  const std::vector<WeightedTerm>& terms() const noexcept { return terms_; }
  const WeightedTerm& operator[](std::size_t i) const { return terms_[i]; }
  auto begin() const noexcept { return terms_.begin(); }
  auto end() const noexcept { return terms_.end(); }

  /// Sum of |coeff|, an upper bound on the operator norm.
  double abs_coeff_sum() const noexcept {
    double s = 0;
    for (const auto& t : terms_) s += std::abs(t.coeff);
    return s;
  }

  /// "-1*ZZI + -1*IZZ" style rendering.
  std::string to_string() const {
    std::string out;
    for (const auto& t : terms_) {
      if (!out.empty()) out += " + ";
      out += std::to_string(t.coeff) + "*" + t.pauli.to_string(false);
    }
    return out.empty() ? "0" : out;
  }

  friend bool operator==(const PauliSum&, const PauliSum&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<WeightedTerm> terms_;
};

/// The cos/sin pair produced by a partial rotation of one term.
struct RotationPair {
  WeightedTerm cos_term;
  WeightedTerm sin_term;

  /// The two terms at ramp value f in [0, 1]: c*cos(f*pi/2)*P and c*sin(f*pi/2)*P'.
  std::pair<WeightedTerm, WeightedTerm> at(double f) const {
    const double angle = f * std::numbers::pi / 2;
    return {{cos_term.coeff * std::cos(angle), cos_term.pauli}, {sin_term.coeff * std::sin(angle), sin_term.pauli}};
  }
};

/// Splits exp(-i*s*(pi/4)f*gen) (c P) exp(+i*s*(pi/4)f*gen) into c cos(f pi/2) P + c sin(f pi/2) P'.
inline RotationPair partial_rotation_terms(const PauliOp& gen, int angle_sign, const WeightedTerm& term) {
  if (commutes(gen, term.pauli))
    throw DomainError("partial_rotation_terms: " + gen.to_string(false) + " commutes with " +
                      term.pauli.to_string(false));
  const PauliOp rotated = conjugate_rotation(gen, angle_sign, term.pauli);
  return {term, WeightedTerm::from_signed(term.coeff, rotated)};
}

/// p = i^phase * prod_{j : uses[j]} gens[j], product taken in ascending j.
struct GroupDecomposition {
  std::vector<bool> uses;
  int phase = 0;
};

/// Product of the selected generators in ascending index order.
inline PauliOp product_of(std::span<const PauliOp> gens, const std::vector<bool>& uses, std::size_t n) {
  PauliOp acc(n);
  for (std::size_t j = 0; j < gens.size(); ++j)
    if (uses[j]) acc = acc * gens[j];
  return acc;
}

/// Decides whether `p` lies in <gens> up to a phase, by GF(2) elimination on
/// the symplectic vectors. Generators need not commute or be independent.
inline std::optional<GroupDecomposition> group_membership(const PauliOp& p, std::span<const PauliOp> gens) {
  const std::size_t n = p.num_qubits();
  for (const auto& g : gens) require_same_size(p, g);
  const std::size_t vec_words = 2 * ((n + 63) / 64);
  const std::size_t combo_words = (gens.size() + 63) / 64;

  auto symplectic = [&](const PauliOp& op) {
    std::vector<std::uint64_t> v(vec_words, 0);
    auto xs = op.x_words(), zs = op.z_words();
    std::copy(xs.begin(), xs.end(), v.begin());
    std::copy(zs.begin(), zs.end(), v.begin() + xs.size());
    return v;
  };
  auto lowest_bit = [](const std::vector<std::uint64_t>& v) -> std::optional<std::size_t> {
    for (std::size_t w = 0; w < v.size(); ++w)
      if (v[w]) return w * 64 + std::countr_zero(v[w]);
    return std::nullopt;
  };
  auto test_bit = [](const std::vector<std::uint64_t>& v, std::size_t b) { return (v[b >> 6] >> (b & 63)) & 1u; };
  auto xor_into = [](std::vector<std::uint64_t>& dst, const std::vector<std::uint64_t>& src) {
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] ^= src[i];
  };

  struct Row {
    std::vector<std::uint64_t> vec, combo;
    std::size_t pivot;
  };
  std::vector<Row> basis;
  auto reduce = [&](std::vector<std::uint64_t>& vec, std::vector<std::uint64_t>& combo) {
    for (const auto& row : basis)
      if (test_bit(vec, row.pivot)) {
        xor_into(vec, row.vec);
        xor_into(combo, row.combo);
      }
  };
  for (std::size_t j = 0; j < gens.size(); ++j) {
    auto vec = symplectic(gens[j]);
    std::vector<std::uint64_t> combo(combo_words, 0);
    combo[j >> 6] |= std::uint64_t{1} << (j & 63);
    reduce(vec, combo);
    if (auto piv = lowest_bit(vec)) {
      // Keep the basis fully reduced so a single pass suffices.
      for (auto& row : basis)
        if (test_bit(row.vec, *piv)) {
          xor_into(row.vec, vec);
          xor_into(row.combo, combo);
        }
      basis.push_back({std::move(vec), std::move(combo), *piv});
    }
  }

  auto target = symplectic(p);
  std::vector<std::uint64_t> combo(combo_words, 0);
  reduce(target, combo);
  if (lowest_bit(target)) return std::nullopt;

  GroupDecomposition d;
  d.uses.resize(gens.size());
  for (std::size_t j = 0; j < gens.size(); ++j) d.uses[j] = test_bit(combo, j);
  const PauliOp prod = product_of(gens, d.uses, n);
  // p and prod share masks, so p = i^(p.phase - prod.phase) * prod.
  d.phase = ((p.phase() - prod.phase()) % 4 + 4) % 4;
  return d;
}

inline std::optional<GroupDecomposition> group_membership(const PauliOp& p, const std::vector<PauliOp>& gens) {
  return group_membership(p, std::span<const PauliOp>(gens));
}

}  // namespace hqc
