#pragma once

// Stabilizer codes: validation, syndromes, local error sets, a lookup decoder
// and explicit codeword bases.

#include <algorithm>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "hqc/errors.hpp"
#include "hqc/pauli.hpp"
#include "hqc/state.hpp"

namespace hqc {

struct StabilizerCode {
  std::size_t n = 0;
  std::size_t k = 0;
  std::vector<PauliOp> generators;
  std::vector<PauliOp> logical_x;
  std::vector<PauliOp> logical_z;
  std::optional<std::size_t> distance;

  std::size_t num_generators() const noexcept { return generators.size(); }
  std::size_t logical_dim() const noexcept { return std::size_t{1} << k; }
};

struct ValidationReport {
  std::vector<std::string> violations;

  bool ok() const noexcept { return violations.empty(); }
  void fail(std::string msg) { violations.push_back(std::move(msg)); }
};

inline ValidationReport validate(const StabilizerCode& code) {
  ValidationReport r;
  auto check_size = [&](const PauliOp& p, const std::string& what) {
    if (p.num_qubits() != code.n) {
      r.fail(what + " acts on " + std::to_string(p.num_qubits()) + " qubits, expected " + std::to_string(code.n));
      return false;
    }
    return true;
  };
  if (code.k > code.n) r.fail("k exceeds n");
  if (code.generators.size() + code.k != code.n)
    r.fail("expected n-k = " + std::to_string(code.n - std::min(code.n, code.k)) + " generators, got " +
           std::to_string(code.generators.size()));
  if (code.logical_x.size() != code.k || code.logical_z.size() != code.k)
    r.fail("expected " + std::to_string(code.k) + " logical X and Z operators");
  bool sizes_ok = true;
  for (std::size_t j = 0; j < code.generators.size(); ++j)
    sizes_ok &= check_size(code.generators[j], "generator " + std::to_string(j + 1));
  for (std::size_t i = 0; i < code.logical_x.size(); ++i)
    sizes_ok &= check_size(code.logical_x[i], "logical X " + std::to_string(i + 1));
  for (std::size_t i = 0; i < code.logical_z.size(); ++i)
    sizes_ok &= check_size(code.logical_z[i], "logical Z " + std::to_string(i + 1));
  if (!sizes_ok) return r;

  const auto& gens = code.generators;
  for (std::size_t j = 0; j < gens.size(); ++j) {
    if (gens[j].phase() != 0) r.fail("generator " + std::to_string(j + 1) + " must carry phase +1");
    for (std::size_t l = j + 1; l < gens.size(); ++l)
      if (!commutes(gens[j], gens[l]))
        r.fail("generators " + std::to_string(j + 1) + " and " + std::to_string(l + 1) + " anticommute");
  }
  for (std::size_t j = 0; j < gens.size(); ++j) {
    std::vector<PauliOp> others;
    for (std::size_t l = 0; l < j; ++l) others.push_back(gens[l]);
    if (group_membership(gens[j], others))
      r.fail("generator " + std::to_string(j + 1) + " depends on earlier generators");
  }

  for (std::size_t i = 0; i < code.k && i < code.logical_x.size() && i < code.logical_z.size(); ++i) {
    for (std::size_t l = 0; l < code.k; ++l) {
      const bool should_anticommute = (i == l);
      if (commutes(code.logical_x[i], code.logical_z[l]) == should_anticommute)
        r.fail("logical X" + std::to_string(i + 1) + " and Z" + std::to_string(l + 1) +
               (should_anticommute ? " must anticommute" : " must commute"));
      if (l > i && !commutes(code.logical_x[i], code.logical_x[l]))
        r.fail("logical X operators " + std::to_string(i + 1) + "," + std::to_string(l + 1) + " anticommute");
      if (l > i && !commutes(code.logical_z[i], code.logical_z[l]))
        r.fail("logical Z operators " + std::to_string(i + 1) + "," + std::to_string(l + 1) + " anticommute");
    }
  }
  auto check_logical = [&](const PauliOp& op, const std::string& name) {
    for (std::size_t j = 0; j < gens.size(); ++j)
      if (!commutes(op, gens[j])) r.fail(name + " anticommutes with generator " + std::to_string(j + 1));
    if (group_membership(op, gens)) r.fail(name + " lies in the stabilizer group");
  };
  for (std::size_t i = 0; i < code.logical_x.size(); ++i) check_logical(code.logical_x[i], "logical X" + std::to_string(i + 1));
  for (std::size_t i = 0; i < code.logical_z.size(); ++i) check_logical(code.logical_z[i], "logical Z" + std::to_string(i + 1));
  return r;
}

/// One bit per generator: 1 iff the operator anticommutes with it.
using Syndrome = std::vector<std::uint8_t>;

inline Syndrome syndrome(std::span<const PauliOp> gens, const PauliOp& e) {
  Syndrome s(gens.size());
  for (std::size_t j = 0; j < gens.size(); ++j) s[j] = commutes(gens[j], e) ? 0 : 1;
  return s;
}

inline Syndrome syndrome(const StabilizerCode& code, const PauliOp& e) {
  if (e.num_qubits() != code.n) throw SizeMismatch(code.n, e.num_qubits());
  return syndrome(code.generators, e);
}

/// Generator j maps to bit j.
inline std::uint64_t syndrome_index(const Syndrome& s) {
  std::uint64_t idx = 0;
  for (std::size_t j = 0; j < s.size(); ++j) idx |= std::uint64_t{s[j]} << j;
  return idx;
}

inline std::string syndrome_string(const Syndrome& s) {
  std::string out;
  for (auto b : s) out.push_back(b ? '1' : '0');
  return out;
}

inline bool is_trivial(const Syndrome& s) {
  return std::all_of(s.begin(), s.end(), [](auto b) { return b == 0; });
}

struct ErrorSet {
  std::vector<PauliOp> elements;
  std::string label;
};

namespace detail {

/// Visits every Pauli of exactly weight `w` over `letters`, positions ascending.
template <typename Fn>
void for_each_weight(std::size_t n, std::size_t w, const std::string& letters, Fn&& fn) {
  if (w > n) return;
  std::vector<std::size_t> pos(w);
  for (std::size_t i = 0; i < w; ++i) pos[i] = i;
  while (true) {
    std::vector<std::size_t> choice(w, 0);
    while (true) {
      PauliOp p(n);
      for (std::size_t i = 0; i < w; ++i) p.set_letter(pos[i], letters[choice[i]]);
      fn(p);
      std::size_t i = w;
      while (i > 0 && ++choice[i - 1] == letters.size()) choice[--i] = 0;
      if (i == 0) break;
    }
    // Next combination of positions.
    std::size_t i = w;
    while (i > 0 && pos[i - 1] == n - w + i - 1) --i;
    if (i == 0) break;
    ++pos[i - 1];
    for (std::size_t j = i; j < w; ++j) pos[j] = pos[j - 1] + 1;
  }
}

}  // namespace detail

/// All nontrivial Hermitian Paulis of weight <= max_weight, restricted to the
/// letters in `pauli_filter` (any of "XYZ") when given; just {I} for weight 0.
/// Ordered by weight, then qubit positions, then letter.
inline ErrorSet local_error_set(std::size_t n, std::size_t max_weight,
                                const std::optional<std::string>& pauli_filter = std::nullopt) {
  std::string letters = "XYZ";
  if (pauli_filter) {
    letters.clear();
    for (char c : std::string("XYZ"))
      if (pauli_filter->find(c) != std::string::npos) letters.push_back(c);
    for (char c : *pauli_filter)
      if (c != 'X' && c != 'Y' && c != 'Z') throw DomainError(std::string("invalid Pauli filter letter '") + c + "'");
  }
  ErrorSet set;
  set.label = "weight<=" + std::to_string(max_weight) + (pauli_filter ? " {" + letters + "}" : "");
  if (max_weight == 0) set.elements.push_back(PauliOp(n));
  for (std::size_t w = 1; w <= max_weight && !letters.empty(); ++w)
    detail::for_each_weight(n, w, letters, [&](const PauliOp& p) { set.elements.push_back(p); });
  return set;
}

inline ErrorSet local_error_set(const StabilizerCode& code, std::size_t max_weight,
                                const std::optional<std::string>& pauli_filter = std::nullopt) {
  return local_error_set(code.n, max_weight, pauli_filter);
}

/// Local error set implied by the declared distance: weight <= floor((d-1)/2),
/// or only the identity when no distance is declared.
inline ErrorSet default_local_errors(const StabilizerCode& code) {
  const std::size_t w = code.distance ? (*code.distance - 1) / 2 : 0;
  return local_error_set(code, w);
}

/// Syndrome -> minimum-weight correction lookup.
class SyndromeTable {
 public:
  static constexpr std::size_t kMaxGenerators = 20;

  SyndromeTable() = default;
  SyndromeTable(std::vector<PauliOp> generators, std::vector<PauliOp> corrections)
      : generators_(std::move(generators)), corrections_(std::move(corrections)) {}

  const PauliOp& correction(const Syndrome& s) const {
    if (s.size() != generators_.size()) throw SizeMismatch(generators_.size(), s.size());
    return corrections_.at(syndrome_index(s));
  }

  std::size_t size() const noexcept { return corrections_.size(); }
  const std::vector<PauliOp>& generators() const noexcept { return generators_; }

 private:
  std::vector<PauliOp> generators_;
  std::vector<PauliOp> corrections_;
};

/// Breadth-first over increasing weight; within a weight the lexicographically
/// smallest Pauli string (I < X < Y < Z, qubit 1 first) wins.
inline SyndromeTable build_decoder(const StabilizerCode& code) {
  const std::size_t m = code.generators.size();
  if (m > SyndromeTable::kMaxGenerators)
    throw DomainError("decoder table guard: " + std::to_string(m) + " generators exceeds " +
                      std::to_string(SyndromeTable::kMaxGenerators));
  const std::size_t table_size = std::size_t{1} << m;
  std::vector<std::optional<PauliOp>> table(table_size);
  std::size_t filled = 0;
  for (std::size_t w = 0; w <= code.n && filled < table_size; ++w) {
    std::vector<PauliOp> layer;
    if (w == 0) {
      layer.push_back(PauliOp(code.n));
    } else {
      detail::for_each_weight(code.n, w, "XYZ", [&](const PauliOp& p) { layer.push_back(p); });
    }
    std::sort(layer.begin(), layer.end(), [](const PauliOp& a, const PauliOp& b) { return lexicographic_less(a, b); });
    for (const auto& p : layer) {
      auto& slot = table[syndrome_index(syndrome(code, p))];
      if (!slot) {
        slot = p;
        if (++filled == table_size) break;
      }
    }
  }
  if (filled != table_size) throw DomainError("decoder: some syndromes are unreachable (dependent generators?)");
  std::vector<PauliOp> corrections;
  corrections.reserve(table_size);
  for (auto& c : table) corrections.push_back(std::move(*c));
  return SyndromeTable(code.generators, std::move(corrections));
}

/// True iff the decoder maps e back into the stabilizer group.
inline bool decoder_corrects(const StabilizerCode& code, const SyndromeTable& table, const PauliOp& e) {
  const PauliOp residue = table.correction(syndrome(code, e)) * e;
  return group_membership(residue, code.generators).has_value();
}

/// Trace of the code projector, from the 2^m group elements: only elements
/// proportional to the identity contribute.
inline double code_projector_trace(const StabilizerCode& code) {
  const std::size_t m = code.generators.size();
  if (m > 24) throw DomainError("projector trace guard exceeded");
  double identity_sum = 0.0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << m); ++mask) {
    PauliOp acc(code.n);
    for (std::size_t j = 0; j < m; ++j)
      if ((mask >> j) & 1u) acc = acc * code.generators[j];
    if (acc.is_identity_up_to_phase()) {
      if (!acc.is_hermitian()) return 0.0;
      identity_sum += acc.sign();
    }
  }
  // Tr P = 2^n / 2^m * sum over identity-like elements of their sign.
  return std::ldexp(identity_sum, static_cast<int>(code.n) - static_cast<int>(m));
}

/// Orthonormal basis of the code space, ordered by logical-Z pattern with
/// logical qubit 1 most significant. Logical |0..0> comes from projecting a
/// computational seed; the others are obtained by applying logical X's.
inline std::vector<StateVector> codeword_basis(const StabilizerCode& code) {
  if (code.n > kMaxDenseQubits) throw DomainError("codeword_basis: n exceeds dense guard");
  const double trace = code_projector_trace(code);
  if (std::abs(trace - static_cast<double>(code.logical_dim())) > 1e-9)
    throw DomainError("code projector rank " + std::to_string(trace) + " != K = " + std::to_string(code.logical_dim()));

  auto project_zero = [&](StateVector v) {
    for (const auto& g : code.generators) v = project_eigenspace(g, +1, v);
    for (const auto& lz : code.logical_z) v = project_eigenspace(lz, +1, v);
    return v;
  };
  std::optional<StateVector> zero;
  const std::uint64_t dim = std::uint64_t{1} << code.n;
  for (std::uint64_t seed = 0; seed < dim && !zero; ++seed) {
    StateVector v = project_zero(StateVector::basis(code.n, seed));
    if (v.norm_squared() > 1e-6) {
      v.normalize();
      zero = std::move(v);
    }
  }
  if (!zero) throw DomainError("codeword_basis: no seed overlaps the logical |0> state");

  const std::size_t K = code.logical_dim();
  std::vector<StateVector> basis;
  basis.reserve(K);
  for (std::size_t idx = 0; idx < K; ++idx) {
    StateVector v = *zero;
    for (std::size_t i = 0; i < code.k; ++i)
      if ((idx >> (code.k - 1 - i)) & 1u) v = apply_pauli(code.logical_x[i], v);
    basis.push_back(std::move(v));
  }
  // The logical X's are Paulis, so the vectors are already orthonormal; a
  // Gram-Schmidt pass guards against rounding only.
  for (std::size_t a = 0; a < K; ++a) {
    for (std::size_t b = 0; b < a; ++b) basis[a].axpy(-inner(basis[b], basis[a]), basis[b]);
    basis[a].normalize();
  }
  return basis;
}

namespace detail {

inline std::vector<std::string> split_ws(const std::string& line) {
  std::istringstream is(line);
  std::vector<std::string> out;
  for (std::string tok; is >> tok;) out.push_back(tok);
  return out;
}

inline std::string strip_comment(const std::string& line) {
  const auto hash = line.find('#');
  return hash == std::string::npos ? line : line.substr(0, hash);
}

inline std::size_t parse_count(const std::string& tok, std::size_t line) {
  try {
    std::size_t pos = 0;
    const long v = std::stol(tok, &pos);
    if (pos != tok.size() || v < 0) throw std::invalid_argument(tok);
    return static_cast<std::size_t>(v);
  } catch (const std::exception&) {
    throw ParseError(line, "expected a non-negative integer, got '" + tok + "'");
  }
}

inline PauliOp parse_pauli_at(const std::string& tok, std::size_t line, std::size_t n) {
  PauliOp p;
  try {
    p = PauliOp::parse(tok);
  } catch (const ParseError& e) {
    throw ParseError(line, e.what());
  }
  if (n != 0 && p.num_qubits() != n)
    throw ParseError(line, "Pauli string '" + tok + "' has " + std::to_string(p.num_qubits()) + " qubits, expected " +
                               std::to_string(n));
  return p;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(0, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace detail

/// Parses the line-oriented code format (`n`, `k`, `d`, `stab`, `logx`, `logz`).
inline StabilizerCode parse_code(const std::string& text) {
  StabilizerCode code;
  std::optional<std::size_t> n, k;
  std::istringstream in(text);
  std::size_t lineno = 0;
  for (std::string raw; std::getline(in, raw);) {
    ++lineno;
    const auto tok = detail::split_ws(detail::strip_comment(raw));
    if (tok.empty()) continue;
    if (tok.size() != 2) throw ParseError(lineno, "expected '<keyword> <value>'");
    const std::string& key = tok[0];
    if (key == "n") {
      n = detail::parse_count(tok[1], lineno);
    } else if (key == "k") {
      k = detail::parse_count(tok[1], lineno);
    } else if (key == "d") {
      code.distance = detail::parse_count(tok[1], lineno);
      if (*code.distance == 0) throw ParseError(lineno, "distance must be positive");
    } else if (key == "stab" || key == "logx" || key == "logz") {
      if (!n) throw ParseError(lineno, "'n' must precede Pauli lines");
      PauliOp p = detail::parse_pauli_at(tok[1], lineno, *n);
      if (key == "stab") {
        if (p.phase() != 0) throw ParseError(lineno, "stabilizer generators must carry phase +1");
        code.generators.push_back(std::move(p));
      } else if (key == "logx") {
        code.logical_x.push_back(std::move(p));
      } else {
        code.logical_z.push_back(std::move(p));
      }
    } else {
      throw ParseError(lineno, "unknown keyword '" + key + "'");
    }
  }
  if (!n) throw ParseError(lineno, "missing 'n'");
  if (!k) throw ParseError(lineno, "missing 'k'");
  code.n = *n;
  code.k = *k;
  if (code.generators.size() + code.k != code.n)
    throw ParseError(lineno, "expected " + std::to_string(code.n - std::min(code.n, code.k)) + " 'stab' lines, got " +
                                 std::to_string(code.generators.size()));
  if (code.logical_x.size() != code.k || code.logical_z.size() != code.k)
    throw ParseError(lineno, "expected " + std::to_string(code.k) + " 'logx' and 'logz' lines");
  return code;
}

inline StabilizerCode load_code(const std::string& path) { return parse_code(detail::read_file(path)); }

/// Formats a code back into the text format.
inline std::string format_code(const StabilizerCode& code) {
  std::ostringstream os;
  os << "n " << code.n << "\nk " << code.k << "\n";
  if (code.distance) os << "d " << *code.distance << "\n";
  for (const auto& g : code.generators) os << "stab " << g.to_string(false) << "\n";
  for (const auto& x : code.logical_x) os << "logx " << x.to_string(x.phase() != 0) << "\n";
  for (const auto& z : code.logical_z) os << "logz " << z.to_string(z.phase() != 0) << "\n";
  return os.str();
}

}  // namespace hqc
