#include <gtest/gtest.h>

#include <random>

#include "dense_oracle.hpp"
#include "hqc/pauli.hpp"

namespace hqc {
namespace {

using testing::dense;
using testing::random_pauli;

PauliOp P(const char* s) { return PauliOp::parse(s); }

TEST(Pauli, ParseAndFormat) {
  EXPECT_EQ(P("XYZI").to_string(), "+XYZI");
  EXPECT_EQ(P("-ZZ").to_string(), "-ZZ");
  EXPECT_EQ(P("\xE2\x88\x92ZZ").to_string(), "-ZZ");
  EXPECT_EQ(P("+iX").to_string(), "+iX");
  EXPECT_EQ(P("-iX").phase(), 3);
  EXPECT_EQ(P("IXI").letter(1), 'X');
  EXPECT_THROW(P("XQ"), ParseError);
  EXPECT_THROW(P(""), ParseError);
}

TEST(Pauli, MultiplicationExamples) {
  EXPECT_EQ(P("X") * P("Z"), P("-iY"));
  EXPECT_EQ(P("ZZI") * P("IZZ"), P("+ZIZ"));
  EXPECT_EQ(P("Y") * P("Y"), P("I"));
  EXPECT_EQ(P("X") * P("Y"), P("iZ"));
  EXPECT_THROW(P("X") * P("XX"), SizeMismatch);
}

TEST(Pauli, ProductMatchesDenseMatrices) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + trial % 3;
    const PauliOp a = random_pauli(rng, n), b = random_pauli(rng, n);
    EXPECT_TRUE(dense(a * b).isApprox(dense(a) * dense(b), 1e-12)) << a.to_string() << " * " << b.to_string();
  }
}

TEST(Pauli, ProductIsAssociativeAndPhaseExact) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + trial % 130;  // crosses the 64-bit word boundary
    const PauliOp a = random_pauli(rng, n), b = random_pauli(rng, n), c = random_pauli(rng, n);
    ASSERT_EQ((a * b) * c, a * (b * c));
  }
}

TEST(Pauli, CommutationExamples) {
  EXPECT_FALSE(commutes(P("IXI"), P("ZZI")));
  EXPECT_FALSE(commutes(P("IXI"), P("IZZ")));
  EXPECT_TRUE(commutes(P("ZII"), P("ZZI")));
  EXPECT_THROW(commutes(P("X"), P("XX")), SizeMismatch);
}

TEST(Pauli, CommutationMatchesDense) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + trial % 3;
    const PauliOp a = random_pauli(rng, n), b = random_pauli(rng, n);
    const bool dense_commutes = (dense(a) * dense(b) - dense(b) * dense(a)).norm() < 1e-12;
    EXPECT_EQ(commutes(a, b), dense_commutes);
  }
}

TEST(Pauli, Weight) {
  EXPECT_EQ(weight(P("ZZI")), 2u);
  EXPECT_EQ(weight(PauliOp(5)), 0u);
  // X on qubits 1,3,4,6 of both 7-qubit blocks.
  EXPECT_EQ(weight(P("XIXXIXIXIXXIXI")), 8u);
}

TEST(Pauli, ConjugateRotationExamples) {
  EXPECT_EQ(conjugate_rotation(P("XII"), +1, P("-ZZI")), P("+YZI"));
  EXPECT_EQ(conjugate_rotation(P("ZIIIIIIZIIIIII"), -1, P("-XIXXIXIIIIIIII")), P("+YIXXIXIZIIIIII"));
  EXPECT_EQ(conjugate_rotation(P("Z"), +1, P("X")), P("Y"));
  EXPECT_EQ(conjugate_rotation(P("Z"), +1, P("Z")), P("Z"));
  EXPECT_THROW(conjugate_rotation(P("Z"), +1, P("iX")), DomainError);
  EXPECT_THROW(conjugate_rotation(P("Z"), +1, P("XX")), SizeMismatch);
}

TEST(Pauli, ConjugateRotationMatchesDense) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + trial % 3;
    const PauliOp gen = random_pauli(rng, n, true).unsigned_part();
    const PauliOp q = random_pauli(rng, n, true);
    const int sign = trial % 2 ? 1 : -1;
    const auto u = testing::quarter_rotation(gen, sign);
    EXPECT_TRUE(dense(conjugate_rotation(gen, sign, q)).isApprox(u * dense(q) * u.adjoint(), 1e-12));
  }
}

// Applying the quarter rotation twice is conjugation by gen itself.
void check_double_rotation(const PauliOp& gen, const PauliOp& q) {
  for (int sign : {+1, -1}) {
    const PauliOp twice = conjugate_rotation(gen, sign, conjugate_rotation(gen, sign, q));
    ASSERT_EQ(twice, commutes(gen, q) ? q : q.negated()) << gen.to_string() << " on " << q.to_string();
  }
}

TEST(Pauli, DoubleRotationFlipsAnticommutingSignsExhaustive) {
  for (std::size_t n = 1; n <= 3; ++n) {
    const std::size_t count = std::size_t{1} << (2 * n);
    auto nth = [n](std::size_t code) {
      static constexpr char kLetters[4] = {'I', 'X', 'Y', 'Z'};
      PauliOp p(n);
      for (std::size_t q = 0; q < n; ++q) p.set_letter(q, kLetters[(code >> (2 * q)) & 3]);
      return p;
    };
    for (std::size_t g = 0; g < count; ++g)
      for (std::size_t h = 0; h < count; ++h) {
        check_double_rotation(nth(g), nth(h));
        check_double_rotation(nth(g), nth(h).negated());
      }
  }
}

TEST(Pauli, DoubleRotationFlipsAnticommutingSignsRandom) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t n = 1 + trial % 14;
    check_double_rotation(random_pauli(rng, n, true).unsigned_part(), random_pauli(rng, n, true));
  }
}

TEST(Pauli, PartialRotationTermsExamples) {
  const auto pair = partial_rotation_terms(P("XII"), +1, {-1.0, P("ZZI")});
  EXPECT_EQ(pair.cos_term, (WeightedTerm{-1.0, P("ZZI")}));
  EXPECT_EQ(pair.sin_term, (WeightedTerm{+1.0, P("YZI")}));

  const auto half = partial_rotation_terms(P("IXI"), +1, {-0.5, P("IZZ")});
  EXPECT_EQ(half.cos_term, (WeightedTerm{-0.5, P("IZZ")}));
  EXPECT_EQ(half.sin_term, (WeightedTerm{+0.5, P("IYZ")}));

  auto [c0, s0] = pair.at(0.0);
  EXPECT_DOUBLE_EQ(c0.coeff, -1.0);
  EXPECT_DOUBLE_EQ(s0.coeff, 0.0);
  auto [c1, s1] = pair.at(1.0);
  EXPECT_NEAR(c1.coeff, 0.0, 1e-15);
  EXPECT_DOUBLE_EQ(s1.coeff, 1.0);
  EXPECT_EQ(WeightedTerm::from_signed(-1.0, conjugate_rotation(P("XII"), +1, P("ZZI"))), pair.sin_term);

  EXPECT_THROW(partial_rotation_terms(P("ZII"), +1, {1.0, P("ZZI")}), DomainError);
}

TEST(Pauli, PartialRotationHalfwayAndDenseReconstruction) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int checked = 0;
  while (checked < 100) {
    const std::size_t n = 1 + checked % 3;
    const PauliOp gen = random_pauli(rng, n, true).unsigned_part();
    const PauliOp q = random_pauli(rng, n).unsigned_part();
    if (commutes(gen, q)) continue;
    ++checked;
    const double c = 2 * unit(rng) - 1;
    const int sign = checked % 2 ? 1 : -1;
    const auto pair = partial_rotation_terms(gen, sign, {c, q});

    auto [ch, sh] = pair.at(0.5);
    EXPECT_NEAR(std::abs(ch.coeff), std::abs(c) * std::sqrt(0.5), 1e-14);
    EXPECT_NEAR(std::abs(sh.coeff), std::abs(c) * std::sqrt(0.5), 1e-14);
    EXPECT_FALSE(commutes(ch.pauli, sh.pauli));

    const double f = unit(rng);
    const testing::Mat g = dense(gen);
    const double angle = sign * f * std::numbers::pi / 4;
    const testing::Mat u =
        std::cos(angle) * testing::Mat::Identity(g.rows(), g.cols()) - testing::cd{0, std::sin(angle)} * g;
    auto [cf, sf] = pair.at(f);
    const testing::Mat rebuilt = cf.coeff * dense(cf.pauli) + sf.coeff * dense(sf.pauli);
    EXPECT_TRUE(rebuilt.isApprox(u * (c * dense(q)) * u.adjoint(), 1e-12));
  }
}

TEST(Pauli, GroupMembershipExamples) {
  const std::vector<PauliOp> gens = {P("ZZI"), P("IZZ")};
  auto d = group_membership(P("ZZI"), gens);
  ASSERT_TRUE(d);
  EXPECT_EQ(d->uses, (std::vector<bool>{true, false}));
  EXPECT_EQ(d->phase, 0);
  EXPECT_FALSE(group_membership(P("ZZZ"), gens));
  EXPECT_FALSE(group_membership(P("XII"), gens));
  auto neg = group_membership(P("-ZIZ"), gens);
  ASSERT_TRUE(neg);
  EXPECT_EQ(neg->phase, 2);
  EXPECT_THROW(group_membership(P("ZZ"), gens), SizeMismatch);
}

TEST(Pauli, GroupMembershipReproducesOperator) {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + trial % 20;
    const std::size_t m = 1 + trial % 7;
    std::vector<PauliOp> gens;
    for (std::size_t j = 0; j < m; ++j) gens.push_back(random_pauli(rng, n, true));
    // Half the targets are built inside the group, the rest are random.
    PauliOp target = random_pauli(rng, n);
    if (trial % 2 == 0) {
      target = PauliOp(n).times_i_power(static_cast<int>(rng() % 4));
      for (const auto& g : gens)
        if (rng() % 2) target = target * g;
    }
    const auto d = group_membership(target, gens);
    if (trial % 2 == 0) {
      ASSERT_TRUE(d);
    }
    if (d) {
      const PauliOp rebuilt = product_of(gens, d->uses, n).times_i_power(d->phase);
      ASSERT_EQ(rebuilt, target);
    }
  }
}

TEST(Pauli, PauliSumRejectsDuplicatesAndSignedTerms) {
  EXPECT_THROW(PauliSum(2, {{1.0, P("ZZ")}, {2.0, P("ZZ")}}), DomainError);
  EXPECT_THROW(PauliSum(2, {{1.0, P("-ZZ")}}), DomainError);
  EXPECT_THROW(PauliSum(3, {{1.0, P("ZZ")}}), SizeMismatch);
  const PauliSum h(2, {{-1.0, P("ZZ")}, {0.5, P("XI")}});
  EXPECT_DOUBLE_EQ(h.abs_coeff_sum(), 1.5);
}

}  // namespace
}  // namespace hqc
