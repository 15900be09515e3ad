#include "platoon/ffmatrix.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <vector>

#include "support/oracles.hpp"

namespace platoon::linalg {
namespace {

// chi^2 quantile at 1 - 0.001 with 15 degrees of freedom.
constexpr double kChiSquare15At999 = 37.697;

std::vector<std::vector<int>> to_ints(const CoeffMatrix& a) {
  std::vector<std::vector<int>> out(a.rows(), std::vector<int>(a.cols()));
  for (std::size_t r = 0; r < a.rows(); ++r) {
    for (std::size_t c = 0; c < a.cols(); ++c) out[r][c] = a.row(r)[c];
  }
  return out;
}

CoeffMatrix binary_matrix(int rows, int cols, std::uint64_t code) {
  CoeffMatrix a(FieldContext(1), static_cast<std::size_t>(rows), static_cast<std::size_t>(cols));
  for (int i = 0; i < rows * cols; ++i) {
    a.set_symbol(static_cast<std::size_t>(i / cols), static_cast<std::size_t>(i % cols), (code >> i) & 1U);
  }
  return a;
}

TEST(Rank, IdentityAndZero) {
  for (std::size_t n : {1U, 4U, 17U}) EXPECT_EQ(rank(CoeffMatrix::identity(FieldContext(8), n)), n);
  EXPECT_EQ(rank(CoeffMatrix(FieldContext(8), 3, 5)), 0U);
}

TEST(Rank, BinaryTwoByTwoEnumeration) {
  int full = 0;
  for (std::uint64_t code = 0; code < 16; ++code) full += rank(binary_matrix(2, 2, code)) == 2;
  EXPECT_EQ(full, 6);
}

TEST(Rank, AgreesWithIntegerModTwoEliminationExhaustively) {
  for (int rows = 1; rows <= 3; ++rows) {
    for (int cols = 1; cols <= 3; ++cols) {
      for (std::uint64_t code = 0; code < (std::uint64_t{1} << (rows * cols)); ++code) {
        const CoeffMatrix a = binary_matrix(rows, cols, code);
        ASSERT_EQ(static_cast<int>(rank(a)), testing::reference_rank_mod2(to_ints(a)));
      }
    }
  }
  EXPECT_EQ(testing::count_full_rank_binary(3, 3), 168U);
}

TEST(Rank, ScalingAndRowSumsPreserveRank) {
  const FieldContext ctx(8);
  SeededRng rng(3);
  CoeffMatrix a = random_matrix(rng, ctx, 3, 6);
  CoeffMatrix b(ctx, 4, 6);
  for (std::size_t c = 0; c < 6; ++c) {
    b.set_symbol(0, c, a.row(0)[c]);
    b.set_symbol(1, c, ctx.mul(0x53, a.row(1)[c]));
    b.set_symbol(2, c, a.row(2)[c]);
    b.set_symbol(3, c, a.row(0)[c] ^ ctx.mul(7, a.row(2)[c]));
  }
  EXPECT_EQ(rank(b), rank(a));
}

TEST(EchelonBasis, ZeroAndRepeatedRowsDoNotIncreaseRank) {
  const FieldContext ctx(8);
  EchelonBasis basis(ctx, 5);
  const std::vector<gf::Symbol> zero(5, 0);
  EXPECT_FALSE(basis.insert(zero));
  EXPECT_EQ(basis.rank(), 0U);
  const std::vector<gf::Symbol> row{0, 3, 0, 9, 1};
  EXPECT_TRUE(basis.insert(row));
  EXPECT_FALSE(basis.insert(row));
  std::vector<gf::Symbol> scaled(5);
  for (std::size_t i = 0; i < 5; ++i) scaled[i] = ctx.mul(0x1D, row[i]);
  EXPECT_TRUE(basis.contains(scaled));
  EXPECT_FALSE(basis.insert(scaled));
  EXPECT_EQ(basis.rank(), 1U);
  EXPECT_EQ(basis.inserted(), 4U);
}

TEST(EchelonBasis, FieldElementRows) {
  const FieldContext ctx(4);
  EchelonBasis basis(ctx, 2);
  const std::vector<FieldElement> row{ctx.element(3), ctx.element(5)};
  EXPECT_TRUE(basis.insert(row));
  EXPECT_TRUE(basis.contains(row));
  const FieldContext other(3);
  const std::vector<FieldElement> foreign{other.element(1), other.element(1)};
  EXPECT_THROW(basis.insert(foreign), UsageError);
}

TEST(EchelonBasis, LengthMismatchIsUsageError) {
  EchelonBasis basis(FieldContext(8), 4);
  const std::vector<gf::Symbol> short_row(3, 1);
  EXPECT_THROW(basis.insert(short_row), UsageError);
  EXPECT_THROW((void)basis.contains(short_row), UsageError);
}

void expect_well_formed(const EchelonBasis& basis) {
  std::vector<std::size_t> pivots;
  for (std::size_t i = 0; i < basis.rank(); ++i) {
    const auto row = basis.basis_row(i);
    const std::size_t p = basis.pivot(i);
    ASSERT_EQ(row[p], 1);
    for (std::size_t c = 0; c < p; ++c) ASSERT_EQ(row[c], 0);
    pivots.push_back(p);
  }
  std::sort(pivots.begin(), pivots.end());
  ASSERT_EQ(std::adjacent_find(pivots.begin(), pivots.end()), pivots.end());
}

TEST(EchelonBasis, IncrementalRankMatchesBatchRank) {
  SeededRng rng(8128);
  for (unsigned q : {1U, 4U, 8U}) {
    const FieldContext ctx(q);
    for (int trial = 0; trial < 1000; ++trial) {
      const CoeffMatrix a = random_matrix(rng, ctx, 8, 12);
      EchelonBasis basis(ctx, 12);
      for (std::size_t r = 0; r < a.rows(); ++r) {
        const std::size_t before = basis.rank();
        const bool grew = basis.insert(a.row(r));
        ASSERT_EQ(basis.rank(), before + (grew ? 1 : 0));
        CoeffMatrix prefix(ctx, r + 1, 12);
        for (std::size_t i = 0; i <= r; ++i) std::copy(a.row(i).begin(), a.row(i).end(), prefix.row(i).begin());
        ASSERT_EQ(basis.rank(), rank(prefix));
      }
      expect_well_formed(basis);
    }
  }
}

TEST(EchelonBasis, InsertionOrderDoesNotChangeRank) {
  SeededRng rng(77);
  for (unsigned q : {1U, 2U, 8U}) {
    const FieldContext ctx(q);
    for (int trial = 0; trial < 200; ++trial) {
      // Tall, wide and square shapes; low-rank products make q = 8 interesting.
      const std::size_t rows = 2 + trial % 9;
      const std::size_t cols = 2 + (trial * 7) % 9;
      CoeffMatrix a = random_matrix(rng, ctx, rows, cols);
      if (trial % 3 == 0 && rows > 2) {
        for (std::size_t c = 0; c < cols; ++c) a.row(rows - 1)[c] = a.row(0)[c] ^ a.row(1)[c];
      }
      std::vector<std::size_t> order(rows);
      std::iota(order.begin(), order.end(), 0U);
      std::size_t reference = 0;
      for (int perm = 0; perm < 5; ++perm) {
        std::shuffle(order.begin(), order.end(), rng);
        EchelonBasis basis(ctx, cols);
        for (std::size_t r : order) basis.insert(a.row(r));
        if (perm == 0) reference = basis.rank();
        ASSERT_EQ(basis.rank(), reference);
      }
      ASSERT_EQ(reference, rank(a));
    }
  }
}

TEST(RandomMatrix, DeterministicUnderFixedSeed) {
  const FieldContext ctx(8);
  SeededRng a(5);
  SeededRng b(5);
  EXPECT_EQ(random_matrix(a, ctx, 6, 9), random_matrix(b, ctx, 6, 9));
  SeededRng c(6);
  EXPECT_THROW(random_matrix(c, ctx, 0, 3), UsageError);
}

TEST(RandomMatrix, BinaryFourByFourFullRankFrequency) {
  // prod_{i=1..4} (1 - 2^-i) = 315/1024.
  const FieldContext ctx(1);
  SeededRng rng(42);
  int full = 0;
  constexpr int kSamples = 100000;
  for (int i = 0; i < kSamples; ++i) full += rank(random_matrix(rng, ctx, 4, 4)) == 4;
  EXPECT_NEAR(static_cast<double>(full) / kSamples, 315.0 / 1024.0, 0.01);
}

TEST(RandomMatrix, BinaryTwoByTwoOutcomesAreUniform) {
  const FieldContext ctx(1);
  std::vector<std::uint64_t> counts(16, 0);
  for (std::uint64_t seed = 0; seed < 32000; ++seed) {
    SeededRng rng(seed);
    const CoeffMatrix a = random_matrix(rng, ctx, 2, 2);
    const auto e = a.entries();
    ++counts[e[0] | (e[1] << 1) | (e[2] << 2) | (e[3] << 3)];
  }
  EXPECT_LT(testing::chi_square_uniform(counts), kChiSquare15At999);
}

}  // namespace
}  // namespace platoon::linalg
