#include "platoon/oracle.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "platoon/analytic.hpp"

namespace platoon::analytic {
namespace {

TEST(UnionSizes, SmallEnumerations) {
  EXPECT_EQ(detail::k_subsets(4, 2).size(), 6U);
  EXPECT_EQ(detail::k_subsets(5, 0).size(), 1U);
  EXPECT_EQ(detail::k_subsets(10, 3).size(), 120U);
  const auto u = detail::union_size_distribution(4, 2);
  EXPECT_NEAR(u[2], 1.0 / 6, 1e-15);
  EXPECT_NEAR(u[3], 4.0 / 6, 1e-15);
  EXPECT_NEAR(u[4], 1.0 / 6, 1e-15);
}

TEST(ExactMarkovOracle, Examples) {
  RoundPmf p = exact_markov_oracle(ProblemSpec{2, 1});
  EXPECT_DOUBLE_EQ(p.at(1), 0.5);
  EXPECT_DOUBLE_EQ(p.at(2), 0.5);

  for (int m = 1; m <= 5; ++m) EXPECT_DOUBLE_EQ(exact_markov_oracle(ProblemSpec{m, m}).at(1), 1.0);

  p = exact_markov_oracle(ProblemSpec{6, 2});
  EXPECT_NEAR(p.total(), 1.0, 1e-12);
}

TEST(ExactMarkovOracle, GuardRejectsLargeInstances) {
  EXPECT_THROW(exact_markov_oracle(ProblemSpec{40, 20}), GuardError);
  EXPECT_THROW(exact_markov_oracle(ProblemSpec{63, 1}), GuardError);
  EXPECT_NO_THROW(exact_markov_oracle(ProblemSpec{30, 2}));
}

TEST(ExactMarkovOracle, AgreesWithSinglePacketRecursion) {
  for (int M = 1; M <= 12; ++M) {
    const ProblemSpec spec{M, 1};
    EXPECT_LE(max_abs_difference(feedback_stopping_pmf(spec), exact_markov_oracle(spec)), 1e-9) << "M=" << M;
  }
}

TEST(ExactMarkovOracle, AgreesWithGeneralRecursion) {
  // Covers instances whose last round has fewer than 2m (and fewer than m)
  // packets missing.
  for (int m : {2, 3}) {
    for (int M = m; M <= 12; ++M) {
      const ProblemSpec spec{M, m};
      EXPECT_LE(max_abs_difference(feedback_stopping_pmf(spec), exact_markov_oracle(spec)), 1e-9)
          << "M=" << M << " m=" << m;
    }
  }
  EXPECT_LE(max_abs_difference(feedback_stopping_pmf(ProblemSpec{16, 4}), exact_markov_oracle(ProblemSpec{16, 4})),
            1e-9);
}

TEST(ExactMarkovOracle, StatesMatchRecursionEverywhere) {
  for (int m : {1, 2, 3}) {
    for (int M = m; M <= 12; ++M) {
      const ProblemSpec spec{M, m};
      const int t_max = spec.max_feedback_rounds();
      const auto closed = feedback_state_recursion(spec, t_max);
      const auto truth = exact_markov_states(spec, t_max);
      for (int t = 0; t < t_max; ++t) {
        for (int s = 0; s < M; ++s) ASSERT_NEAR(closed[t].at(s), truth[t].at(s), 1e-12) << M << ' ' << m << ' ' << t;
      }
    }
  }
}

}  // namespace
}  // namespace platoon::analytic
