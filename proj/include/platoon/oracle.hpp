#pragma once

// Brute-force ground truth for the feedback scheme. Each round's transition is
// obtained by listing every ordered pair of k-subsets of the n missing packets
// (k = min(m, n)) and counting union sizes; no binomial identities are used.
// The resulting absorbing chain is propagated forward until all mass is absorbed.

#include <bit>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "platoon/analytic.hpp"
#include "platoon/errors.hpp"
#include "platoon/pmf.hpp"

namespace platoon::analytic {

inline constexpr double kOracleSubsetLimit = 1e4;

namespace detail {

// All k-subsets of {0..n-1} as bitmasks, in increasing numeric order.
inline std::vector<std::uint64_t> k_subsets(int n, int k) {
  std::vector<std::uint64_t> out;
  if (k == 0) return {0};
  const std::uint64_t limit = std::uint64_t{1} << n;
  std::uint64_t v = (std::uint64_t{1} << k) - 1;
  while (v < limit) {
    out.push_back(v);
    // Gosper's hack: next integer with the same popcount.
    const std::uint64_t c = v & (~v + 1);
    const std::uint64_t r = v + c;
    v = (((r ^ v) >> 2) / c) | r;
  }
  return out;
}

// P(|A ∪ B| = u) for A, B independent uniform k-subsets of n items.
inline std::vector<double> union_size_distribution(int n, int k) {
  const std::vector<std::uint64_t> subsets = k_subsets(n, k);
  std::vector<std::uint64_t> counts(static_cast<std::size_t>(n) + 1, 0);
  for (std::uint64_t a : subsets) {
    for (std::uint64_t b : subsets) ++counts[static_cast<std::size_t>(std::popcount(a | b))];
  }
  const double total = static_cast<double>(subsets.size()) * static_cast<double>(subsets.size());
  std::vector<double> out(counts.size());
  for (std::size_t u = 0; u < counts.size(); ++u) out[u] = static_cast<double>(counts[u]) / total;
  return out;
}

struct ChainRun {
  std::vector<StateDist> states;  // after rounds 1, 2, ...
  std::vector<double> finished;   // P(T = t) for t = 1, 2, ...
};

inline ChainRun propagate_chain(const ProblemSpec& spec, int t_limit) {
  spec.validate();
  const int M = spec.total_packets;
  const int m = spec.per_round;
  if (M > 62 || binomial(M, m) > kOracleSubsetLimit) {
    throw GuardError("exact oracle refused: C(" + std::to_string(M) + ", " + std::to_string(m) +
                     ") exceeds the enumeration limit");
  }
  std::map<int, std::vector<double>> kernels;  // keyed by missing count
  std::vector<double> held(static_cast<std::size_t>(M), 0.0);
  held[0] = 1.0;
  ChainRun run;
  for (int t = 1; t <= t_limit; ++t) {
    std::vector<double> next(static_cast<std::size_t>(M), 0.0);
    double finished = 0.0;
    bool any = false;
    for (int s = 0; s < M; ++s) {
      const double p = held[static_cast<std::size_t>(s)];
      if (p == 0.0) continue;
      any = true;
      const int n = M - s;
      auto it = kernels.find(n);
      if (it == kernels.end()) it = kernels.emplace(n, union_size_distribution(n, std::min(m, n))).first;
      const std::vector<double>& kernel = it->second;
      for (int u = 0; u <= n; ++u) {
        const double w = kernel[static_cast<std::size_t>(u)];
        if (w == 0.0) continue;
        if (s + u == M) {
          finished += p * w;
        } else {
          next[static_cast<std::size_t>(s + u)] += p * w;
        }
      }
    }
    if (!any) break;
    run.finished.push_back(finished);
    run.states.push_back(StateDist{t, next});
    held = std::move(next);
  }
  return run;
}

}  // namespace detail

/// Non-absorbed state distributions after rounds 1..t_max, from the enumerated chain.
inline std::vector<StateDist> exact_markov_states(const ProblemSpec& spec, int t_max) {
  std::vector<StateDist> states = detail::propagate_chain(spec, t_max).states;
  const std::size_t M = static_cast<std::size_t>(spec.total_packets);
  for (int t = static_cast<int>(states.size()) + 1; t <= t_max; ++t) {
    states.push_back(StateDist{t, std::vector<double>(M, 0.0)});
  }
  return states;
}

/// Exact pmf of the feedback stopping time by forward propagation of the
/// enumerated chain. Refuses instances with C(M, m) > 10^4 or M > 62.
inline RoundPmf exact_markov_oracle(const ProblemSpec& spec) {
  const detail::ChainRun run = detail::propagate_chain(spec, spec.total_packets);
  return detail::pmf_from_round_masses(run.finished, spec.min_rounds(), PmfKind::exact);
}

}  // namespace platoon::analytic
