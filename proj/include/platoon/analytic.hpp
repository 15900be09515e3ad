#pragma once

// Closed-form stopping-time distributions for two vehicles downloading M packets,
// m per vehicle per round, followed by a perfect V2V exchange.
//
// Feedback scheme: the base station sends packets drawn uniformly from the
// vehicles' common missing set, so the round's overlap is hypergeometric and
// the number of held packets S_t evolves as S_t = S_{t-1} + 2m - X_t.
//
// Coded scheme: every transmission is a uniform random combination over
// GF(2^q). Decoding completes once the accumulated 2mt x M coefficient matrix
// has rank M. All probabilities use the field size Q = 2^q.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "platoon/errors.hpp"
#include "platoon/gf2q.hpp"
#include "platoon/pmf.hpp"

namespace platoon::analytic {

struct ProblemSpec {
  int total_packets = 1;        // M
  int per_round = 1;            // m, per vehicle per round
  unsigned field_exponent = 8;  // q; only the coded scheme uses it
  static constexpr int vehicles = 2;

  void validate() const {
    if (per_round < 1) throw UsageError("m must be ≥ 1");
    if (total_packets < 1) throw UsageError("M must be ≥ 1");
    if (per_round > total_packets) throw UsageError("m must not exceed M");
    if (field_exponent < 1 || field_exponent > gf::kMaxExponent) throw UsageError("q must be in [1, 16]");
  }

  /// ceil(M / 2m): no scheme can finish earlier.
  int min_rounds() const noexcept { return (total_packets + 2 * per_round - 1) / (2 * per_round); }
  /// ceil(M / m): the feedback scheme always finishes by then.
  int max_feedback_rounds() const noexcept { return (total_packets + per_round - 1) / per_round; }
  double field_size() const noexcept { return std::ldexp(1.0, static_cast<int>(field_exponent)); }
};

/// C(n, k), zero whenever k < 0, k > n or n < 0.
inline double binomial(long n, long k) noexcept {
  if (n < 0 || k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double c = 1.0;
  for (long j = 1; j <= k; ++j) c = c * static_cast<double>(n - k + j) / static_cast<double>(j);
  return c < 1e15 ? std::round(c) : c;
}

/// Non-absorbed distribution of S_t after round t: probs[s] = P(S_t = s) for
/// s in [0, M). Mass already absorbed at S = M is not included.
struct StateDist {
  int round = 0;
  std::vector<double> probs;

  double at(int s) const noexcept {
    return s < 0 || s >= static_cast<int>(probs.size()) ? 0.0 : probs[static_cast<std::size_t>(s)];
  }
  double mass() const noexcept {
    double m = 0.0;
    for (double p : probs) m += p;
    return m;
  }
};

/// Distribution of the number of common packets X in a round starting from s
/// held packets: both vehicles draw an m-subset of the M - s missing packets.
inline std::map<int, double> common_packet_pmf(int s, const ProblemSpec& spec) {
  spec.validate();
  const int M = spec.total_packets;
  const int m = spec.per_round;
  if (s < 0 || s > M - 1) throw UsageError("held packet count must be in [0, M-1]");
  const int n = M - s;
  if (n < m) throw BoundaryError("fewer than m packets missing; terminal round has no hypergeometric overlap");
  std::map<int, double> out;
  const double denom = binomial(n, m);
  for (int x = std::max(0, 2 * m - n); x <= m; ++x) out[x] = binomial(m, x) * binomial(n - m, m - x) / denom;
  return out;
}

namespace detail {

// Probability of moving from S_{t-1} = s - i to S_t = s (union of size i) with
// s < M, as written for m = 1 (i in {1, 2}).
inline double single_packet_step(int M, int s, int i) noexcept {
  if (i == 1) return 1.0 / (M - s + 1);
  return static_cast<double>(M - s + 1) / (M - s + 2);
}

// Same transition for general m, i in [m, 2m].
inline double general_step(int M, int m, int s, int i) noexcept {
  return binomial(m, 2 * m - i) * binomial(M - s + i - m, i - m) / binomial(M - s + i, m);
}

// Probability of finishing from i missing packets. For i < m the printed
// coefficient is 0/0; the scheme then delivers every missing packet, so 1.
inline double terminal_coefficient(int m, int i) noexcept {
  if (i <= m) return 1.0;
  return binomial(m, 2 * m - i) / binomial(i, m);
}

inline RoundPmf pmf_from_round_masses(const std::vector<double>& by_round, int t_floor, PmfKind kind) {
  int first = t_floor;
  for (std::size_t k = 0; k < by_round.size(); ++k) {
    if (by_round[k] != 0.0) {
      first = std::min(first, static_cast<int>(k) + 1);
      break;
    }
  }
  int last = first;
  for (std::size_t k = by_round.size(); k-- > 0;) {
    if (by_round[k] != 0.0) {
      last = std::max(first, static_cast<int>(k) + 1);
      break;
    }
  }
  std::vector<double> probs;
  for (int t = first; t <= last; ++t) {
    probs.push_back(t - 1 < static_cast<int>(by_round.size()) ? by_round[static_cast<std::size_t>(t - 1)] : 0.0);
  }
  return RoundPmf::make(first, std::move(probs), kind);
}

}  // namespace detail

/// P(S_t = s) for t = 1..t_max. For m = 1 this is the two-term recursion with
/// P(S_1 = 1) = 1/M, P(S_1 = 2) = (M-1)/M; otherwise the hypergeometric
/// recursion over unions of size m..2m.
inline std::vector<StateDist> feedback_state_recursion(const ProblemSpec& spec, int t_max) {
  spec.validate();
  const int M = spec.total_packets;
  const int m = spec.per_round;
  std::vector<StateDist> out;
  if (t_max < 1) return out;

  StateDist first{1, std::vector<double>(static_cast<std::size_t>(M), 0.0)};
  if (m == 1) {
    if (1 < M) first.probs[1] = 1.0 / M;
    if (2 < M) first.probs[2] = static_cast<double>(M - 1) / M;
  } else {
    for (int i = m; i <= 2 * m && i < M; ++i) {
      first.probs[static_cast<std::size_t>(i)] = binomial(m, 2 * m - i) * binomial(M - m, i - m) / binomial(M, m);
    }
  }
  out.push_back(std::move(first));

  for (int t = 2; t <= t_max; ++t) {
    const StateDist& prev = out.back();
    StateDist next{t, std::vector<double>(static_cast<std::size_t>(M), 0.0)};
    for (int s = 0; s < M; ++s) {
      double p = 0.0;
      if (m == 1) {
        p += detail::single_packet_step(M, s, 1) * prev.at(s - 1);
        p += detail::single_packet_step(M, s, 2) * prev.at(s - 2);
      } else {
        for (int i = m; i <= 2 * m; ++i) {
          if (s - i >= 0) p += detail::general_step(M, m, s, i) * prev.at(s - i);
        }
      }
      next.probs[static_cast<std::size_t>(s)] = p;
    }
    out.push_back(std::move(next));
  }
  return out;
}

/// Exact distribution of the feedback stopping time T,
/// P(T = t) = sum_i c_i P(S_{t-1} = M - i), with S_0 = 0.
inline RoundPmf feedback_stopping_pmf(const ProblemSpec& spec) {
  spec.validate();
  const int M = spec.total_packets;
  const int m = spec.per_round;
  const int t_hi = spec.max_feedback_rounds();
  const std::vector<StateDist> states = feedback_state_recursion(spec, t_hi - 1);

  std::vector<double> by_round(static_cast<std::size_t>(t_hi), 0.0);
  for (int t = 1; t <= t_hi; ++t) {
    double p = 0.0;
    for (int i = 1; i <= 2 * m; ++i) {
      const int s = M - i;
      if (s < 0) break;
      const double prev = t == 1 ? (s == 0 ? 1.0 : 0.0) : states[static_cast<std::size_t>(t - 2)].at(s);
      if (prev == 0.0) continue;
      const double c = m == 1 ? (i == 1 ? 1.0 : 0.5) : detail::terminal_coefficient(m, i);
      p += c * prev;
    }
    by_round[static_cast<std::size_t>(t - 1)] = p;
  }
  return detail::pmf_from_round_masses(by_round, spec.min_rounds(), PmfKind::exact);
}

/// P(rank(A) = n) for a uniformly random t x n matrix over GF(2^q):
/// prod_{i=1..n} (1 - Q^{-(t-n+i)}). Zero when t < n.
inline double rank_full_probability(long rows, long cols, unsigned field_exponent) {
  if (cols < 1) throw UsageError("rank_full_probability needs n >= 1");
  if (field_exponent < 1) throw UsageError("rank_full_probability needs q >= 1");
  if (rows < cols) return 0.0;
  double p = 1.0;
  for (long i = 1; i <= cols; ++i) {
    const long e = rows - cols + i;
    const double tail = std::ldexp(1.0, -static_cast<int>(std::min<long>(e * field_exponent, 2000)));
    p *= 1.0 - tail;
  }
  return p;
}

inline constexpr double kNcTailCutoff = 1e-12;

/// Exact P(T_NC = t) = F(t) - F(t-1), F(t) = P(rank(A_{2mt x M}) = M), truncated
/// once 1 - F(t) < 1e-12.
inline RoundPmf nc_exact_pmf(const ProblemSpec& spec) {
  spec.validate();
  const long M = spec.total_packets;
  const long rows_per_round = 2L * spec.per_round;
  const int t_min = spec.min_rounds();
  std::vector<double> probs;
  double prev = rank_full_probability(rows_per_round * (t_min - 1), M, spec.field_exponent);
  for (int t = t_min;; ++t) {
    const double f = rank_full_probability(rows_per_round * t, M, spec.field_exponent);
    probs.push_back(f - prev);
    prev = f;
    if (1.0 - f < kNcTailCutoff) break;
  }
  return RoundPmf::make(t_min, std::move(probs), PmfKind::exact);
}

/// Per-round upper bounds on P(T_NC = t), over the rounds nc_exact_pmf covers.
/// tight: (1 - 1/Q)(1 - P(rank(A_{2mt-1 x M}) = M));
/// loose: (1 - 1/Q) Q^{-(2mt - M)}. Both clamped to [0, 1].
struct NcPmfBound {
  RoundPmf tight;
  RoundPmf loose;
};

inline NcPmfBound nc_stopping_pmf_bound(const ProblemSpec& spec) {
  spec.validate();
  const long M = spec.total_packets;
  const long rows_per_round = 2L * spec.per_round;
  const unsigned q = spec.field_exponent;
  const double lead = 1.0 - 1.0 / spec.field_size();
  const RoundPmf exact = nc_exact_pmf(spec);
  std::vector<double> tight;
  std::vector<double> loose;
  for (int t = exact.t_min; t <= exact.t_max(); ++t) {
    const long rows = rows_per_round * t;
    tight.push_back(std::clamp(lead * (1.0 - rank_full_probability(rows - 1, M, q)), 0.0, 1.0));
    const long excess = rows - M;
    const double decay = excess <= 0 ? 1.0 : std::ldexp(1.0, -static_cast<int>(std::min<long>(excess * q, 2000)));
    loose.push_back(std::clamp(lead * decay, 0.0, 1.0));
  }
  return {RoundPmf::make(exact.t_min, std::move(tight), PmfKind::bound),
          RoundPmf::make(exact.t_min, std::move(loose), PmfKind::bound)};
}

struct NcMeanBound {
  double value = 0.0;
  /// False for Q = 2, where the large-field approximation behind the bound is
  /// not expected to hold.
  bool large_field = true;
};

/// M/(2m) + 1/(Q-1).
inline NcMeanBound nc_expected_bound(const ProblemSpec& spec) {
  spec.validate();
  const double Q = spec.field_size();
  return {static_cast<double>(spec.total_packets) / (2.0 * spec.per_round) + 1.0 / (Q - 1.0), Q > 2.0};
}

}  // namespace platoon::analytic
