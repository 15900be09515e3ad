#pragma once

// Seeded Monte Carlo simulation of R2V + V2V rounds for both schemes.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <string_view>
#include <thread>
#include <vector>

#include "platoon/analytic.hpp"
#include "platoon/ffmatrix.hpp"
#include "platoon/gf2q.hpp"
#include "platoon/pmf.hpp"
#include "platoon/rng.hpp"

namespace platoon::sim {

using analytic::ProblemSpec;

enum class Scheme : std::uint8_t { feedback = 0, network_coding = 1 };

inline std::string_view to_string(Scheme s) noexcept { return s == Scheme::feedback ? "feedback" : "nc"; }

/// Feedback scheme state. Both vehicles share one missing set at the start of a
/// round (perfect V2V), so a single common set describes them.
class FeedbackDissemination {
 public:
  explicit FeedbackDissemination(const ProblemSpec& spec)
      : per_round_(static_cast<std::size_t>(spec.per_round)),
        missing_(static_cast<std::size_t>(spec.total_packets)),
        received_(static_cast<std::size_t>(spec.total_packets), false),
        stamp_(static_cast<std::size_t>(spec.total_packets), 0) {
    spec.validate();
    std::iota(missing_.begin(), missing_.end(), 0U);
  }

  /// One round: each vehicle receives a uniform min(m, missing)-subset of the
  /// missing packets, independently of the other; V2V merges them. Returns the
  /// number of packets added to the common set.
  std::size_t step(SeededRng& rng) {
    ++round_;
    const std::size_t n = missing_.size();
    const std::size_t k = std::min(per_round_, n);
    for (int vehicle = 0; vehicle < 2; ++vehicle) {
      // Partial Fisher-Yates: positions [0, k) hold a uniform k-subset.
      for (std::size_t i = 0; i < k; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, n - 1);
        std::swap(missing_[i], missing_[pick(rng)]);
        stamp_[missing_[i]] = round_;
      }
    }
    std::erase_if(missing_, [&](std::uint32_t p) {
      if (stamp_[p] != round_) return false;
      received_[p] = true;
      return true;
    });
    return n - missing_.size();
  }

  bool complete() const noexcept { return missing_.empty(); }
  std::size_t received() const noexcept { return received_.size() - missing_.size(); }
  std::size_t missing() const noexcept { return missing_.size(); }
  int round() const noexcept { return round_; }
  const std::vector<bool>& common_set() const noexcept { return received_; }

 private:
  std::size_t per_round_;
  std::vector<std::uint32_t> missing_;
  std::vector<bool> received_;
  std::vector<int> stamp_;
  int round_ = 0;
};

/// Coded scheme state: the echelon basis of every coefficient row pooled so far.
class CodedDissemination {
 public:
  CodedDissemination(const ProblemSpec& spec, const gf::FieldContext& ctx)
      : per_round_(spec.per_round), basis_(ctx, static_cast<std::size_t>(spec.total_packets)),
        row_(static_cast<std::size_t>(spec.total_packets)) {
    spec.validate();
  }

  /// One round: 2m fresh uniform coefficient rows (m per vehicle). Returns the rank gain.
  std::size_t step(SeededRng& rng) {
    ++round_;
    const std::size_t before = basis_.rank();
    for (int i = 0; i < 2 * per_round_; ++i) {
      gf::fill_random(rng, basis_.context(), row_);
      basis_.insert(std::span<const gf::Symbol>(row_));
    }
    return basis_.rank() - before;
  }

  bool complete() const noexcept { return basis_.full(); }
  std::size_t rank() const noexcept { return basis_.rank(); }
  int round() const noexcept { return round_; }
  const linalg::EchelonBasis& basis() const noexcept { return basis_; }

 private:
  int per_round_;
  linalg::EchelonBasis basis_;
  std::vector<gf::Symbol> row_;
  int round_ = 0;
};

struct TrialOutcome {
  int rounds = 0;
  Scheme scheme = Scheme::feedback;
  std::uint64_t seed_stream_id = 0;
};

inline TrialOutcome run_feedback_trial(const ProblemSpec& spec, SeededRng& rng, std::uint64_t stream_id = 0) {
  FeedbackDissemination state(spec);
  while (!state.complete()) state.step(rng);
  return {state.round(), Scheme::feedback, stream_id};
}

inline TrialOutcome run_nc_trial(const ProblemSpec& spec, const gf::FieldContext& ctx, SeededRng& rng,
                                 std::uint64_t stream_id = 0) {
  CodedDissemination state(spec, ctx);
  while (!state.complete()) state.step(rng);
  return {state.round(), Scheme::network_coding, stream_id};
}

inline TrialOutcome run_nc_trial(const ProblemSpec& spec, SeededRng& rng, std::uint64_t stream_id = 0) {
  return run_nc_trial(spec, gf::FieldContext(spec.field_exponent), rng, stream_id);
}

struct SchemeSummary {
  Scheme scheme = Scheme::feedback;
  std::uint64_t trials = 0;
  RoundPmf pmf;  // empirical
  double mean = 0.0;
  double stderr_mean = 0.0;
  int min_rounds = 0;
  int max_rounds = 0;
};

struct ExperimentSummary {
  ProblemSpec spec;
  std::uint64_t seed = 0;
  std::uint64_t trials = 0;
  std::vector<SchemeSummary> schemes;

  const SchemeSummary* find(Scheme s) const noexcept {
    for (const auto& r : schemes) {
      if (r.scheme == s) return &r;
    }
    return nullptr;
  }
};

/// Summary statistics from realized round counts, reduced in trial order.
inline SchemeSummary summarize(Scheme scheme, const std::vector<int>& rounds) {
  SchemeSummary out;
  out.scheme = scheme;
  out.trials = rounds.size();
  if (rounds.empty()) return out;
  const auto [lo, hi] = std::minmax_element(rounds.begin(), rounds.end());
  out.min_rounds = *lo;
  out.max_rounds = *hi;
  std::vector<std::uint64_t> counts(static_cast<std::size_t>(*hi - *lo + 1), 0);
  std::uint64_t sum = 0;
  for (int r : rounds) {
    ++counts[static_cast<std::size_t>(r - *lo)];
    sum += static_cast<std::uint64_t>(r);
  }
  out.pmf = RoundPmf::from_counts(*lo, counts);
  const double n = static_cast<double>(rounds.size());
  out.mean = static_cast<double>(sum) / n;
  double ss = 0.0;
  for (std::size_t k = 0; k < counts.size(); ++k) {
    const double d = (*lo + static_cast<double>(k)) - out.mean;
    ss += static_cast<double>(counts[k]) * d * d;
  }
  out.stderr_mean = rounds.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
  return out;
}

struct SchemeSelection {
  bool feedback = true;
  bool network_coding = true;
};

/// Runs `trials` independent trials per selected scheme. Trial i of scheme s
/// draws from make_stream(seed, i, s), so the result does not depend on
/// `workers` (0 picks the hardware concurrency).
inline ExperimentSummary run_experiment(const ProblemSpec& spec, std::uint64_t trials, std::uint64_t seed,
                                        SchemeSelection which = {}, unsigned workers = 0) {
  spec.validate();
  if (trials < 1) throw UsageError("trials must be ≥ 1");
  if (workers == 0) workers = std::max(1U, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, trials));

  ExperimentSummary out{spec, seed, trials, {}};
  const gf::FieldContext ctx(spec.field_exponent);

  auto run_scheme = [&](Scheme scheme) {
    std::vector<int> rounds(trials, 0);
    auto work = [&](std::uint64_t begin, std::uint64_t end) {
      for (std::uint64_t i = begin; i < end; ++i) {
        SeededRng rng = make_stream(seed, i, static_cast<std::uint64_t>(scheme));
        rounds[i] = scheme == Scheme::feedback ? run_feedback_trial(spec, rng, i).rounds
                                               : run_nc_trial(spec, ctx, rng, i).rounds;
      }
    };
    if (workers == 1) {
      work(0, trials);
    } else {
      std::vector<std::jthread> pool;
      const std::uint64_t chunk = (trials + workers - 1) / workers;
      for (unsigned w = 0; w < workers; ++w) {
        const std::uint64_t b = w * chunk;
        const std::uint64_t e = std::min<std::uint64_t>(trials, b + chunk);
        if (b < e) pool.emplace_back(work, b, e);
      }
    }
    out.schemes.push_back(summarize(scheme, rounds));
  };

  if (which.feedback) run_scheme(Scheme::feedback);
  if (which.network_coding) run_scheme(Scheme::network_coding);
  return out;
}

}  // namespace platoon::sim
