#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

namespace platoon {

enum class PmfKind { exact, bound, empirical };

/// Distribution over round counts: probs[k] = P(T = t_min + k).
struct RoundPmf {
  int t_min = 0;
  std::vector<double> probs;
  double mean = 0.0;
  PmfKind kind = PmfKind::exact;

  static RoundPmf make(int t_min, std::vector<double> probs, PmfKind kind) {
    RoundPmf out{t_min, std::move(probs), 0.0, kind};
    for (std::size_t k = 0; k < out.probs.size(); ++k) out.mean += (t_min + static_cast<double>(k)) * out.probs[k];
    return out;
  }

  /// Empirical pmf from per-round counts, counts[k] = #{T = t_min + k}.
  static RoundPmf from_counts(int t_min, const std::vector<std::uint64_t>& counts) {
    std::uint64_t n = 0;
    for (auto c : counts) n += c;
    std::vector<double> p(counts.size(), 0.0);
    for (std::size_t k = 0; k < counts.size(); ++k) p[k] = n == 0 ? 0.0 : static_cast<double>(counts[k]) / n;
    return make(t_min, std::move(p), PmfKind::empirical);
  }

  bool empty() const noexcept { return probs.empty(); }
  int t_max() const noexcept { return t_min + static_cast<int>(probs.size()) - 1; }

  double at(int t) const noexcept {
    if (t < t_min || t > t_max()) return 0.0;
    return probs[static_cast<std::size_t>(t - t_min)];
  }

  double total() const noexcept {
    double s = 0.0;
    for (double p : probs) s += p;
    return s;
  }

  /// First and last rounds with positive mass.
  std::pair<int, int> support() const noexcept {
    int lo = t_max() + 1;
    int hi = t_min - 1;
    for (std::size_t k = 0; k < probs.size(); ++k) {
      if (probs[k] > 0.0) {
        lo = std::min(lo, t_min + static_cast<int>(k));
        hi = std::max(hi, t_min + static_cast<int>(k));
      }
    }
    return {lo, hi};
  }
};

/// Half the L1 distance between two pmfs.
inline double total_variation(const RoundPmf& a, const RoundPmf& b) {
  if (a.empty() && b.empty()) return 0.0;
  int lo = a.empty() ? b.t_min : (b.empty() ? a.t_min : std::min(a.t_min, b.t_min));
  int hi = a.empty() ? b.t_max() : (b.empty() ? a.t_max() : std::max(a.t_max(), b.t_max()));
  double s = 0.0;
  for (int t = lo; t <= hi; ++t) s += std::abs(a.at(t) - b.at(t));
  return 0.5 * s;
}

/// Largest pointwise |a(t) - b(t)|.
inline double max_abs_difference(const RoundPmf& a, const RoundPmf& b) {
  if (a.empty() && b.empty()) return 0.0;
  int lo = std::min(a.empty() ? b.t_min : a.t_min, b.empty() ? a.t_min : b.t_min);
  int hi = std::max(a.empty() ? b.t_max() : a.t_max(), b.empty() ? a.t_max() : b.t_max());
  double m = 0.0;
  for (int t = lo; t <= hi; ++t) m = std::max(m, std::abs(a.at(t) - b.at(t)));
  return m;
}

}  // namespace platoon
