#pragma once

#include <cstdint>
#include <random>

namespace platoon {

/// Engine used everywhere randomness is consumed. Full 64-bit output range, so
/// masking the low bits yields uniform values.
using SeededRng = std::mt19937_64;

/// Independent stream for (master seed, stream index, tag). The seed sequence is
/// a pure function of its inputs, so a trial's draws never depend on which worker
/// runs it or in what order.
inline SeededRng make_stream(std::uint64_t master_seed, std::uint64_t stream_id,
                             std::uint64_t tag = 0) {
  std::seed_seq seq{
      static_cast<std::uint32_t>(master_seed), static_cast<std::uint32_t>(master_seed >> 32),
      static_cast<std::uint32_t>(stream_id),   static_cast<std::uint32_t>(stream_id >> 32),
      static_cast<std::uint32_t>(tag),         static_cast<std::uint32_t>(tag >> 32)};
  return SeededRng(seq);
}

}  // namespace platoon
