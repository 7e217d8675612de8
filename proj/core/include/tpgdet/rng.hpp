#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace tpgdet {

// Counter-based generator (Philox4x32-10). A (seed, stream) pair names an
// independent substream, so trial k can draw its randomness from
// (seed, stream=k) regardless of execution order or thread count.
class Philox {
 public:
  explicit Philox(std::uint64_t seed, std::uint64_t stream = 0)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        ctr_{0, 0, static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)} {}

  std::uint32_t next_u32() {
    if (idx_ == 4) refill();
    return out_[idx_++];
  }

  std::uint64_t next_u64() {
    const std::uint64_t hi = next_u32();
    return (hi << 32) | next_u32();
  }

  // uniform in [0,1), 53-bit resolution
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // standard normal via Box-Muller
  double next_gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;  // (0,1]
    const double u2 = next_double();
    const double rad = std::sqrt(-2.0 * std::log(u1));
    const double ang = 6.283185307179586476925286766559 * u2;
    spare_ = rad * std::sin(ang);
    have_spare_ = true;
    return rad * std::cos(ang);
  }

  // uniform over {-1, +1}
  double next_bipolar() { return (next_u32() & 1u) ? 1.0 : -1.0; }

  // one 10-round block; exposed for known-answer tests
  static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> ctr,
                                            std::array<std::uint32_t, 2> key) {
    for (int round = 0; round < 10; ++round) {
      const std::uint64_t p0 = 0xD2511F53ull * ctr[0];
      const std::uint64_t p1 = 0xCD9E8D57ull * ctr[2];
      const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
      const auto lo0 = static_cast<std::uint32_t>(p0);
      const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
      const auto lo1 = static_cast<std::uint32_t>(p1);
      ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
      key[0] += 0x9E3779B9u;
      key[1] += 0xBB67AE85u;
    }
    return ctr;
  }

 private:
  void refill() {
    out_ = block(ctr_, key_);
    if (++ctr_[0] == 0) ++ctr_[1];  // low 64 bits count blocks, high 64 hold the stream
    idx_ = 0;
  }

  std::array<std::uint32_t, 2> key_;
  std::array<std::uint32_t, 4> ctr_;
  std::array<std::uint32_t, 4> out_{};
  int idx_ = 4;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// Fixed stream-space partition so different consumers of one run seed never
// collide: stream = (purpose << 56) | index.
enum class StreamPurpose : std::uint64_t {
  BerTrial = 1,
  MseSample = 2,
  TrainMinibatch = 3,
  Generic = 4,
};

inline std::uint64_t stream_id(StreamPurpose p, std::uint64_t index) {
  return (static_cast<std::uint64_t>(p) << 56) | (index & 0x00FFFFFFFFFFFFFFull);
}

}  // namespace tpgdet
