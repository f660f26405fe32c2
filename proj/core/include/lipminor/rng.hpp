#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace lipminor {

// Stream coordinates for the counter-based generator. Every (seed,
// replicate, side, channel) tuple addresses an independent stream; no stream
// depends on how many numbers another one consumed.
struct StreamKey {
  std::uint64_t seed = 0;
  std::uint64_t replicate = 0;
  std::uint32_t side = 0;     // 0..1
  std::uint32_t channel = 0;  // 0..127
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// One Philox4x32-10 block; reference for the lane-parallel stream below.
inline std::array<std::uint32_t, 4> philox_block(std::array<std::uint32_t, 4> c,
                                                 std::array<std::uint32_t, 2> k) {
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(0xD2511F53U) * c[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(0xCD9E8D57U) * c[2];
    c = {static_cast<std::uint32_t>(p1 >> 32) ^ c[1] ^ k[0], static_cast<std::uint32_t>(p1),
         static_cast<std::uint32_t>(p0 >> 32) ^ c[3] ^ k[1], static_cast<std::uint32_t>(p0)};
    k[0] += 0x9E3779B9U;
    k[1] += 0xBB67AE85U;
  }
  return c;
}

}  // namespace detail

// Philox4x32-10 (Salmon et al., SC'11). Satisfies UniformRandomBitGenerator
// with 64-bit output (two 32-bit words per draw).
// Counter layout: words 3:2 hold the replicate id, word 1 holds side, channel
// and the top 24 bits of the block index, word 0 its low 32 bits.
// Blocks are generated kLanes at a time in structure-of-arrays form so the
// rounds vectorise.
class PhiloxStream {
 public:
  using result_type = std::uint64_t;

  explicit PhiloxStream(const StreamKey& key) {
    const std::uint64_t k = detail::splitmix64(key.seed);
    key_ = {static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
    ctr_hi_ = {static_cast<std::uint32_t>(key.replicate),
               static_cast<std::uint32_t>(key.replicate >> 32)};
    tag_ = ((key.side & 1U) << 31) | ((key.channel & 0x7FU) << 24);
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    if (pos_ == kBuffer) refill();
    return buf_[pos_++];
  }

  // Uniform on the open interval (0, 1) with 53 random bits.
  double uniform_open() {
    return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
  }

 private:
  static constexpr int kLanes = 16;
  static constexpr int kBuffer = 2 * kLanes;

  void refill() {
    alignas(64) std::uint32_t c0[kLanes], c1[kLanes], c2[kLanes], c3[kLanes];
    for (int l = 0; l < kLanes; ++l) {
      const std::uint64_t block = block_ + static_cast<std::uint64_t>(l);
      c0[l] = static_cast<std::uint32_t>(block);
      c1[l] = tag_ | static_cast<std::uint32_t>((block >> 32) & 0xFFFFFFU);
      c2[l] = ctr_hi_[0];
      c3[l] = ctr_hi_[1];
    }
    std::uint32_t k0 = key_[0];
    std::uint32_t k1 = key_[1];
    for (int round = 0; round < 10; ++round) {
      for (int l = 0; l < kLanes; ++l) {
        const std::uint64_t p0 = static_cast<std::uint64_t>(0xD2511F53U) * c0[l];
        const std::uint64_t p1 = static_cast<std::uint64_t>(0xCD9E8D57U) * c2[l];
        const std::uint32_t n0 = static_cast<std::uint32_t>(p1 >> 32) ^ c1[l] ^ k0;
        const std::uint32_t n2 = static_cast<std::uint32_t>(p0 >> 32) ^ c3[l] ^ k1;
        c1[l] = static_cast<std::uint32_t>(p1);
        c3[l] = static_cast<std::uint32_t>(p0);
        c0[l] = n0;
        c2[l] = n2;
      }
      k0 += 0x9E3779B9U;
      k1 += 0xBB67AE85U;
    }
    for (int l = 0; l < kLanes; ++l) {
      buf_[2 * l] = (static_cast<std::uint64_t>(c1[l]) << 32) | c0[l];
      buf_[2 * l + 1] = (static_cast<std::uint64_t>(c3[l]) << 32) | c2[l];
    }
    block_ += kLanes;
    pos_ = 0;
  }

  std::array<std::uint32_t, 2> key_{};
  std::array<std::uint32_t, 2> ctr_hi_{};
  std::uint32_t tag_ = 0;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, kBuffer> buf_{};
  int pos_ = kBuffer;
};

}  // namespace lipminor
