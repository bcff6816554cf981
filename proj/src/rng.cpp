#include "gpc/rng.hpp"

#include <cmath>
#include <numbers>

namespace gpc {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi,
                    std::uint32_t& lo) {
  const std::uint64_t prod = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(prod >> 32);
  lo = static_cast<std::uint32_t>(prod);
}

std::array<std::uint32_t, 4> block_for(std::uint64_t key, std::uint64_t a,
                                       std::uint32_t b, std::uint32_t c) {
  return philox4x32({static_cast<std::uint32_t>(a),
                     static_cast<std::uint32_t>(a >> 32), b, c},
                    {static_cast<std::uint32_t>(key),
                     static_cast<std::uint32_t>(key >> 32)});
}

inline std::uint64_t join(std::uint32_t lo, std::uint32_t hi) {
  return (static_cast<std::uint64_t>(hi) << 32) | lo;
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, ctr[0], hi0, lo0);
    mulhilo(kMul1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::uint64_t derive_key(std::initializer_list<std::uint64_t> words) {
  std::uint64_t h = 0x6A09E667F3BCC908ull;
  for (std::uint64_t w : words) h = splitmix64(h ^ splitmix64(w));
  return h;
}

std::uint64_t stream_key(std::uint64_t master_seed, std::uint64_t replication,
                         Stream stream) {
  return derive_key(
      {master_seed, replication, static_cast<std::uint64_t>(stream)});
}

double to_unit_interval(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

double uniform_at(std::uint64_t key, std::uint64_t a, std::uint32_t b,
                  std::uint32_t c) {
  const auto r = block_for(key, a, b, c);
  return to_unit_interval(join(r[0], r[1]));
}

double normal_at(std::uint64_t key, std::uint64_t a, std::uint32_t b,
                 std::uint32_t c) {
  // Box-Muller on the two 64-bit halves of one block.
  const auto r = block_for(key, a, b, c);
  const double u1 = 1.0 - to_unit_interval(join(r[0], r[1]));  // (0, 1]
  const double u2 = to_unit_interval(join(r[2], r[3]));
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

StreamRng::result_type StreamRng::operator()() {
  if (buffered_ == 0) {
    const auto r = block_for(key_, counter_++, 0x5EC0u, 0u);
    buffer_ = {join(r[0], r[1]), join(r[2], r[3])};
    buffered_ = 2;
  }
  return buffer_[2 - buffered_--];
}

double StreamRng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_normal_;
  }
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_normal_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

}  // namespace gpc
