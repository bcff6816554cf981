#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <limits>

namespace gpc {

/// Philox4x32-10 block function (Salmon et al., "Parallel random numbers: as
/// easy as 1, 2, 3"). Pure function of (counter, key).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

std::uint64_t splitmix64(std::uint64_t x);

/// Folds a list of words into one 64-bit key.
std::uint64_t derive_key(std::initializer_list<std::uint64_t> words);

/// Named substreams. Every random quantity in a run is drawn from a key that
/// includes one of these tags, so streams never overlap.
enum class Stream : std::uint64_t {
  Adjacency = 0xA1,
  Initial = 0xB2,
  Brownian = 0xC3,
  ReferenceInitial = 0xD4,
  ReferenceBrownian = 0xE5,
  Heuristic = 0xF6,
  Test = 0x17,
};

std::uint64_t stream_key(std::uint64_t master_seed, std::uint64_t replication,
                         Stream stream);

double to_unit_interval(std::uint64_t bits);  // [0, 1)

/// Addressable draws: the value depends only on (key, a, b, c), never on call
/// order. Used for initial states and Brownian increments.
double uniform_at(std::uint64_t key, std::uint64_t a, std::uint32_t b,
                  std::uint32_t c);
double normal_at(std::uint64_t key, std::uint64_t a, std::uint32_t b,
                 std::uint32_t c);

/// Sequential generator over a Philox stream. Satisfies
/// UniformRandomBitGenerator, so it also plugs into <random> distributions.
class StreamRng {
 public:
  using result_type = std::uint64_t;

  explicit StreamRng(std::uint64_t key) : key_(key) {}
  StreamRng(std::uint64_t master_seed, std::uint64_t replication, Stream s)
      : key_(stream_key(master_seed, replication, s)) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()();
  double uniform() { return to_unit_interval((*this)()); }
  bool bernoulli(double prob) { return uniform() < prob; }
  double normal();

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int buffered_ = 0;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace gpc
