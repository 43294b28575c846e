#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>

namespace sbs {

/// Purpose tags that separate independent random streams of one encounter.
enum class StreamPurpose : std::uint64_t {
  generation = 1,
  acquisition = 2,
  response = 3,
  scan = 4,
  bootstrap = 5,
};

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Hash an ordered key into a 64-bit seed. Order matters.
std::uint64_t stream_seed(std::initializer_list<std::uint64_t> key);

/// Seeded random stream. The engine is std::mt19937_64, whose output
/// sequence is fixed by the standard; the conversions to doubles and
/// integers are done here so results do not depend on the library's
/// distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform on the open interval (0, 1).
  double uniform_open() {
    return (static_cast<double>(engine_() >> 12) + 0.5) * 0x1.0p-52;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Integer in [0, n). Multiply-shift mapping; n must be > 0.
  std::uint64_t below(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(engine_()) * n) >> 64);
  }

  /// True with probability p. p <= 0 never fires, p >= 1 always fires.
  bool bernoulli(double p) { return uniform() < p; }

  /// Index drawn from a (not necessarily normalized) weight vector.
  std::size_t categorical(std::span<const double> weights);

 private:
  std::mt19937_64 engine_;
};

}  // namespace sbs
