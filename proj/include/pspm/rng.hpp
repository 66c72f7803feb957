#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace pspm {

/// Philox4x32-10 block function (Salmon et al., Random123).
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key);

/// FNV-1a over a purpose name; stable across platforms and compilers.
constexpr std::uint64_t purpose_tag(std::string_view name) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : name) {
    h ^= static_cast<std::uint8_t>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t splitmix64(std::uint64_t x);

/// Derives an independent seed from a master seed and a path of labels,
/// e.g. derive_seed(master, trial, epoch, purpose_tag("local")).
template <class... Parts>
std::uint64_t derive_seed(std::uint64_t master, Parts... parts) {
  std::uint64_t h = splitmix64(master);
  ((h = splitmix64(h ^ splitmix64(static_cast<std::uint64_t>(parts) + 0x632be59bd9b4e019ULL))), ...);
  return h;
}

/// Counter-based generator. The seed is the Philox key; the counter is
/// (block index, stream id). Draw k of a stream depends only on (seed, stream, k),
/// so parallel kernels can index draws directly with at().
///
/// All distributions are implemented here rather than taken from <random>,
/// whose distribution algorithms are implementation-defined.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed, std::uint64_t stream = 0) : seed_(seed), stream_(stream) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }
  std::uint64_t position() const { return position_; }

  /// Raw 64-bit draw number `index` of this stream; does not advance.
  std::uint64_t at(std::uint64_t index) const;
  /// Stateless form of at(), safe to call concurrently.
  static std::uint64_t draw(std::uint64_t seed, std::uint64_t stream, std::uint64_t index);
  std::uint64_t next_u64() { return at(position_++); }

  /// [0, 1) with 53 random bits.
  double uniform() { return to_unit(next_u64()); }
  /// (0, 1): never returns an endpoint.
  double uniform_open() { return to_open_unit(next_u64()); }
  /// [lo, hi)
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Box-Muller, one variate per pair of draws.
  double normal(double mean, double sd);
  /// Uniform integer in [0, n), n > 0. Lemire's multiply-shift with rejection.
  std::uint64_t below(std::uint64_t n);
  /// Poisson by sequential inversion from one uniform draw.
  std::uint32_t poisson(double mean) { return poisson_from_uniform(mean, uniform()); }

  /// A fresh generator whose key is derived from this seed and `tag`.
  SeededRng substream(std::uint64_t tag) const { return SeededRng(derive_seed(seed_, stream_, tag)); }

  static double to_unit(std::uint64_t x) { return static_cast<double>(x >> 11) * 0x1.0p-53; }
  static double to_open_unit(std::uint64_t x) { return (static_cast<double>(x >> 11) + 0.5) * 0x1.0p-53; }
  static std::uint32_t poisson_from_uniform(double mean, double u);

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t position_ = 0;
  mutable std::uint64_t cached_block_ = ~0ULL;
  mutable std::array<std::uint32_t, 4> cached_{};
};

}  // namespace pspm
