#pragma once

#include <cstdint>

namespace kmcl {

// SplitMix64 (Steele/Lea/Flood); public-domain reference constants.
// Used as a keyed counter generator: every random decision in the library
// draws from a stream whose key is a pure function of (seed, indices), so
// results never depend on evaluation order or thread count.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t state) : state_(state) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform on [0, 1), 53-bit resolution.
  double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Key for the stream addressed by (seed, a, b). The +1 offsets keep the
// all-zero input from mapping to the raw seed.
inline std::uint64_t stream_key(std::uint64_t seed, std::uint64_t a,
                                std::uint64_t b = 0) {
  std::uint64_t k = mix64(seed + 0x9E3779B97F4A7C15ULL * (a + 1));
  return mix64(k + 0x9E3779B97F4A7C15ULL * (b + 1));
}

inline SplitMix64 stream(std::uint64_t seed, std::uint64_t a,
                         std::uint64_t b = 0) {
  return SplitMix64(stream_key(seed, a, b));
}

// Sub-seed domains for experiment pipelines (graph sampling, frequency
// draws, initial phases) so one manifest seed drives independent streams.
enum class SeedDomain : std::uint64_t {
  kGraph = 0x67726170,
  kFrequency = 0x66726571,
  kInitialPhase = 0x696e6974,
};

inline std::uint64_t sub_seed(std::uint64_t master, SeedDomain d) {
  return stream_key(master, static_cast<std::uint64_t>(d));
}

}  // namespace kmcl
