#pragma once

#include <cstdint>
#include <limits>

namespace acd {

// Counter-based 64-bit generator. The n-th output is a pure function of
// (key, n), so independent streams are obtained by deriving keys instead of
// advancing a shared state. Replication r of experiment e under master seed s
// always sees the same numbers, whatever the thread layout.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed) noexcept;

  // Sub-stream keyed by a tuple of identifiers.
  static Rng stream(std::uint64_t master, std::uint64_t experiment,
                    std::uint64_t replication, std::uint64_t attempt = 0) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept;

  // Uniform on the open interval (0, 1); never returns 0 or 1.
  double uniform() noexcept;

  std::uint64_t counter() const noexcept { return counter_; }
  std::uint64_t key() const noexcept { return key_; }

 private:
  std::uint64_t key_;
  std::uint64_t key2_;
  std::uint64_t counter_ = 0;
};

// SplitMix64 finalizer; exposed for seed derivation elsewhere.
std::uint64_t mix64(std::uint64_t z) noexcept;

// Stable hash of a double's bit pattern combined into a running key.
std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t value) noexcept;
std::uint64_t hash_double(std::uint64_t seed, double value) noexcept;

}  // namespace acd
