#include "acd/rng.hpp"

#include <bit>

namespace acd {

namespace {
constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
}

std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t value) noexcept {
  return mix64(seed + kGolden + mix64(value));
}

std::uint64_t hash_double(std::uint64_t seed, double value) noexcept {
  if (value == 0.0) value = 0.0;  // fold -0.0
  return hash_combine(seed, std::bit_cast<std::uint64_t>(value));
}

Rng::Rng(std::uint64_t seed) noexcept
    : key_(mix64(seed ^ 0x5851f42d4c957f2dULL)),
      key2_(mix64(seed + 0x14057b7ef767814fULL)) {}

Rng Rng::stream(std::uint64_t master, std::uint64_t experiment,
                std::uint64_t replication, std::uint64_t attempt) noexcept {
  std::uint64_t k = hash_combine(master, experiment);
  k = hash_combine(k, replication);
  k = hash_combine(k, attempt);
  return Rng(k);
}

Rng::result_type Rng::operator()() noexcept {
  // Two rounds of the SplitMix finalizer over (counter, key).
  const std::uint64_t c = counter_++;
  std::uint64_t z = mix64(c * kGolden + key_);
  return mix64(z ^ key2_);
}

double Rng::uniform() noexcept {
  const std::uint64_t bits = (*this)() >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

}  // namespace acd
