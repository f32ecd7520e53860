#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace rspc {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) noexcept {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline std::uint64_t rotl(std::uint64_t x, int k) noexcept {
  return (x << k) | (x >> (64 - k));
}

}  // namespace detail

// Deterministically derives a sub-seed from (seed, tag). Used to give each
// independent simulation lane its own seed space.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) noexcept {
  std::uint64_t s = seed;
  std::uint64_t h = detail::splitmix64(s);
  s = h ^ (tag * 0xD1B54A32D192ED03ull);
  return detail::splitmix64(s);
}

// xoshiro256++ with Box-Muller normal variates.
//
// One stream per Monte-Carlo replication: the state is a pure function of
// (master_seed, stream_index), so any replication is reproducible in
// isolation and results cannot depend on how replications are scheduled
// across worker threads.
class RandomStream {
 public:
  RandomStream(std::uint64_t master_seed, std::uint64_t stream_index) noexcept {
    std::uint64_t s = master_seed + stream_index * 0x9E3779B97F4A7C15ull;
    for (auto& w : state_) w = detail::splitmix64(s);
    if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = 1;
  }

  std::uint64_t next_u64() noexcept {
    const std::uint64_t result = detail::rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = detail::rotl(state_[3], 45);
    return result;
  }

  // Uniform on [0, 1), 53-bit resolution.
  double uniform() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform on (0, 1]; safe as a logarithm argument.
  double uniform_pos() noexcept {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  double normal() noexcept {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform_pos()));
    const double t = 2.0 * std::numbers::pi * uniform();
    spare_ = r * std::sin(t);
    have_spare_ = true;
    return r * std::cos(t);
  }

  double normal(double mu, double sigma) noexcept { return mu + sigma * normal(); }

 private:
  std::array<std::uint64_t, 4> state_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace rspc
