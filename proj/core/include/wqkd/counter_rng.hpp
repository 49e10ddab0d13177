#pragma once

#include <cstdint>

namespace wqkd {

// Independent random draws per simulated round. Each round's stream is a
// pure function of (seed, round, purpose), so any partition of rounds
// across workers reproduces the same values.
enum class RngStream : std::uint64_t {
  AliceSetting = 1,
  BobSetting = 2,
  Outcome = 3,
  Sacrifice = 4,
};

class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t round, RngStream stream);

  std::uint64_t next_u64();
  // Uniform on [0, 1) with 53 random bits.
  double uniform();

 private:
  std::uint64_t state_;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace wqkd
