#pragma once

#include <cstdint>
#include <utility>

namespace chaosimg {

std::uint64_t splitmix64(std::uint64_t x);

/// Counter-based random stream. Each (seed, stream, a, b) key addresses an
/// independent sequence, so draws depend only on the key and never on the
/// order in which shots or components are generated.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream, std::uint64_t a = 0, std::uint64_t b = 0);

  std::uint64_t next_u64();
  /// Uniform on the open interval (0, 1).
  double uniform();
  /// Two independent standard normals (Box-Muller).
  std::pair<double, double> normal_pair();

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace chaosimg
