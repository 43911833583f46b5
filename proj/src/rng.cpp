#include "chaosimg/rng.hpp"

#include <cmath>
#include <numbers>

namespace chaosimg {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream, std::uint64_t a, std::uint64_t b)
    : key_(splitmix64(splitmix64(splitmix64(splitmix64(seed) ^ stream) ^ a) ^ b)) {}

std::uint64_t CounterRng::next_u64() {
  const std::uint64_t c = counter_++;
  return splitmix64(splitmix64(key_ + c * 0xd1342543de82ef95ULL) ^ key_);
}

double CounterRng::uniform() {
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

std::pair<double, double> CounterRng::normal_pair() {
  const double u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double t = 2.0 * std::numbers::pi * u2;
  return {r * std::cos(t), r * std::sin(t)};
}

}  // namespace chaosimg
