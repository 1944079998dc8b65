// Seeded random source shared by every stochastic step.
//
// The engine is std::mt19937_64, whose output sequence is fixed by the C++
// standard. The standard distributions are implementation defined, so the
// derived draws below are spelled out instead:
//   uniform_index(n): rejection sampling on the raw 64-bit output,
//                     threshold = (2^64 - n) mod n, result = raw mod n.
//   uniform01():      top 53 bits of one raw output times 2^-53.
//   shuffle:          Fisher-Yates from the back, j = uniform_index(i + 1).
#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <utility>

namespace offeval {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  std::size_t uniform_index(std::size_t n) {
    if (n == 0) throw std::invalid_argument("uniform_index: empty range");
    const std::uint64_t bound = n;
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      const std::uint64_t r = engine_();
      if (r >= threshold) return static_cast<std::size_t>(r % bound);
    }
  }

  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const std::size_t j = uniform_index(i);
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace offeval
