#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace laac {

std::uint64_t splitmix64(std::uint64_t x);

// Deterministic 64-bit seeded generator. Distribution sampling is implemented
// by hand on top of mt19937_64 so that identical seeds give identical draw
// sequences on every platform (std::uniform_real_distribution makes no such
// guarantee).
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // [0, 1)
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // unbiased draw in [0, n)
  std::int64_t uniform_int(std::int64_t n);

  // standard normal via Box-Muller
  double normal();

  // uniform sample of k distinct values from [0, n), ascending order not guaranteed
  std::vector<int> sample_without_replacement(int n, int k);

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(uniform_int(static_cast<std::int64_t>(i)));
      std::swap(v[i - 1], v[j]);
    }
  }

  // derived seed for an independent stream
  std::uint64_t fork(std::uint64_t stream) { return splitmix64(next_u64() ^ splitmix64(stream)); }

 private:
  std::mt19937_64 gen_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace laac
