#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace efd {

// Seeded generator with a platform-independent bounded draw (the standard
// distributions are implementation-defined, which would break trace identity).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next() { return eng_(); }

  // Uniform in [0, n), n > 0.
  std::uint64_t below(std::uint64_t n) {
    std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t x;
    do {
      x = eng_();
    } while (x >= limit);
    return x % n;
  }

  // Uniform in [lo, hi].
  std::int64_t range(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo + 1)));
  }

  bool chance(std::uint64_t num, std::uint64_t den) { return below(den) < num; }

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace efd
