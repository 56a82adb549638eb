#pragma once

#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <utility>
#include <vector>

namespace transnet {

// splitmix64 finalizer; spreads seed material with full avalanche.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Stream ids used in seed-derivation paths. The numeric values are part of
// the reproducibility contract: changing them changes every seeded draw.
enum StreamId : std::uint64_t {
  kStreamMembership = 1,
  kStreamNetwork = 2,
  kStreamRr = 3,
  kStreamKmeans = 4,
  kStreamCvMask = 5,
  kStreamScenario = 6,
  kStreamReplication = 7,
};

// Derives an independent stream seed from a master seed and a path of ids,
// so that e.g. (seed, layer, purpose) streams do not collide and do not
// depend on the order in which layers are generated.
inline std::uint64_t derive_seed(std::uint64_t master,
                                 std::initializer_list<std::uint64_t> path) {
  std::uint64_t h = splitmix64(master ^ 0x6a09e667f3bcc909ULL);
  for (std::uint64_t p : path) h = splitmix64(h ^ splitmix64(p + 0x1f83d9abfb41bd6bULL));
  return h;
}

// Seeded generator with fixed, platform-independent sampling algorithms.
// The standard <random> distributions are implementation-defined, so all
// draws go through the helpers below (xoshiro-free: plain mt19937_64 core).
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : state_(splitmix64(seed)) {
    // mt19937_64 state would also do; a small counter-free xorshift keeps the
    // stream cheap and self-contained.
    if (state_ == 0) state_ = 0x2545f4914f6cdd1dULL;
  }

  std::uint64_t next() {
    // xorshift64*; period 2^64-1, plenty for simulation use here.
    state_ ^= state_ >> 12;
    state_ ^= state_ << 25;
    state_ ^= state_ >> 27;
    return state_ * 0x2545f4914f6cdd1dULL;
  }

  // Uniform on [0,1) with 53 random bits.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform01() < p; }

  // Unbiased draw from {0,...,n-1} by rejection.
  std::uint64_t below(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("RandomStream::below: n must be positive");
    const std::uint64_t threshold = (0 - n) % n;  // 2^64 mod n
    for (;;) {
      const std::uint64_t r = next();
      if (r >= threshold) return r % n;
    }
  }

  // Fisher-Yates; used instead of std::shuffle for cross-platform stability.
  template <typename T>
  void shuffle(std::vector<T>& values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      std::swap(values[i - 1], values[static_cast<std::size_t>(below(i))]);
    }
  }

  // First m entries of a uniform permutation of {0,...,n-1}.
  std::vector<int> sample_without_replacement(int n, int m) {
    if (m < 0 || m > n) throw std::invalid_argument("sample_without_replacement: m out of range");
    std::vector<int> pool(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) pool[static_cast<std::size_t>(i)] = i;
    for (int i = 0; i < m; ++i) {
      const int j = i + static_cast<int>(below(static_cast<std::uint64_t>(n - i)));
      std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
    }
    pool.resize(static_cast<std::size_t>(m));
    return pool;
  }

 private:
  std::uint64_t state_;
};

}  // namespace transnet
