#pragma once

// Deterministic random source shared by sampling, shuffling and training.
// mt19937_64 has a standard-specified output sequence, and every draw helper
// below is built only from raw engine output, so a given seed produces the
// same stream on any platform.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace uvre {

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed), seed_(seed) {}

  uint64_t seed() const { return seed_; }

  uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform index in [0, n). Rejection sampling keeps it unbiased.
  size_t index(size_t n) {
    if (n <= 1) return 0;
    const uint64_t span = static_cast<uint64_t>(n);
    const uint64_t limit = UINT64_MAX - UINT64_MAX % span;
    uint64_t x;
    do {
      x = next_u64();
    } while (x >= limit);
    return static_cast<size_t>(x % span);
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[index(i)]);
    }
  }

  // First k of a seeded permutation of [0, n): sampling without replacement.
  std::vector<size_t> sample_without_replacement(size_t n, size_t k) {
    std::vector<size_t> idx(n);
    for (size_t i = 0; i < n; ++i) idx[i] = i;
    shuffle(idx);
    if (k < n) idx.resize(k);
    return idx;
  }

  // Independent child stream; tag separates uses so draw order in one
  // consumer cannot perturb another.
  Rng derive(const std::string& tag) const {
    uint64_t h = splitmix64(seed_);
    for (unsigned char c : tag) h = splitmix64(h ^ c);
    return Rng(h);
  }

  Rng derive(uint64_t salt) const { return Rng(splitmix64(seed_ ^ splitmix64(salt))); }

 private:
  std::mt19937_64 engine_;
  uint64_t seed_;
};

}  // namespace uvre
