#pragma once
// Deterministic substream RNG: one root seed, SplitMix64-derived substreams so
// any circuit/resample can be regenerated in isolation and in parallel.

#include <algorithm>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace mrb {

inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

class Rng {
  public:
    explicit Rng(uint64_t seed) : eng_(splitmix64(seed)), seed_(seed) {}

    // Derived generator for a labeled substream, e.g. rng.sub({circuit_k, depth_i}).
    Rng sub(std::initializer_list<uint64_t> path) const {
        uint64_t s = seed_;
        for (uint64_t p : path) s = splitmix64(s ^ (p + 0x632be59bd9b4e019ULL));
        return Rng(s);
    }

    std::mt19937_64& engine() { return eng_; }
    uint64_t seed() const { return seed_; }

    uint64_t next_u64() { return eng_(); }
    double uniform(double lo = 0.0, double hi = 1.0) {
        return std::uniform_real_distribution<double>(lo, hi)(eng_);
    }
    int uniform_int(int lo, int hi) {  // inclusive bounds
        return std::uniform_int_distribution<int>(lo, hi)(eng_);
    }
    double gauss() { return std::normal_distribution<double>(0.0, 1.0)(eng_); }

    template <typename It>
    void shuffle(It first, It last) {
        std::shuffle(first, last, eng_);
    }

  private:
    std::mt19937_64 eng_;
    uint64_t seed_;
};

}  // namespace mrb
