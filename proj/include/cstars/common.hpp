#ifndef CSTARS_COMMON_HPP
#define CSTARS_COMMON_HPP

#include <cstdint>
#include <cstddef>
#include <vector>

namespace cstars {

/* Deterministic PRNG primitives. Every stochastic draw in the project goes
 * through these so that runs are reproducible bit for bit regardless of the
 * standard library's distribution implementations. */

inline uint64_t splitmix64(uint64_t& state) {
    uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/* Stateless mixer: maps a value to a well-scrambled 64-bit word. */
inline uint64_t mix64(uint64_t x) {
    x ^= x >> 33;
    x *= 0xff51afd7ed558ccdULL;
    x ^= x >> 33;
    x *= 0xc4ceb9fe1a85ec53ULL;
    x ^= x >> 33;
    return x;
}

/* Derives an independent stream seed from a root seed and stream labels. */
inline uint64_t derive_seed(uint64_t root, uint64_t a, uint64_t b = 0, uint64_t c = 0) {
    uint64_t s = root;
    s = mix64(s ^ (a + 0x9e3779b97f4a7c15ULL));
    s = mix64(s ^ (b + 0x7f4a7c159e3779b9ULL));
    s = mix64(s ^ (c + 0x85ebca6bc2b2ae35ULL));
    return s;
}

class Rng {
public:
    explicit Rng(uint64_t seed) : state_(seed) {}

    uint64_t next_u64() { return splitmix64(state_); }

    /* Uniform in [0, 1). 53 random mantissa bits. */
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    /* Uniform integer in [0, n). Rejection-free modulo is fine here: n is
     * tiny compared to 2^64 in every call site, so bias is negligible, and
     * what matters is determinism, not statistical perfection. */
    uint64_t next_below(uint64_t n) { return n ? next_u64() % n : 0; }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) {
            size_t j = static_cast<size_t>(next_below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    uint64_t state_;
};

/* FNV-1a over raw bytes; used for content checksums in serialized tables. */
inline uint64_t fnv1a64(const void* data, size_t len, uint64_t seed = 0xcbf29ce484222325ULL) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    uint64_t h = seed;
    for (size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace cstars

#endif
