#pragma once

#include <algorithm>
#include <cstdint>
#include <unordered_set>
#include <vector>

namespace ridx {

// splitmix64: tiny, seed-stable across platforms (std distributions are not).
struct rng {
    uint64_t state;

    explicit rng(uint64_t seed) : state(seed) {}

    uint64_t next() {
        uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, bound), rejection-sampled to avoid modulo bias.
    uint64_t below(uint64_t bound) {
        if (bound <= 1) return 0;
        uint64_t mask = ~uint64_t(0) >> __builtin_clzll(bound - 1 | 1);
        for (;;) {
            uint64_t v = next() & mask;
            if (v < bound) return v;
        }
    }

    double unit() { return (next() >> 11) * (1.0 / 9007199254740992.0); }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (uint64_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
    }

    // k distinct values from [lo, lo+n), sorted.
    std::vector<uint64_t> sample_sorted(uint64_t lo, uint64_t n, uint64_t k) {
        std::vector<uint64_t> out;
        out.reserve(k);
        if (k * 3 >= n) {
            // One left-to-right pass keeps the draw count exact.
            uint64_t need = k;
            for (uint64_t i = 0; i < n && need; ++i) {
                if (below(n - i) < need) {
                    out.push_back(lo + i);
                    --need;
                }
            }
        } else {
            // Floyd's algorithm.
            std::unordered_set<uint64_t> picked;
            picked.reserve(k * 2);
            for (uint64_t j = n - k; j < n; ++j) {
                uint64_t t = lo + below(j + 1);
                out.push_back(picked.insert(t).second ? t : (picked.insert(lo + j), lo + j));
            }
            std::sort(out.begin(), out.end());
        }
        return out;
    }
};

}  // namespace ridx
