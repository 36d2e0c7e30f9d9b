#pragma once

#include <cstdint>
#include <random>

namespace bitrack {

// splitmix64; used to derive independent stream seeds from (seed, stream ids).
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0,
                              std::uint64_t c = 0) {
    std::uint64_t s = splitmix64(seed ^ splitmix64(a));
    s = splitmix64(s ^ splitmix64(b + 0x632be59bd9b4e019ULL));
    return splitmix64(s ^ splitmix64(c + 0x2545f4914f6cdd1dULL));
}

// mt19937_64 with hand-rolled bounded draws. The std:: distributions are not
// specified bit-exactly across standard libraries; these are.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}
    Rng(std::uint64_t seed, std::uint64_t stream_a, std::uint64_t stream_b = 0,
        std::uint64_t stream_c = 0)
        : engine_(mix_seed(seed, stream_a, stream_b, stream_c)) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform on {lo, ..., hi} by rejection.
    int uniform_int(int lo, int hi) {
        const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
        std::uint64_t v = next_u64();
        while (v >= limit) v = next_u64();
        return lo + static_cast<int>(v % span);
    }

    // Uniform on [0, 1) with 53-bit resolution.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    bool bernoulli(double p) { return uniform() < p; }

private:
    std::mt19937_64 engine_;
};

}  // namespace bitrack
