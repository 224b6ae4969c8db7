#pragma once

#include <cmath>
#include <cstdint>

namespace geohull {

// Counter-based stream RNG (Philox4x32-10). Streams are keyed by a 64-bit
// stream id, so replication (n, r) of a run can be generated independently of
// execution order and worker count.
class PhiloxRng {
public:
    explicit PhiloxRng(std::uint64_t stream_id) : key_lo_(static_cast<std::uint32_t>(stream_id)),
                                                  key_hi_(static_cast<std::uint32_t>(stream_id >> 32)) {}

    std::uint64_t stream_id() const { return (static_cast<std::uint64_t>(key_hi_) << 32) | key_lo_; }

    std::uint32_t next_u32() {
        if (pos_ == 4) {
            block(counter_++);
            pos_ = 0;
        }
        return out_[pos_++];
    }

    std::uint64_t next_u64() {
        const std::uint64_t lo = next_u32();
        const std::uint64_t hi = next_u32();
        return (hi << 32) | lo;
    }

    // Uniform on [0,1) with 53 random bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    double gaussian() {
        if (has_cached_) {
            has_cached_ = false;
            return cached_;
        }
        double u1 = uniform();
        while (u1 == 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        cached_ = r * std::sin(2.0 * M_PI * u2);
        has_cached_ = true;
        return r * std::cos(2.0 * M_PI * u2);
    }

private:
    void block(std::uint64_t ctr) {
        std::uint32_t x0 = static_cast<std::uint32_t>(ctr);
        std::uint32_t x1 = static_cast<std::uint32_t>(ctr >> 32);
        std::uint32_t x2 = 0xdeadbeef;
        std::uint32_t x3 = 0xcafef00d;
        std::uint32_t k0 = key_lo_, k1 = key_hi_;
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t p0 = 0xD2511F53ULL * x0;
            const std::uint64_t p1 = 0xCD9E8D57ULL * x2;
            const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32), lo0 = static_cast<std::uint32_t>(p0);
            const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32), lo1 = static_cast<std::uint32_t>(p1);
            const std::uint32_t y0 = hi1 ^ x1 ^ k0;
            const std::uint32_t y1 = lo1;
            const std::uint32_t y2 = hi0 ^ x3 ^ k1;
            const std::uint32_t y3 = lo0;
            x0 = y0;
            x1 = y1;
            x2 = y2;
            x3 = y3;
            k0 += 0x9E3779B9u;
            k1 += 0xBB67AE85u;
        }
        out_[0] = x0;
        out_[1] = x1;
        out_[2] = x2;
        out_[3] = x3;
    }

    std::uint32_t key_lo_, key_hi_;
    std::uint64_t counter_ = 0;
    std::uint32_t out_[4] = {0, 0, 0, 0};
    int pos_ = 4;
    bool has_cached_ = false;
    double cached_ = 0.0;
};

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Stream id for replication r of sample size n under a master seed.
inline std::uint64_t stream_id(std::uint64_t master_seed, std::uint64_t n, std::uint64_t r) {
    return splitmix64(splitmix64(splitmix64(master_seed) ^ n) ^ r);
}

inline PhiloxRng make_stream(std::uint64_t master_seed, std::uint64_t n, std::uint64_t r) {
    return PhiloxRng(stream_id(master_seed, n, r));
}

}  // namespace geohull
