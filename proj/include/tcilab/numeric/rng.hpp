#pragma once

#include <cstdint>

namespace tcilab::numeric {

std::uint64_t splitmix64(std::uint64_t x);

// Counter-based generator: the value at (stream, index) depends only on the
// key, so draws can be split across threads in any order.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed) : key_(splitmix64(seed ^ 0x6a09e667f3bcc909ULL)) {}

    std::uint64_t bits(std::uint64_t stream, std::uint64_t index) const;
    // Uniform on the open interval (0, 1).
    double uniform(std::uint64_t stream, std::uint64_t index) const;
    std::uint64_t seed_key() const { return key_; }

private:
    std::uint64_t key_;
};

// Sequential view of one stream.
class RngStream {
public:
    RngStream(const CounterRng& rng, std::uint64_t stream) : rng_(rng), stream_(stream) {}
    double uniform() { return rng_.uniform(stream_, index_++); }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    std::uint64_t below(std::uint64_t n) { return rng_.bits(stream_, index_++) % n; }

private:
    CounterRng rng_;
    std::uint64_t stream_;
    std::uint64_t index_ = 0;
};

}  // namespace tcilab::numeric
