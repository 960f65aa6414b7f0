#pragma once

#include <array>
#include <cstdint>

namespace ccfuse::numerics {

// Immutable descriptor of a random stream. Two Generators built from equal
// descriptors produce identical sequences, whatever thread runs them.
struct RngStream {
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;

    // Derived stream for sub-task i (replication, grid cell, ...).
    RngStream child(std::uint64_t i) const;
    bool operator==(const RngStream&) const = default;
};

std::uint64_t splitmix64(std::uint64_t x);

// Philox4x32-10 counter-based generator keyed by the seed, with the stream id
// in the upper half of the 128-bit counter.
class Generator {
public:
    explicit Generator(RngStream s);

    std::uint32_t next_u32();
    std::uint64_t next_u64();
    // Uniform on the open interval (0, 1) with 53 random bits.
    double uniform();
    double uniform(double lo, double hi);
    // Uniform integer on [lo, hi].
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);
    double normal();
    double normal(double mean, double sd);
    double gamma(double shape, double rate = 1.0);
    double chi_squared(double df);
    double exponential(double rate = 1.0);
    std::int64_t binomial(std::int64_t n, double p);

private:
    void refill();

    std::array<std::uint32_t, 2> key_;
    std::uint64_t stream_;
    std::uint64_t counter_ = 0;
    std::array<std::uint32_t, 4> buffer_{};
    int used_ = 4;
};

}  // namespace ccfuse::numerics
