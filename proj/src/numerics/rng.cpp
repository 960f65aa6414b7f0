#include "ccfuse/numerics/rng.hpp"

#include "ccfuse/error.hpp"
#include "ccfuse/numerics/special.hpp"

#include <cmath>

namespace ccfuse::numerics {

namespace {

constexpr std::uint32_t kM0 = 0xD2511F53u;
constexpr std::uint32_t kM1 = 0xCD9E8D57u;
constexpr std::uint32_t kW0 = 0x9E3779B9u;
constexpr std::uint32_t kW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

std::array<std::uint32_t, 4> philox(std::array<std::uint32_t, 4> c, std::array<std::uint32_t, 2> k) {
    for (int round = 0; round < 10; ++round) {
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kM0, c[0], hi0, lo0);
        mulhilo(kM1, c[2], hi1, lo1);
        c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
        k[0] += kW0;
        k[1] += kW1;
    }
    return c;
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

RngStream RngStream::child(std::uint64_t i) const {
    return {seed, splitmix64(stream ^ splitmix64(i + 0x632BE59BD9B4E019ull))};
}

Generator::Generator(RngStream s)
    : key_{static_cast<std::uint32_t>(s.seed), static_cast<std::uint32_t>(s.seed >> 32)},
      stream_(s.stream) {}

void Generator::refill() {
    const std::array<std::uint32_t, 4> ctr = {
        static_cast<std::uint32_t>(counter_), static_cast<std::uint32_t>(counter_ >> 32),
        static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)};
    buffer_ = philox(ctr, key_);
    ++counter_;
    used_ = 0;
}

std::uint32_t Generator::next_u32() {
    if (used_ >= 4) refill();
    return buffer_[used_++];
}

std::uint64_t Generator::next_u64() {
    const std::uint64_t hi = next_u32();
    return (hi << 32) | next_u32();
}

double Generator::uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double Generator::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

std::int64_t Generator::uniform_int(std::int64_t lo, std::int64_t hi) {
    if (hi < lo) throw InvalidArgument("uniform_int: empty range");
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    if (span == 0) return static_cast<std::int64_t>(next_u64());
    // Rejection removes modulo bias.
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
    std::uint64_t r;
    do {
        r = next_u64();
    } while (r >= limit);
    return lo + static_cast<std::int64_t>(r % span);
}

double Generator::normal() { return norm_quantile(uniform()); }

double Generator::normal(double mean, double sd) { return mean + sd * normal(); }

double Generator::exponential(double rate) { return -std::log(uniform()) / rate; }

double Generator::gamma(double shape, double rate) {
    if (!(shape > 0.0) || !(rate > 0.0)) throw InvalidArgument("gamma: parameters must be positive");
    if (shape < 1.0) {
        const double g = gamma(shape + 1.0, 1.0);
        return g * std::pow(uniform(), 1.0 / shape) / rate;
    }
    // Marsaglia and Tsang.
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = uniform();
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v / rate;
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v / rate;
    }
}

double Generator::chi_squared(double df) { return 2.0 * gamma(0.5 * df, 1.0); }

std::int64_t Generator::binomial(std::int64_t n, double p) {
    if (n < 0 || !(p >= 0.0 && p <= 1.0)) throw InvalidArgument("binomial: bad parameters");
    if (n == 0 || p == 0.0) return 0;
    if (p == 1.0) return n;
    // Inversion by a walk from the mode, using the exact c.d.f. at the mode.
    const double u = uniform();
    const double q = 1.0 - p;
    std::int64_t k = static_cast<std::int64_t>(std::floor((n + 1) * p));
    if (k > n) k = n;
    const double log_mode = log_choose(static_cast<double>(n), static_cast<double>(k)) +
                            k * std::log(p) + (n - k) * std::log1p(-p);
    const double f_mode = std::exp(log_mode);
    const double cdf_mode =
        (k >= n) ? 1.0 : beta_cdf(q, static_cast<double>(n - k), static_cast<double>(k + 1));
    const double ratio = p / q;
    if (u <= cdf_mode) {
        // Walk down: P(X <= j - 1) = P(X <= j) - f(j).
        double cdf = cdf_mode;
        double f = f_mode;
        std::int64_t j = k;
        while (j > 0) {
            const double below = cdf - f;
            if (u > below) return j;
            f *= static_cast<double>(j) / (static_cast<double>(n - j + 1) * ratio);
            cdf = below;
            --j;
            if (f <= 0.0) break;
        }
        return j;
    }
    double cdf = cdf_mode;
    double f = f_mode;
    std::int64_t j = k;
    while (j < n) {
        f *= static_cast<double>(n - j) / static_cast<double>(j + 1) * ratio;
        ++j;
        cdf += f;
        if (u <= cdf || f <= 0.0) return j;
    }
    return n;
}

}  // namespace ccfuse::numerics
