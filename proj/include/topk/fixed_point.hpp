// Signed fixed-point (Q-format) arithmetic with saturation, emulating a
// 32-bit DSP datapath: round-to-nearest-even, double-width products, and a
// wide accumulator for dot products. Saturation never traps; callers that
// care pass a counter.

#pragma once

#include <cmath>
#include <cstdint>
#include <cstddef>
#include <span>
#include <stdexcept>

namespace topk {

using fixed_t = std::int32_t;

// Q2.f layout: 1 sign bit, 1 integer bit, f fractional bits.
// Representable range is [-2, 2 - 2^-f]; the spare integer bit absorbs
// transient sums like w - alpha*v - beta*v that can exceed |1|.
struct QFormat {
    int fractional_bits = 30;
    static constexpr int total_bits = 32;

    constexpr std::int64_t raw_min() const {
        return -(std::int64_t{1} << (fractional_bits + 1));
    }
    constexpr std::int64_t raw_max() const {
        return (std::int64_t{1} << (fractional_bits + 1)) - 1;
    }
    double resolution() const { return std::ldexp(1.0, -fractional_bits); }

    void validate() const {
        if (fractional_bits < 1 || fractional_bits > 30)
            throw std::invalid_argument("QFormat: fractional_bits must be in [1, 30]");
    }
};

namespace detail {

// Round-to-nearest-even on the real line.
inline std::int64_t rne_llround(double x) {
    double fl = std::floor(x);
    double frac = x - fl;
    auto base = static_cast<std::int64_t>(fl);
    if (frac > 0.5) return base + 1;
    if (frac < 0.5) return base;
    return (base & 1) ? base + 1 : base;
}

// Arithmetic shift right by `shift` with round-to-nearest-even.
inline std::int64_t rne_shift(std::int64_t v, int shift) {
    if (shift <= 0) return v << -shift;
    const std::int64_t q = v >> shift;
    const std::int64_t r = v - (q << shift);  // in [0, 2^shift)
    const std::int64_t half = std::int64_t{1} << (shift - 1);
    if (r > half || (r == half && (q & 1))) return q + 1;
    return q;
}

inline fixed_t saturate(std::int64_t raw, const QFormat& q, std::uint64_t* saturations) {
    if (raw > q.raw_max()) {
        if (saturations) ++*saturations;
        return static_cast<fixed_t>(q.raw_max());
    }
    if (raw < q.raw_min()) {
        if (saturations) ++*saturations;
        return static_cast<fixed_t>(q.raw_min());
    }
    return static_cast<fixed_t>(raw);
}

}  // namespace detail

inline fixed_t to_fixed(double x, const QFormat& q, std::uint64_t* saturations = nullptr) {
    if (std::isnan(x)) throw std::invalid_argument("to_fixed: NaN input");
    const double scaled = std::ldexp(x, q.fractional_bits);
    // Out-of-int64 values saturate without going through rounding.
    if (scaled >= static_cast<double>(q.raw_max()) + 1.0)
        return detail::saturate(q.raw_max() + 1, q, saturations);
    if (scaled <= static_cast<double>(q.raw_min()) - 1.0)
        return detail::saturate(q.raw_min() - 1, q, saturations);
    return detail::saturate(detail::rne_llround(scaled), q, saturations);
}

inline double from_fixed(fixed_t raw, const QFormat& q) {
    return std::ldexp(static_cast<double>(raw), -q.fractional_bits);
}

inline fixed_t fixed_add(fixed_t a, fixed_t b, const QFormat& q,
                         std::uint64_t* saturations = nullptr) {
    return detail::saturate(std::int64_t{a} + std::int64_t{b}, q, saturations);
}

inline fixed_t fixed_mul(fixed_t a, fixed_t b, const QFormat& q,
                         std::uint64_t* saturations = nullptr) {
    const std::int64_t prod = std::int64_t{a} * std::int64_t{b};  // 2f fractional bits
    return detail::saturate(detail::rne_shift(prod, q.fractional_bits), q, saturations);
}

// Dot product with a 64-bit accumulator holding 2f fractional bits; a single
// rounding happens at the end, mirroring DSP accumulate-then-truncate.
inline fixed_t dot_fixed(std::span<const fixed_t> x, std::span<const fixed_t> y,
                         const QFormat& q, std::uint64_t* saturations = nullptr) {
    if (x.size() != y.size())
        throw std::invalid_argument("dot_fixed: length mismatch");
    std::int64_t acc = 0;
    for (std::size_t i = 0; i < x.size(); ++i)
        acc += std::int64_t{x[i]} * std::int64_t{y[i]};
    return detail::saturate(detail::rne_shift(acc, q.fractional_bits), q, saturations);
}

// Quantize a real value to the nearest representable Q-format value.
inline double quantize(double x, const QFormat& q, std::uint64_t* saturations = nullptr) {
    return from_fixed(to_fixed(x, q, saturations), q);
}

}  // namespace topk
