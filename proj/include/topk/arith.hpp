// Arithmetic mode selection for the Lanczos-stage datapath: float32, float64,
// or saturating Q-format fixed point. Vector kernels dispatch on the mode so
// every multiply/add of a run happens in the configured precision.

#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "topk/fixed_point.hpp"

namespace topk {

struct ArithMode {
    enum class Kind { Float32, Float64, Fixed };

    Kind kind = Kind::Float64;
    QFormat q{};

    static ArithMode f32() { return {Kind::Float32, {}}; }
    static ArithMode f64() { return {Kind::Float64, {}}; }
    static ArithMode fixed(int fractional_bits = 30) {
        ArithMode m{Kind::Fixed, QFormat{fractional_bits}};
        m.q.validate();
        return m;
    }

    bool is_fixed() const { return kind == Kind::Fixed; }

    std::string name() const {
        switch (kind) {
            case Kind::Float32: return "f32";
            case Kind::Float64: return "f64";
            case Kind::Fixed: return "fixed:" + std::to_string(q.fractional_bits);
        }
        return "?";
    }
};

// Scalar ops in the configured precision. Values travel as doubles; in fixed
// mode every stored value is a representable Q-format number.
namespace arith {

inline double quantize(double x, const ArithMode& m, std::uint64_t* sat = nullptr) {
    switch (m.kind) {
        case ArithMode::Kind::Float32: return static_cast<float>(x);
        case ArithMode::Kind::Float64: return x;
        case ArithMode::Kind::Fixed: return topk::quantize(x, m.q, sat);
    }
    return x;
}

inline double mul(double a, double b, const ArithMode& m, std::uint64_t* sat = nullptr) {
    switch (m.kind) {
        case ArithMode::Kind::Float32:
            return static_cast<float>(static_cast<float>(a) * static_cast<float>(b));
        case ArithMode::Kind::Float64: return a * b;
        case ArithMode::Kind::Fixed:
            return from_fixed(fixed_mul(to_fixed(a, m.q, sat), to_fixed(b, m.q, sat), m.q, sat), m.q);
    }
    return a * b;
}

inline double add(double a, double b, const ArithMode& m, std::uint64_t* sat = nullptr) {
    switch (m.kind) {
        case ArithMode::Kind::Float32:
            return static_cast<float>(static_cast<float>(a) + static_cast<float>(b));
        case ArithMode::Kind::Float64: return a + b;
        case ArithMode::Kind::Fixed:
            return from_fixed(fixed_add(to_fixed(a, m.q, sat), to_fixed(b, m.q, sat), m.q, sat), m.q);
    }
    return a + b;
}

// Dot product: fixed mode accumulates raw products in 64 bits and rounds once.
inline double dot(std::span<const double> x, std::span<const double> y, const ArithMode& m,
                  std::uint64_t* sat = nullptr) {
    if (x.size() != y.size()) throw std::invalid_argument("dot: length mismatch");
    switch (m.kind) {
        case ArithMode::Kind::Float32: {
            float acc = 0.0f;
            for (std::size_t i = 0; i < x.size(); ++i)
                acc += static_cast<float>(x[i]) * static_cast<float>(y[i]);
            return acc;
        }
        case ArithMode::Kind::Float64: {
            double acc = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i) acc += x[i] * y[i];
            return acc;
        }
        case ArithMode::Kind::Fixed: {
            std::int64_t acc = 0;
            for (std::size_t i = 0; i < x.size(); ++i)
                acc += std::int64_t{to_fixed(x[i], m.q, sat)} * std::int64_t{to_fixed(y[i], m.q, sat)};
            return from_fixed(detail::saturate(detail::rne_shift(acc, m.q.fractional_bits), m.q, sat),
                              m.q);
        }
    }
    return 0.0;
}

inline double norm2(std::span<const double> x, const ArithMode& m, std::uint64_t* sat = nullptr) {
    // The square root runs in double and the result is quantized once.
    return quantize(std::sqrt(std::max(0.0, dot(x, x, m, sat))), m, sat);
}

// y <- y + a*x, elementwise in the configured precision.
inline void axpy(double a, std::span<const double> x, std::span<double> y, const ArithMode& m,
                 std::uint64_t* sat = nullptr) {
    if (x.size() != y.size()) throw std::invalid_argument("axpy: length mismatch");
    for (std::size_t i = 0; i < x.size(); ++i)
        y[i] = add(y[i], mul(a, x[i], m, sat), m, sat);
}

inline void scale(double a, std::span<double> x, const ArithMode& m, std::uint64_t* sat = nullptr) {
    for (double& v : x) v = mul(a, v, m, sat);
}

// x <- x / b elementwise. Division runs in double with one quantization of
// each quotient: a reciprocal-multiply would overflow the Q-format range
// whenever b < 1/2, while the quotients themselves stay in range.
inline void divide(std::span<double> x, double b, const ArithMode& m,
                   std::uint64_t* sat = nullptr) {
    if (b == 0.0) throw std::invalid_argument("divide: division by zero");
    switch (m.kind) {
        case ArithMode::Kind::Float32:
            for (double& v : x) v = static_cast<float>(static_cast<float>(v) / static_cast<float>(b));
            break;
        case ArithMode::Kind::Float64:
            for (double& v : x) v /= b;
            break;
        case ArithMode::Kind::Fixed:
            for (double& v : x) v = topk::quantize(v / b, m.q, sat);
            break;
    }
}

inline void quantize_vector(std::span<double> x, const ArithMode& m, std::uint64_t* sat = nullptr) {
    for (double& v : x) v = quantize(v, m, sat);
}

}  // namespace arith
}  // namespace topk
