// Lanczos tridiagonalization with the numerically stable operation ordering
// (new vector first, then SpMV, then the three-term update), configurable
// reorthogonalization, and breakdown handling by seeded restart.

#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "topk/arith.hpp"
#include "topk/coo.hpp"
#include "topk/spmv.hpp"

namespace topk {

struct TridiagonalK {
    std::vector<double> alpha;  // diagonal, size K
    std::vector<double> beta;   // off-diagonal, size K-1, all >= 0

    std::size_t size() const { return alpha.size(); }
};

struct LanczosBasis {
    std::vector<std::vector<double>> vectors;  // K unit vectors of length n

    std::size_t size() const { return vectors.size(); }
};

enum class ReorthPolicy { None, EveryTwo, Full };

inline const char* to_string(ReorthPolicy p) {
    switch (p) {
        case ReorthPolicy::None: return "none";
        case ReorthPolicy::EveryTwo: return "every2";
        case ReorthPolicy::Full: return "full";
    }
    return "?";
}

struct LanczosReport {
    std::optional<std::size_t> breakdown_at;  // 1-based iteration of first breakdown
    std::size_t restarts = 0;
    ReorthPolicy policy = ReorthPolicy::Full;
    ArithMode arith = ArithMode::f64();
    std::uint64_t saturations = 0;
    double spmv_seconds = 0.0;
    std::size_t iterations = 0;
};

struct LanczosOptions {
    double breakdown_tol = 0.0;  // 0 -> 1e-12 float, 2^(-f+4) fixed
    std::uint64_t restart_seed = 0x6c616e63;
    unsigned threads = 1;
};

struct LanczosResult {
    TridiagonalK t;
    LanczosBasis basis;
    LanczosReport report;
};

// Starting vector: by default the deterministic constant vector (all entries
// 1/sqrt(n)); with a seed, uniform in (-1, 1) then L2-normalized.
inline std::vector<double> initial_vector(std::size_t n, std::optional<std::uint64_t> seed = {}) {
    if (n == 0) throw std::invalid_argument("initial_vector: n must be positive");
    std::vector<double> v(n);
    if (!seed) {
        const double e = 1.0 / std::sqrt(static_cast<double>(n));
        for (double& x : v) x = e;
        return v;
    }
    std::mt19937_64 rng(*seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    double norm2 = 0.0;
    do {
        norm2 = 0.0;
        for (double& x : v) {
            x = dist(rng);
            norm2 += x * x;
        }
    } while (norm2 == 0.0);
    const double inv = 1.0 / std::sqrt(norm2);
    for (double& x : v) x *= inv;
    return v;
}

// One pass of modified Gram-Schmidt against the first `count` basis vectors.
inline void reorthogonalize(std::vector<double>& w, const LanczosBasis& basis, std::size_t count,
                            const ArithMode& mode = ArithMode::f64(),
                            std::uint64_t* saturations = nullptr) {
    for (std::size_t j = 0; j < count && j < basis.vectors.size(); ++j) {
        const auto& v = basis.vectors[j];
        const double proj = arith::dot(w, v, mode, saturations);
        arith::axpy(-proj, v, w, mode, saturations);
    }
}

inline LanczosResult lanczos(const CooMatrix& m, std::size_t k, const std::vector<double>& v1,
                             ReorthPolicy policy = ReorthPolicy::Full,
                             const ArithMode& mode = ArithMode::f64(), std::size_t num_cus = 1,
                             const LanczosOptions& opts = {}) {
    const std::size_t n = m.n();
    if (k == 0 || k > n) throw std::invalid_argument("lanczos: k must be in [1, n]");
    if (!m.normalized()) throw std::invalid_argument("lanczos: matrix must be Frobenius-normalized");
    if (v1.size() != n) throw std::invalid_argument("lanczos: v1 dimension mismatch");
    {
        double norm2 = 0.0;
        for (double x : v1) norm2 += x * x;
        if (std::abs(std::sqrt(norm2) - 1.0) > 1e-6)
            throw std::invalid_argument("lanczos: v1 must be L2-normalized");
    }

    double breakdown_tol = opts.breakdown_tol;
    if (breakdown_tol <= 0.0)
        breakdown_tol = mode.is_fixed() ? std::ldexp(1.0, -mode.q.fractional_bits + 4) : 1e-12;

    LanczosResult res;
    res.report.policy = policy;
    res.report.arith = mode;
    std::uint64_t* sat = mode.is_fixed() ? &res.report.saturations : nullptr;

    const auto partitions = partition(m, num_cus);
    std::mt19937_64 restart_rng(opts.restart_seed);

    auto& alpha = res.t.alpha;
    auto& beta = res.t.beta;
    auto& vecs = res.basis.vectors;

    std::vector<double> v = v1;
    arith::quantize_vector(v, mode, sat);
    std::vector<double> w_prev;  // w'_{i-1}

    for (std::size_t i = 1; i <= k; ++i) {
        if (i > 1) {
            double b = arith::norm2(w_prev, mode, sat);
            if (b <= breakdown_tol) {
                // Invariant subspace found: restart with a fresh random
                // direction orthogonal to the current basis.
                if (!res.report.breakdown_at) res.report.breakdown_at = i;
                std::vector<double> r(n);
                std::uniform_real_distribution<double> dist(-1.0, 1.0);
                for (double& x : r) x = dist(restart_rng);
                arith::quantize_vector(r, mode, sat);
                reorthogonalize(r, res.basis, i - 1, mode, sat);
                const double rn = arith::norm2(r, mode, sat);
                if (rn <= breakdown_tol) break;  // restart collapsed, stop early
                ++res.report.restarts;
                w_prev = std::move(r);
                b = rn;
                beta.push_back(0.0);  // true off-diagonal coupling is zero
            } else {
                beta.push_back(b);
            }
            v = w_prev;
            arith::divide(v, b, mode, sat);
        }
        vecs.push_back(v);

        const auto t0 = std::chrono::steady_clock::now();
        std::vector<double> w = spmv(partitions, n, v, mode, sat, opts.threads);
        res.report.spmv_seconds +=
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

        const double a = arith::dot(w, v, mode, sat);
        alpha.push_back(a);
        arith::axpy(-a, v, w, mode, sat);
        if (i > 1) arith::axpy(-beta.back(), vecs[i - 2], w, mode, sat);

        const bool reorth = policy == ReorthPolicy::Full ||
                            (policy == ReorthPolicy::EveryTwo && i % 2 == 0);
        if (reorth) reorthogonalize(w, res.basis, i, mode, sat);

        w_prev = std::move(w);
        ++res.report.iterations;
    }
    return res;
}

}  // namespace topk
