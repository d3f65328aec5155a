// End-to-end pipeline: Frobenius-normalize, Lanczos to a K x K tridiagonal,
// systolic Jacobi eigensolve, then map eigenvectors back through the Lanczos
// basis and rescale eigenvalues to the original matrix. Also the dense
// cyclic-Jacobi oracle (classical row-by-row sweeps, exact trig, no systolic
// structure) and the accuracy metrics used for verification.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <vector>

#include "topk/arith.hpp"
#include "topk/coo.hpp"
#include "topk/jacobi.hpp"
#include "topk/lanczos.hpp"
#include "topk/spmv.hpp"

namespace topk {

inline JacobiResult jacobi_eigen(const TridiagonalK& t, TrigMode trig, double tol = 0.0,
                                 std::size_t max_sweeps = 0) {
    return jacobi_eigen_tridiagonal(t.alpha, t.beta, trig, tol, max_sweeps);
}

struct SolveConfig {
    ReorthPolicy policy = ReorthPolicy::Full;
    ArithMode arith = ArithMode::f64();
    TrigMode trig = TrigMode::Exact;
    std::size_t num_cus = 1;
    std::optional<std::uint64_t> seed;  // empty -> deterministic constant v1
    double jacobi_tol = 0.0;            // 0 -> trig-mode default
    std::size_t max_sweeps = 0;         // 0 -> default
    unsigned threads = 1;

    // Lanczos subspace dimension; 0 means exactly k iterations (the
    // hardware regime). A larger basis improves the trailing Ritz pairs.
    std::size_t basis_size = 0;
    // When > 0: grow the basis (x2, capped at n) until every returned
    // residual ||Mq - lambda q|| is below this, measured at original scale.
    double target_residual = 0.0;

    static SolveConfig hardware_fidelity() {
        SolveConfig c;
        c.policy = ReorthPolicy::EveryTwo;
        c.arith = ArithMode::fixed(30);
        c.trig = TrigMode::Taylor3;
        c.num_cus = 5;
        return c;
    }

    static SolveConfig precise() { return SolveConfig{}; }
};

struct EigenDecomposition {
    std::vector<double> eigenvalues;                // descending |lambda|, original scale
    std::vector<std::vector<double>> eigenvectors;  // unit vectors of length n
    std::size_t k_effective = 0;
    double matrix_norm = 0.0;  // ||M||_F used for rescaling
    LanczosReport lanczos_report;
    std::size_t jacobi_sweeps = 0;
    bool jacobi_converged = true;
    std::size_t basis_used = 0;
};

struct AccuracyReport {
    double mean_orthogonality_degrees = 90.0;
    double min_orthogonality_degrees = 90.0;
    double mean_residual = 0.0;
    double max_residual = 0.0;
    std::vector<double> per_pair_residuals;
};

namespace detail {

inline void fix_sign(std::vector<double>& v) {
    for (double x : v) {
        if (std::abs(x) > 1e-12) {
            if (x < 0.0)
                for (double& y : v) y = -y;
            return;
        }
    }
}

struct RitzPair {
    double value;
    std::vector<double> vector;
    std::size_t order;
};

}  // namespace detail

inline EigenDecomposition top_k_eigen(const CooMatrix& m, std::size_t k,
                                      const SolveConfig& cfg = {}) {
    const std::size_t n = m.n();
    if (k == 0 || k > std::min<std::size_t>(n, 64))
        throw std::invalid_argument("top_k_eigen: k must be in [1, min(n, 64)]");

    const CooMatrix norm = m.normalized() ? m : frobenius_normalize(m);
    const double scale = norm.original_norm();

    std::size_t basis = cfg.basis_size == 0 ? k : std::min(cfg.basis_size, n);
    basis = std::max(basis, k);

    EigenDecomposition out;
    for (;;) {
        const auto v1 = initial_vector(n, cfg.seed);
        LanczosOptions lopts;
        lopts.threads = cfg.threads;
        if (cfg.seed) lopts.restart_seed = *cfg.seed ^ 0x72657374;
        // More CUs than rows degenerates to one row per CU.
        auto lan = lanczos(norm, basis, v1, cfg.policy, cfg.arith,
                           std::min<std::size_t>(cfg.num_cus, n), lopts);

        auto jac = jacobi_eigen(lan.t, cfg.trig, cfg.jacobi_tol, cfg.max_sweeps);

        // Map each small-problem eigenvector x back: q = sum_j x[j] * v_j.
        const std::size_t m_eff = lan.t.alpha.size();
        std::vector<detail::RitzPair> pairs(m_eff);
        for (std::size_t l = 0; l < m_eff; ++l) {
            pairs[l].value = jac.eigenvalues[l];
            pairs[l].order = l;
            std::vector<double> q(n, 0.0);
            for (std::size_t j = 0; j < m_eff; ++j) {
                const double c = jac.eigenvectors[l][j];
                const auto& vj = lan.basis.vectors[j];
                for (std::size_t r = 0; r < n; ++r) q[r] += c * vj[r];
            }
            double nrm = std::sqrt(std::inner_product(q.begin(), q.end(), q.begin(), 0.0));
            if (nrm > 0.0)
                for (double& x : q) x /= nrm;
            detail::fix_sign(q);
            pairs[l].vector = std::move(q);
        }

        std::sort(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) {
            const double ma = std::abs(a.value), mb = std::abs(b.value);
            if (ma != mb) return ma > mb;
            if (a.value != b.value) return a.value > b.value;
            return a.order < b.order;
        });

        const std::size_t k_eff = std::min(k, m_eff);
        out.eigenvalues.assign(k_eff, 0.0);
        out.eigenvectors.assign(k_eff, {});
        for (std::size_t l = 0; l < k_eff; ++l) {
            out.eigenvalues[l] = pairs[l].value * scale;
            out.eigenvectors[l] = std::move(pairs[l].vector);
        }
        out.k_effective = k_eff;
        out.matrix_norm = scale;
        out.lanczos_report = lan.report;
        out.jacobi_sweeps = jac.sweeps;
        out.jacobi_converged = jac.converged;
        out.basis_used = basis;

        if (cfg.target_residual <= 0.0 || basis >= n) break;
        double worst = 0.0;
        for (std::size_t l = 0; l < k_eff; ++l) {
            auto mq = spmv(m, out.eigenvectors[l], 1, ArithMode::f64());
            double r2 = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double d = mq[i] - out.eigenvalues[l] * out.eigenvectors[l][i];
                r2 += d * d;
            }
            worst = std::max(worst, std::sqrt(r2));
        }
        if (worst <= cfg.target_residual) break;
        basis = std::min(n, basis * 2);
    }
    return out;
}

// Pairwise orthogonality angle (90 degrees = orthogonal) and per-pair
// residual ||Mq - lambda q||_2, computed against the given matrix.
inline AccuracyReport accuracy_report(const CooMatrix& m, const EigenDecomposition& d) {
    AccuracyReport rep;
    const std::size_t n = m.n();
    const std::size_t k = d.k_effective;
    for (const auto& q : d.eigenvectors)
        if (q.size() != n) throw std::invalid_argument("accuracy_report: dimension mismatch");

    if (k >= 2) {
        double sum = 0.0, mn = 90.0;
        std::size_t count = 0;
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = i + 1; j < k; ++j) {
                const double dot = std::abs(std::inner_product(
                    d.eigenvectors[i].begin(), d.eigenvectors[i].end(),
                    d.eigenvectors[j].begin(), 0.0));
                const double angle =
                    std::acos(std::clamp(dot, 0.0, 1.0)) * 180.0 / std::numbers::pi;
                sum += angle;
                mn = std::min(mn, angle);
                ++count;
            }
        rep.mean_orthogonality_degrees = sum / count;
        rep.min_orthogonality_degrees = mn;
    }

    rep.per_pair_residuals.reserve(k);
    for (std::size_t l = 0; l < k; ++l) {
        const auto mq = spmv(m, d.eigenvectors[l], 1, ArithMode::f64());
        double r2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double diff = mq[i] - d.eigenvalues[l] * d.eigenvectors[l][i];
            r2 += diff * diff;
        }
        rep.per_pair_residuals.push_back(std::sqrt(r2));
    }
    if (k > 0) {
        rep.mean_residual =
            std::accumulate(rep.per_pair_residuals.begin(), rep.per_pair_residuals.end(), 0.0) / k;
        rep.max_residual =
            *std::max_element(rep.per_pair_residuals.begin(), rep.per_pair_residuals.end());
    }
    return rep;
}

struct DenseEigen {
    std::vector<double> eigenvalues;                // descending |lambda|
    std::vector<std::vector<double>> eigenvectors;  // unit vectors
};

inline constexpr std::size_t kDenseOracleMaxN = 2048;

// Classical cyclic Jacobi on a dense symmetric matrix (row-major). This is
// the independent reference path: exact trig, textbook (p, q) sweeps, no
// systolic structure and no tournament ordering.
inline DenseEigen dense_oracle(std::vector<double> a, std::size_t n) {
    if (n == 0 || a.size() != n * n) throw std::invalid_argument("dense_oracle: bad dimensions");
    if (n > kDenseOracleMaxN)
        throw std::invalid_argument("dense_oracle: n exceeds dense feasibility bound");
    double asym = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            asym = std::max(asym, std::abs(a[i * n + j] - a[j * n + i]));
            scale = std::max(scale, std::abs(a[i * n + j]));
        }
    if (asym > 1e-12 * std::max(scale, 1.0))
        throw std::invalid_argument("dense_oracle: matrix is not symmetric");

    std::vector<double> v(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 1.0;

    double norm = 0.0;
    for (double x : a) norm += x * x;
    norm = std::sqrt(norm);
    const double stop = 1e-14 * std::max(norm, 1e-300);

    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += 2.0 * a[p * n + q] * a[p * n + q];
        off = std::sqrt(off);
        if (off <= stop) break;
        const double thresh = off / n;  // skip entries that cannot matter this sweep
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a[p * n + q];
                if (std::abs(apq) < 1e-3 * thresh) continue;
                const double app = a[p * n + p], aqq = a[q * n + q];
                // Stable rotation via t = tan(theta).
                const double tau = (aqq - app) / (2.0 * apq);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                for (std::size_t i = 0; i < n; ++i) {
                    const double aip = a[i * n + p], aiq = a[i * n + q];
                    a[i * n + p] = c * aip - s * aiq;
                    a[i * n + q] = s * aip + c * aiq;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    const double api = a[p * n + i], aqi = a[q * n + i];
                    a[p * n + i] = c * api - s * aqi;
                    a[q * n + i] = s * api + c * aqi;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    const double vip = v[i * n + p], viq = v[i * n + q];
                    v[i * n + p] = c * vip - s * viq;
                    v[i * n + q] = s * vip + c * viq;
                }
            }
        }
    }

    DenseEigen out;
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t x, std::size_t y) {
        const double mx = std::abs(a[x * n + x]), my = std::abs(a[y * n + y]);
        if (mx != my) return mx > my;
        if (a[x * n + x] != a[y * n + y]) return a[x * n + x] > a[y * n + y];
        return x < y;
    });
    out.eigenvalues.reserve(n);
    out.eigenvectors.reserve(n);
    for (std::size_t l : idx) {
        out.eigenvalues.push_back(a[l * n + l]);
        std::vector<double> col(n);
        for (std::size_t i = 0; i < n; ++i) col[i] = v[i * n + l];
        detail::fix_sign(col);
        out.eigenvectors.push_back(std::move(col));
    }
    return out;
}

inline std::vector<double> to_dense(const CooMatrix& m) {
    if (m.n() > kDenseOracleMaxN)
        throw std::invalid_argument("to_dense: n exceeds dense feasibility bound");
    std::vector<double> a(m.n() * m.n(), 0.0);
    for (const auto& e : m.entries()) a[e.row * m.n() + e.col] = e.value;
    return a;
}

// Rank-k reconstruction sum(lambda_l q_l q_l^T), dense row-major.
inline std::vector<double> reconstruct_topk(const EigenDecomposition& d) {
    if (d.k_effective == 0 || d.eigenvectors.empty())
        throw std::invalid_argument("reconstruct_topk: empty decomposition");
    const std::size_t n = d.eigenvectors.front().size();
    if (n > kDenseOracleMaxN)
        throw std::invalid_argument("reconstruct_topk: n exceeds dense feasibility bound");
    std::vector<double> out(n * n, 0.0);
    for (std::size_t l = 0; l < d.k_effective; ++l) {
        const auto& q = d.eigenvectors[l];
        const double lambda = d.eigenvalues[l];
        for (std::size_t i = 0; i < n; ++i) {
            const double li = lambda * q[i];
            for (std::size_t j = 0; j < n; ++j) out[i * n + j] += li * q[j];
        }
    }
    return out;
}

}  // namespace topk
