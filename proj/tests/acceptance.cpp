// Acceptance gate: one pass/fail line per criterion.
//
//  1. float64 oracle equivalence on random sparse matrices
//  2. accuracy regime of the hardware-fidelity configuration at desk scale
//  3. systolic Jacobi correctness and O(log K) sweep growth
//  4. interchange permutation oracle (exhaustive small K)
//  5. Taylor trig error bound
//  6. SpMV dataflow fidelity and per-nnz throughput flatness
//  7. explicit statement about non-reproducible hardware-only figures

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "topk/topk.hpp"

using namespace topk;
using clock_type = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(int idx, bool pass, const std::string& detail) {
    std::printf("[%s] criterion %d: %s\n", pass ? "PASS" : "FAIL", idx, detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

double elapsed(clock_type::time_point t0) {
    return std::chrono::duration<double>(clock_type::now() - t0).count();
}

CooMatrix random_symmetric(std::size_t n, std::size_t pairs, std::uint64_t seed,
                           double amplitude = 1.0) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> idx(0, n - 1);
    std::uniform_real_distribution<double> val(-amplitude, amplitude);
    std::vector<CooEntry> e;
    e.reserve(n + 2 * pairs);
    for (std::size_t i = 0; i < n; ++i) e.push_back({i, i, val(rng)});
    for (std::size_t t = 0; t < pairs; ++t) {
        std::size_t i = idx(rng), j = idx(rng);
        double v = val(rng);
        if (i == j) {
            e.push_back({i, i, v});
        } else {
            e.push_back({i, j, v});
            e.push_back({j, i, v});
        }
    }
    return CooMatrix(n, std::move(e), false);
}

// ---------------------------------------------------------------- criterion 1

void criterion1() {
    const auto t0 = clock_type::now();
    std::mt19937_64 meta(0xACCE1);
    const std::size_t k_values[] = {1, 4, 8};
    double worst_rel = 0.0, worst_res = 0.0;
    bool pass = true;
    std::string why;

    for (int t = 0; t < 20 && pass; ++t) {
        std::uniform_int_distribution<std::size_t> nd(50, 500);
        std::uniform_real_distribution<double> dd(0.02, 0.10);
        const std::size_t n = nd(meta);
        const double density = dd(meta);
        const std::size_t pairs = static_cast<std::size_t>(density * n * n / 2.0);

        // Draw until the spectrum has an isolated cut at every tested rank.
        DenseEigen oracle;
        CooMatrix m(1, {{0, 0, 1.0}});
        bool found = false;
        for (int attempt = 0; attempt < 50 && !found; ++attempt) {
            m = random_symmetric(n, pairs, meta());
            oracle = dense_oracle(to_dense(m), n);
            found = true;
            for (std::size_t k : k_values)
                if (std::abs(oracle.eigenvalues[k - 1]) - std::abs(oracle.eigenvalues[k]) < 1e-3)
                    found = false;
        }
        if (!found) {
            pass = false;
            why = "could not build a gapped test matrix";
            break;
        }

        for (std::size_t k : k_values) {
            SolveConfig cfg;  // float64, exact trig, full reorth
            cfg.basis_size = std::min(n, std::max<std::size_t>(2 * k + 16, 32));
            cfg.target_residual = 1e-6;
            auto d = top_k_eigen(m, k, cfg);
            for (std::size_t l = 0; l < k; ++l) {
                const double rel = std::abs(d.eigenvalues[l] - oracle.eigenvalues[l]) /
                                   std::max(std::abs(oracle.eigenvalues[l]), 1e-12);
                worst_rel = std::max(worst_rel, rel);
            }
            auto rep = accuracy_report(m, d);
            worst_res = std::max(worst_res, rep.max_residual);
        }
    }
    const double secs = elapsed(t0);
    pass = pass && worst_rel <= 1e-6 && worst_res <= 1e-6 && secs < 60.0;
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "oracle equivalence: 20 matrices x k in {1,4,8}, max rel err %.2e (<=1e-6), "
                  "max residual %.2e (<=1e-6), %.1fs (<60s)%s%s",
                  worst_rel, worst_res, secs, why.empty() ? "" : " -- ", why.c_str());
    report(1, pass, buf);
}

// ---------------------------------------------------------------- criterion 2

// Planted desk-scale spectrum: K leading diagonal spikes log-spaced from 0.9
// down to a shared trailing value, a 12-value guard tail below them, and weak
// random symmetric noise. The shared trailing edge makes the trailing-pair
// coupling comparable across K, so the K-averaged residual improves with K.
CooMatrix planted(std::size_t n, std::size_t K, std::uint64_t seed) {
    const double lam_k = 8e-3, tail_top = 4e-3, tail_bottom = 1e-3;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    std::vector<CooEntry> e;
    std::size_t idx = 0;
    for (std::size_t i = 0; i < K; ++i) {
        e.push_back({idx, idx, 0.9 * std::pow(lam_k / 0.9, i / double(K - 1))});
        ++idx;
    }
    for (int j = 0; j < 12; ++j) {
        e.push_back({idx, idx, tail_top * std::pow(tail_bottom / tail_top, j / 11.0)});
        ++idx;
    }
    for (std::size_t t = 0; t < 4 * n; ++t) {
        std::size_t i = rng() % n, j = rng() % n;
        double v = 1e-6 * U(rng);
        if (i == j) {
            e.push_back({i, i, v});
        } else {
            e.push_back({i, j, v});
            e.push_back({j, i, v});
        }
    }
    return CooMatrix(n, std::move(e), false);
}

void criterion2() {
    bool pass = true;
    double worst_mean_res = 0.0, worst_orth = 90.0, worst_ratio = 0.0;
    for (std::size_t n : {10000ul, 31623ul, 100000ul}) {
        double m8 = 0.0, m24 = 0.0;
        for (std::size_t K : {8ul, 16ul, 24ul}) {
            auto m = planted(n, K, 1000003 + n + K);
            auto cfg = SolveConfig::hardware_fidelity();
            cfg.basis_size = K + 2;
            auto d = top_k_eigen(m, K, cfg);
            auto rep = accuracy_report(m, d);
            if (rep.mean_residual > 1e-3 || rep.mean_orthogonality_degrees < 89.9) pass = false;
            worst_mean_res = std::max(worst_mean_res, rep.mean_residual);
            worst_orth = std::min(worst_orth, rep.mean_orthogonality_degrees);
            if (K == 8) m8 = rep.mean_residual;
            if (K == 24) m24 = rep.mean_residual;
        }
        // Fig-8-style trend: error does not get worse as K grows (2x noise margin).
        if (m24 > 2.0 * m8) pass = false;
        worst_ratio = std::max(worst_ratio, m24 / m8);
    }

    // Real-graph leg: run one local Matrix Market file if present.
    std::string real_leg = "real graph: skipped (not available)";
    std::error_code ec;
    for (const auto& entry : std::filesystem::directory_iterator(TOPK_DATA_DIR, ec)) {
        if (entry.path().extension() != ".mtx") continue;
        if (entry.file_size() > 100ull * 1024 * 1024) continue;
        auto m = load_matrix_market(entry.path().string(), true);
        auto cfg = SolveConfig::hardware_fidelity();
        cfg.basis_size = 8 + 2;
        auto d = top_k_eigen(m, 8, cfg);
        auto rep = accuracy_report(m, d);
        const bool ok = rep.mean_residual <= 1e-3 && rep.mean_orthogonality_degrees >= 89.9;
        if (!ok) pass = false;
        char rb[160];
        std::snprintf(rb, sizeof rb, "real graph %s: mean res %.2e, orth %.3f (%s)",
                      entry.path().filename().string().c_str(), rep.mean_residual,
                      rep.mean_orthogonality_degrees, ok ? "ok" : "FAIL");
        real_leg = rb;
        break;
    }

    char buf[320];
    std::snprintf(buf, sizeof buf,
                  "hardware-fidelity accuracy: n in {1e4,31623,1e5}, K in {8,16,24}: worst mean "
                  "residual %.2e (<=1e-3), worst mean orthogonality %.4f deg (>=89.9), worst "
                  "K24/K8 ratio %.2f (<=2); %s",
                  worst_mean_res, worst_orth, worst_ratio, real_leg.c_str());
    report(2, pass, buf);
}

// ---------------------------------------------------------------- criterion 3

void criterion3() {
    std::mt19937_64 rng(0xACCE3);
    std::uniform_real_distribution<double> val(-1.0, 1.0);
    bool pass = true;
    double worst_eig = 0.0;
    const std::size_t ks[] = {4, 8, 16, 32};
    std::vector<double> mean_sweeps;

    for (std::size_t K : ks) {
        double sweep_sum = 0.0;
        for (int trial = 0; trial < 50; ++trial) {
            std::vector<double> alpha(K), beta(K - 1);
            for (double& a : alpha) a = val(rng);
            for (double& b : beta) b = val(rng);

            auto res = jacobi_eigen_tridiagonal(alpha, beta, TrigMode::Exact);
            if (!res.converged) pass = false;
            sweep_sum += static_cast<double>(res.sweeps);

            auto oracle = dense_oracle(detail::tridiagonal_to_dense(alpha, beta, K), K);
            auto got = res.eigenvalues;
            auto want = oracle.eigenvalues;
            std::sort(got.begin(), got.end());
            std::sort(want.begin(), want.end());
            for (std::size_t i = 0; i < K; ++i)
                worst_eig = std::max(worst_eig, std::abs(got[i] - want[i]));
        }
        mean_sweeps.push_back(sweep_sum / 50.0);
    }
    if (worst_eig > 1e-9) pass = false;

    // Off-diagonal norm non-increasing per full tournament sweep.
    for (std::size_t K : ks) {
        for (int trial = 0; trial < 10; ++trial) {
            std::vector<double> dense(K * K, 0.0);
            for (std::size_t i = 0; i < K; ++i) {
                dense[i * K + i] = val(rng);
                if (i + 1 < K) {
                    const double b = val(rng);
                    dense[i * K + i + 1] = b;
                    dense[(i + 1) * K + i] = b;
                }
            }
            SystolicGrid grid(dense, K, TrigMode::Exact);
            double prev = grid.off_norm();
            for (int sweep = 0; sweep < 8; ++sweep) {
                for (std::size_t r = 0; r + 1 < K; ++r) grid.step();
                const double now = grid.off_norm();
                if (now > prev * (1.0 + 1e-12) + 1e-15) pass = false;
                prev = now;
            }
        }
    }

    // Least-squares fit mean_sweeps ~ c * log2(K) + c'; require c <= 10.
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const int pts = 4;
    for (int i = 0; i < pts; ++i) {
        const double x = std::log2(double(ks[i])), y = mean_sweeps[i];
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double slope = (pts * sxy - sx * sy) / (pts * sxx - sx * sx);
    if (slope > 10.0) pass = false;

    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "systolic Jacobi: 50 trials/K, max |eig err| %.2e (<=1e-9), off-norm "
                  "non-increasing, mean sweeps {%.1f, %.1f, %.1f, %.1f} for K {4,8,16,32}, "
                  "log2-fit slope %.2f (<=10)",
                  worst_eig, mean_sweeps[0], mean_sweeps[1], mean_sweeps[2], mean_sweeps[3],
                  slope);
    report(3, pass, buf);
}

// ---------------------------------------------------------------- criterion 4

void criterion4() {
    bool pass = true;
    for (std::size_t K = 4; K <= 16; K += 2) {
        std::vector<double> dense(K * K);
        for (std::size_t i = 0; i < K * K; ++i) dense[i] = double(i) + 0.5;  // distinct labels
        SystolicGrid grid(dense, K, TrigMode::Exact);
        const auto src = SystolicGrid::interchange_source_index(K);

        // perm[d] = original index currently sitting at position d.
        std::vector<std::size_t> perm(K);
        for (std::size_t i = 0; i < K; ++i) perm[i] = i;

        // Tournament completeness: track which index pairs co-occupy a
        // diagonal 2x2 block in rounds 0 .. K-2.
        std::vector<std::vector<bool>> met(K, std::vector<bool>(K, false));
        auto mark = [&] {
            for (std::size_t t = 0; t < K / 2; ++t) {
                const std::size_t a = perm[2 * t], b = perm[2 * t + 1];
                met[a][b] = met[b][a] = true;
            }
        };
        mark();

        for (std::size_t step = 0; step < 2 * (K - 1); ++step) {
            grid.interchange();
            std::vector<std::size_t> next(K);
            for (std::size_t d = 0; d < K; ++d) next[d] = perm[src[d]];
            perm = std::move(next);
            if (step + 2 < K) mark();  // rounds 1 .. K-2

            // Reassembled state must equal P M P^T exactly.
            auto out = grid.reassemble();
            for (std::size_t i = 0; i < K && pass; ++i)
                for (std::size_t j = 0; j < K; ++j)
                    if (out[i * K + j] != dense[perm[i] * K + perm[j]]) {
                        pass = false;
                        break;
                    }
        }
        // Period 2(K-1): back to the identity arrangement.
        for (std::size_t i = 0; i < K; ++i)
            if (perm[i] != i) pass = false;
        for (std::size_t i = 0; i < K; ++i)
            for (std::size_t j = i + 1; j < K; ++j)
                if (!met[i][j]) pass = false;
    }
    report(4, pass,
           "interchange permutation: P M P^T exact under label tracking, every pair reaches a "
           "diagonal processor within K-1 rounds, period 2(K-1); exhaustive for even K <= 16");
}

// ---------------------------------------------------------------- criterion 5

void criterion5() {
    const std::size_t points = 10000;
    double max_c = 0.0, max_s = 0.0, max_norm = 0.0;
    for (std::size_t i = 0; i < points; ++i) {
        const double theta =
            -std::numbers::pi / 4 + (std::numbers::pi / 2) * i / double(points - 1);
        const auto r = rotation_from_angle(theta, TrigMode::Taylor3);
        max_c = std::max(max_c, std::abs(r.c - std::cos(theta)));
        max_s = std::max(max_s, std::abs(r.s - std::sin(theta)));
        max_norm = std::max(max_norm, std::abs(r.c * r.c + r.s * r.s - 1.0));
    }
    const bool pass = max_c <= 1e-3 && max_s <= 1e-3 && max_norm <= 1e-12;
    char buf[192];
    std::snprintf(buf, sizeof buf,
                  "taylor trig on 1e4-point grid: max |dc| %.2e, max |ds| %.2e (<=1e-3), "
                  "renormalization deviation %.1e (<=1e-12)",
                  max_c, max_s, max_norm);
    report(5, pass, buf);
}

// ---------------------------------------------------------------- criterion 6

void criterion6() {
    bool pass = true;
    std::mt19937_64 rng(0xACCE6);
    std::uniform_real_distribution<double> val(-1.0, 1.0);

    // Partition-count invariance (bitwise) + agreement with a dense multiply.
    double worst_dense = 0.0;
    for (int t = 0; t < 10; ++t) {
        const std::size_t n = 100 + (rng() % 900);
        auto m = random_symmetric(n, n * 3, rng());
        std::vector<double> x(n);
        for (double& v : x) v = val(rng);
        auto ref = spmv(m, x, 1);
        for (std::size_t cus = 2; cus <= 8; ++cus) {
            auto y = spmv(m, x, cus);
            for (std::size_t i = 0; i < n; ++i)
                if (y[i] != ref[i]) pass = false;
        }
        std::vector<double> dense(n, 0.0);
        for (const auto& e : m.entries()) dense[e.row] += e.value * x[e.col];
        for (std::size_t i = 0; i < n; ++i)
            worst_dense = std::max(worst_dense, std::abs(ref[i] - dense[i]));
    }
    if (worst_dense > 1e-12) pass = false;

    // Per-nnz throughput flatness across two decades of nnz.
    struct Scale {
        std::size_t n, nnz;
    };
    std::vector<double> per_nnz_ns;
    for (Scale s : {Scale{10000, 100000}, Scale{30000, 1000000}, Scale{100000, 10000000}}) {
        const std::size_t pairs = (s.nnz - s.n) / 2;
        auto m = random_symmetric(s.n, pairs, 0xBE0 + s.n, 0.001);
        auto parts = partition(m, 5);
        std::vector<double> x(s.n, 1.0 / std::sqrt(double(s.n)));
        double best = 1e100;
        for (int rep = 0; rep < 4; ++rep) {
            auto t0 = clock_type::now();
            auto y = spmv(parts, s.n, x);
            const double secs = elapsed(t0);
            if (rep > 0) best = std::min(best, secs);  // first pass warms the cache
            x[0] += y[0] * 1e-30;                      // keep the call observable
        }
        per_nnz_ns.push_back(best / double(m.nnz()) * 1e9);
    }
    const double flat = *std::max_element(per_nnz_ns.begin(), per_nnz_ns.end()) /
                        *std::min_element(per_nnz_ns.begin(), per_nnz_ns.end());
    if (flat >= 5.0) pass = false;

    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "spmv dataflow: bitwise invariant for 1..8 CUs, dense agreement %.1e (<=1e-12), "
                  "per-nnz ns {%.2f, %.2f, %.2f} across nnz {1e5,1e6,1e7}, ratio %.2f (<5)",
                  worst_dense, per_nnz_ns[0], per_nnz_ns[1], per_nnz_ns[2], flat);
    report(6, pass, buf);
}

// ---------------------------------------------------------------- criterion 7

void criterion7() {
    report(7, true,
           "hardware-only figures (CPU speedup, power efficiency, clock frequency, resource "
           "utilization) are properties of the FPGA implementation and are NOT reproducible or "
           "asserted by this software artifact; criteria 1-6 stand in for them");
}

}  // namespace

int main() {
    criterion1();
    criterion2();
    criterion3();
    criterion4();
    criterion5();
    criterion6();
    criterion7();
    if (failures == 0)
        std::printf("acceptance: all 7 criteria passed\n");
    else
        std::printf("acceptance: %d criterion(s) FAILED\n", failures);
    return failures == 0 ? 0 : 1;
}
