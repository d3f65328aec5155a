// Systolic-array formulation of the Jacobi eigenvalue algorithm for the K x K
// tridiagonal Lanczos output. The matrix lives as a (K/2) x (K/2) grid of
// 2x2 blocks; each round the diagonal processors pick rotation angles, every
// block applies its two-sided rotation, eigenvector blocks absorb the column
// rotations, and a row/column interchange routes fresh off-diagonal entries
// onto the diagonal (tournament ordering). Trigonometry is either exact or
// Taylor-series (the FPGA datapath).

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace topk {

enum class TrigMode { Exact, Taylor3 };

inline const char* to_string(TrigMode t) {
    return t == TrigMode::Exact ? "exact" : "taylor3";
}

struct RotationPair {
    double c = 1.0;  // cos(theta)
    double s = 0.0;  // sin(theta)
};

struct Block2x2 {
    double a = 0.0, b = 0.0, c = 0.0, d = 0.0;  // [[a, b], [c, d]]
};

namespace detail {

// Truncated series on a reduced argument. arctan folds to |u| <= tan(pi/8)
// via arctan(t) = pi/2 - arctan(1/t) and arctan(t) = pi/4 + arctan((t-1)/(t+1)).
inline double taylor_arctan(double t) {
    const double at = std::abs(t);
    double base = 0.0, u = at;
    bool from_reciprocal = false;
    if (at > 1.0) {
        u = 1.0 / at;
        from_reciprocal = true;
    }
    constexpr double tan_pi_8 = 0.41421356237309503;  // sqrt(2) - 1
    if (u > tan_pi_8) {
        base = std::numbers::pi / 4.0;
        u = (u - 1.0) / (u + 1.0);  // in (-tan(pi/8), 0]
    }
    const double u2 = u * u;
    double r = base + u * (1.0 - u2 * (1.0 / 3.0) + u2 * u2 * (1.0 / 5.0));
    if (from_reciprocal) r = std::numbers::pi / 2.0 - r;
    return t < 0.0 ? -r : r;
}

inline double taylor_sin(double x) {
    const double x2 = x * x;
    return x * (1.0 - x2 * (1.0 / 6.0) + x2 * x2 * (1.0 / 120.0));
}

inline double taylor_cos(double x) {
    const double x2 = x * x;
    return 1.0 - x2 * 0.5 + x2 * x2 * (1.0 / 24.0);
}

}  // namespace detail

// (cos, sin) of a given angle in the selected trig mode. Taylor results are
// renormalized in full precision so the rotation stays orthogonal.
inline RotationPair rotation_from_angle(double theta, TrigMode trig) {
    if (trig == TrigMode::Exact) return {std::cos(theta), std::sin(theta)};
    const double c = detail::taylor_cos(theta);
    const double s = detail::taylor_sin(theta);
    const double inv = 1.0 / std::sqrt(c * c + s * s);
    return {c * inv, s * inv};
}

// Annihilation angle for a diagonal block [[a, b], [b, d]]:
// theta = 1/2 arctan(2b / (a - d)), in [-pi/4, pi/4]. An already-diagonal
// block (b = 0) gets the identity rotation even when a = d.
inline RotationPair compute_rotation(double a, double b, double d, TrigMode trig) {
    if (b == 0.0) return {1.0, 0.0};
    double theta;
    if (a == d) {
        theta = (b > 0.0 ? 1.0 : -1.0) * std::numbers::pi / 4.0;
    } else {
        const double t = 2.0 * b / (a - d);
        theta = 0.5 * (trig == TrigMode::Exact ? std::atan(t) : detail::taylor_arctan(t));
    }
    return rotation_from_angle(theta, trig);
}

// R(theta) * B * R(theta)^T with R = [[c, s], [-s, c]]; with the annihilation
// angle and exact trig the result is diagonal.
inline Block2x2 rotate_diagonal(const Block2x2& blk, const RotationPair& r) {
    const double ra = r.c * blk.a + r.s * blk.c;
    const double rb = r.c * blk.b + r.s * blk.d;
    const double rc = -r.s * blk.a + r.c * blk.c;
    const double rd = -r.s * blk.b + r.c * blk.d;
    return {ra * r.c + rb * r.s, -ra * r.s + rb * r.c,
            rc * r.c + rd * r.s, -rc * r.s + rd * r.c};
}

// R(theta_i) * B * R(theta_j)^T: left rotation from the row's diagonal
// processor, right rotation from the column's.
inline Block2x2 rotate_offdiagonal(const Block2x2& blk, const RotationPair& row_rot,
                                   const RotationPair& col_rot) {
    const double ra = row_rot.c * blk.a + row_rot.s * blk.c;
    const double rb = row_rot.c * blk.b + row_rot.s * blk.d;
    const double rc = -row_rot.s * blk.a + row_rot.c * blk.c;
    const double rd = -row_rot.s * blk.b + row_rot.c * blk.d;
    return {ra * col_rot.c + rb * col_rot.s, -ra * col_rot.s + rb * col_rot.c,
            rc * col_rot.c + rd * col_rot.s, -rc * col_rot.s + rd * col_rot.c};
}

// B * R(theta_j)^T: eigenvector blocks only absorb the column rotation.
inline Block2x2 rotate_eigenvector(const Block2x2& blk, const RotationPair& col_rot) {
    return {blk.a * col_rot.c + blk.b * col_rot.s, -blk.a * col_rot.s + blk.b * col_rot.c,
            blk.c * col_rot.c + blk.d * col_rot.s, -blk.c * col_rot.s + blk.d * col_rot.c};
}

class SystolicGrid {
  public:
    // Builds the grid from a dense symmetric K x K matrix (row-major), K even.
    SystolicGrid(const std::vector<double>& dense, std::size_t k, TrigMode trig)
        : k_(k), half_(k / 2), trig_(trig), blocks_(half_ * half_), eig_blocks_(half_ * half_) {
        if (k_ == 0 || k_ % 2 != 0)
            throw std::invalid_argument("SystolicGrid: K must be positive and even");
        if (dense.size() != k_ * k_)
            throw std::invalid_argument("SystolicGrid: dense size mismatch");
        for (std::size_t i = 0; i < half_; ++i)
            for (std::size_t j = 0; j < half_; ++j) {
                block(i, j) = {dense[(2 * i) * k_ + 2 * j], dense[(2 * i) * k_ + 2 * j + 1],
                               dense[(2 * i + 1) * k_ + 2 * j],
                               dense[(2 * i + 1) * k_ + 2 * j + 1]};
                eig_block(i, j) = {i == j ? 1.0 : 0.0, 0.0, 0.0, i == j ? 1.0 : 0.0};
            }
    }

    std::size_t k() const { return k_; }
    std::size_t half() const { return half_; }
    std::size_t rounds() const { return rounds_; }

    Block2x2& block(std::size_t i, std::size_t j) { return blocks_[i * half_ + j]; }
    const Block2x2& block(std::size_t i, std::size_t j) const { return blocks_[i * half_ + j]; }
    Block2x2& eig_block(std::size_t i, std::size_t j) { return eig_blocks_[i * half_ + j]; }
    const Block2x2& eig_block(std::size_t i, std::size_t j) const {
        return eig_blocks_[i * half_ + j];
    }

    // One rotation phase: diagonal processors fix the angles, then every
    // block (and eigenvector block) rotates. Phases have barrier semantics:
    // all angles come from the pre-rotation state.
    void rotate_phase() {
        std::vector<RotationPair> rots(half_);
        for (std::size_t i = 0; i < half_; ++i) {
            const Block2x2& p = block(i, i);
            rots[i] = compute_rotation(p.a, p.b, p.d, trig_);
        }
        for (std::size_t i = 0; i < half_; ++i)
            for (std::size_t j = 0; j < half_; ++j) {
                if (i == j)
                    block(i, j) = rotate_diagonal(block(i, j), rots[i]);
                else
                    block(i, j) = rotate_offdiagonal(block(i, j), rots[i], rots[j]);
                eig_block(i, j) = rotate_eigenvector(eig_block(i, j), rots[j]);
            }
    }

    // Row/column interchange: the tournament permutation that routes new
    // off-diagonal entries onto diagonal processors. Interior processors pass
    // their left column to the right neighbor's right slot and their right
    // column to the left neighbor's left slot; the first processor keeps its
    // left column and feeds its right one to processor 2; the last folds its
    // right column into its own left slot. Executing from the highest index
    // downward lets one held value replace the K temporaries a forward sweep
    // would need. Rows follow the transposed rules; eigenvector blocks track
    // the column permutation so column l of V keeps pairing diagonal entry l.
    void interchange() {
        for (std::size_t i = 0; i < half_; ++i)
            for (std::size_t lr = 0; lr < 2; ++lr)
                apply_line(
                    [&](std::size_t c) { return get_entry(2 * i + lr, c, blocks_); },
                    [&](std::size_t c, double v) { set_entry(2 * i + lr, c, v, blocks_); });
        for (std::size_t j = 0; j < half_; ++j)
            for (std::size_t lc = 0; lc < 2; ++lc)
                apply_line(
                    [&](std::size_t r) { return get_entry(r, 2 * j + lc, blocks_); },
                    [&](std::size_t r, double v) { set_entry(r, 2 * j + lc, v, blocks_); });
        for (std::size_t i = 0; i < half_; ++i)
            for (std::size_t lr = 0; lr < 2; ++lr)
                apply_line(
                    [&](std::size_t c) { return get_entry(2 * i + lr, c, eig_blocks_); },
                    [&](std::size_t c, double v) { set_entry(2 * i + lr, c, v, eig_blocks_); });
        ++rounds_;
    }

    void step() {
        rotate_phase();
        if (half_ > 1) interchange();
    }

    // The index permutation one interchange realizes: new position d holds
    // the value previously at source_of(k)[d].
    static std::vector<std::size_t> interchange_source_index(std::size_t k) {
        std::vector<std::size_t> src(k);
        for (std::size_t d = 0; d < k; ++d) src[d] = d;
        if (k < 4) return src;
        src[2] = 1;
        for (std::size_t j = 2; j < k / 2; ++j) src[2 * j] = 2 * j - 2;
        src[k - 1] = k - 2;
        for (std::size_t j = 0; j + 1 < k / 2; ++j) src[2 * j + 1] = 2 * j + 3;
        src[k - 3] = k - 1;
        return src;
    }

    std::vector<double> reassemble() const { return assemble(blocks_); }
    std::vector<double> reassemble_eigenvectors() const { return assemble(eig_blocks_); }

    // sqrt of the sum of squared off-diagonal elements of the reassembled matrix.
    double off_norm() const {
        double sum = 0.0;
        for (std::size_t i = 0; i < half_; ++i)
            for (std::size_t j = 0; j < half_; ++j) {
                const Block2x2& p = block(i, j);
                if (i == j)
                    sum += p.b * p.b + p.c * p.c;
                else
                    sum += p.a * p.a + p.b * p.b + p.c * p.c + p.d * p.d;
            }
        return std::sqrt(sum);
    }

    double frobenius_norm() const {
        double sum = 0.0;
        for (const auto& p : blocks_)
            sum += p.a * p.a + p.b * p.b + p.c * p.c + p.d * p.d;
        return std::sqrt(sum);
    }

  private:
    double get_entry(std::size_t r, std::size_t c, const std::vector<Block2x2>& bs) const {
        const Block2x2& p = bs[(r / 2) * half_ + c / 2];
        return r % 2 ? (c % 2 ? p.d : p.c) : (c % 2 ? p.b : p.a);
    }
    void set_entry(std::size_t r, std::size_t c, double v, std::vector<Block2x2>& bs) {
        Block2x2& p = bs[(r / 2) * half_ + c / 2];
        (r % 2 ? (c % 2 ? p.d : p.c) : (c % 2 ? p.b : p.a)) = v;
    }

    // In-place application of the interchange to one line of K values,
    // descending through the even slots then returning through the odd ones;
    // a single held value closes the cycle.
    template <typename Get, typename Set>
    void apply_line(Get&& get, Set&& set) const {
        const std::size_t k = k_;
        if (k < 4) return;
        const double held = get(k - 1);
        set(k - 1, get(k - 2));
        for (std::size_t c = k - 2; c >= 4; c -= 2) set(c, get(c - 2));
        set(2, get(1));
        for (std::size_t c = 1; c + 2 <= k - 3; c += 2) set(c, get(c + 2));
        set(k - 3, held);
    }

    std::vector<double> assemble(const std::vector<Block2x2>& bs) const {
        std::vector<double> out(k_ * k_);
        for (std::size_t i = 0; i < half_; ++i)
            for (std::size_t j = 0; j < half_; ++j) {
                const Block2x2& p = bs[i * half_ + j];
                out[(2 * i) * k_ + 2 * j] = p.a;
                out[(2 * i) * k_ + 2 * j + 1] = p.b;
                out[(2 * i + 1) * k_ + 2 * j] = p.c;
                out[(2 * i + 1) * k_ + 2 * j + 1] = p.d;
            }
        return out;
    }

    std::size_t k_;
    std::size_t half_;
    TrigMode trig_;
    std::vector<Block2x2> blocks_;
    std::vector<Block2x2> eig_blocks_;
    std::size_t rounds_ = 0;
};

struct JacobiResult {
    std::vector<double> eigenvalues;                // unsorted (grid order)
    std::vector<std::vector<double>> eigenvectors;  // eigenvectors[l] pairs eigenvalues[l]
    std::size_t sweeps = 0;                         // full tournaments (K-1 rounds each)
    bool converged = false;
};

inline double default_jacobi_tol(TrigMode trig) {
    return trig == TrigMode::Exact ? 1e-10 : 1e-6;
}

inline std::size_t default_max_sweeps(std::size_t k) {
    std::size_t lg = 0;
    while ((std::size_t{1} << lg) < k) ++lg;
    return 30 * std::max<std::size_t>(lg, 1) + 10;
}

namespace detail {

inline std::vector<double> tridiagonal_to_dense(const std::vector<double>& alpha,
                                                const std::vector<double>& beta,
                                                std::size_t k_padded) {
    std::vector<double> dense(k_padded * k_padded, 0.0);
    for (std::size_t i = 0; i < alpha.size(); ++i) dense[i * k_padded + i] = alpha[i];
    for (std::size_t i = 0; i < beta.size(); ++i) {
        dense[i * k_padded + i + 1] = beta[i];
        dense[(i + 1) * k_padded + i] = beta[i];
    }
    return dense;
}

}  // namespace detail

// Full systolic eigensolve of a symmetric tridiagonal matrix given as
// (alpha, beta). Odd K is padded to K+1 with a zero row/column; the padded
// problem block-decouples, so the extra exact pair (0, e_{K+1}) is identified
// by its unit support on the padded coordinate and dropped.
inline JacobiResult jacobi_eigen_tridiagonal(const std::vector<double>& alpha,
                                             const std::vector<double>& beta, TrigMode trig,
                                             double tol = 0.0, std::size_t max_sweeps = 0) {
    const std::size_t k = alpha.size();
    if (k == 0) throw std::invalid_argument("jacobi_eigen: empty input");
    if (beta.size() + 1 != k) throw std::invalid_argument("jacobi_eigen: beta size mismatch");
    if (tol == 0.0) tol = default_jacobi_tol(trig);
    if (tol <= 0.0) throw std::invalid_argument("jacobi_eigen: tol must be positive");
    if (max_sweeps == 0) max_sweeps = default_max_sweeps(k);

    const bool padded = k % 2 != 0;
    const std::size_t kp = padded ? k + 1 : k;
    SystolicGrid grid(detail::tridiagonal_to_dense(alpha, beta, kp), kp, trig);

    const std::size_t rounds_per_sweep = std::max<std::size_t>(kp - 1, 1);
    JacobiResult res;
    const double norm = grid.frobenius_norm();
    if (norm == 0.0 || grid.off_norm() <= tol * norm) {
        res.converged = true;
    } else {
        for (std::size_t sweep = 0; sweep < max_sweeps && !res.converged; ++sweep) {
            ++res.sweeps;
            for (std::size_t r = 0; r < rounds_per_sweep; ++r) {
                grid.step();
                if (grid.off_norm() <= tol * grid.frobenius_norm()) {
                    res.converged = true;
                    break;
                }
            }
        }
    }

    const auto dense = grid.reassemble();
    const auto vecs = grid.reassemble_eigenvectors();
    std::vector<double> eigenvalues(kp);
    std::vector<std::vector<double>> eigenvectors(kp, std::vector<double>(kp));
    for (std::size_t l = 0; l < kp; ++l) {
        eigenvalues[l] = dense[l * kp + l];
        for (std::size_t r = 0; r < kp; ++r) eigenvectors[l][r] = vecs[r * kp + l];
    }

    if (padded) {
        // Drop the pair carried by the padding coordinate.
        std::size_t drop = 0;
        double best = -1.0;
        for (std::size_t l = 0; l < kp; ++l) {
            const double w = std::abs(eigenvectors[l][kp - 1]);
            if (w > best) {
                best = w;
                drop = l;
            }
        }
        std::vector<double> ev;
        std::vector<std::vector<double>> evec;
        for (std::size_t l = 0; l < kp; ++l) {
            if (l == drop) continue;
            ev.push_back(eigenvalues[l]);
            auto v = eigenvectors[l];
            v.resize(k);
            double norm2 = 0.0;
            for (double x : v) norm2 += x * x;
            if (norm2 > 0.0) {
                const double inv = 1.0 / std::sqrt(norm2);
                for (double& x : v) x *= inv;
            }
            evec.push_back(std::move(v));
        }
        eigenvalues = std::move(ev);
        eigenvectors = std::move(evec);
    }

    res.eigenvalues = std::move(eigenvalues);
    res.eigenvectors = std::move(eigenvectors);
    return res;
}

}  // namespace topk
