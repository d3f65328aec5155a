// Sparse symmetric matrices in coordinate format, plus the two transforms the
// solver applies before any arithmetic: Frobenius normalization (so values and
// eigencomponents land in (-1, 1)) and row-range partitioning into 5-entry
// packets, one partition per SpMV compute unit.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace topk {

struct CooEntry {
    std::size_t row = 0;
    std::size_t col = 0;
    double value = 0.0;
};

class CooMatrix {
  public:
    // Sorts row-major / column-ascending, sums duplicate (row, col) pairs, and
    // checks bounds and finiteness. Symmetry is validated unless the caller
    // already guarantees it (e.g. after symmetric-header expansion).
    CooMatrix(std::size_t n, std::vector<CooEntry> entries, bool validate_symmetry = true)
        : n_(n), entries_(std::move(entries)) {
        if (n_ == 0) throw std::invalid_argument("CooMatrix: dimension must be positive");
        for (const auto& e : entries_) {
            if (e.row >= n_ || e.col >= n_)
                throw std::out_of_range("CooMatrix: entry index out of range");
            if (!std::isfinite(e.value))
                throw std::invalid_argument("CooMatrix: non-finite entry value");
        }
        std::sort(entries_.begin(), entries_.end(), [](const CooEntry& a, const CooEntry& b) {
            return a.row != b.row ? a.row < b.row : a.col < b.col;
        });
        // Sum duplicates (Matrix Market assembly convention).
        std::size_t out = 0;
        for (std::size_t i = 0; i < entries_.size();) {
            CooEntry acc = entries_[i];
            std::size_t j = i + 1;
            for (; j < entries_.size() && entries_[j].row == acc.row && entries_[j].col == acc.col;
                 ++j)
                acc.value += entries_[j].value;
            entries_[out++] = acc;
            i = j;
        }
        entries_.resize(out);
        if (validate_symmetry) check_symmetry();
        frobenius_norm_ = compute_frobenius();
        original_norm_ = frobenius_norm_;
    }

    std::size_t n() const { return n_; }
    std::size_t nnz() const { return entries_.size(); }
    const std::vector<CooEntry>& entries() const { return entries_; }
    double frobenius_norm() const { return frobenius_norm_; }
    bool normalized() const { return normalized_; }

    // Frobenius norm of the matrix before normalization; equals
    // frobenius_norm() on an unnormalized matrix. Eigenvalues of the
    // normalized matrix are rescaled by this factor on output.
    double original_norm() const { return original_norm_; }

    double value_at(std::size_t row, std::size_t col) const {
        auto it = std::lower_bound(entries_.begin(), entries_.end(), CooEntry{row, col, 0.0},
                                   [](const CooEntry& a, const CooEntry& b) {
                                       return a.row != b.row ? a.row < b.row : a.col < b.col;
                                   });
        if (it != entries_.end() && it->row == row && it->col == col) return it->value;
        return 0.0;
    }

    double max_abs_value() const {
        double m = 0.0;
        for (const auto& e : entries_) m = std::max(m, std::abs(e.value));
        return m;
    }

    friend CooMatrix frobenius_normalize(const CooMatrix& m);

  private:
    void check_symmetry() const {
        for (const auto& e : entries_) {
            if (e.row == e.col) continue;
            if (value_at(e.col, e.row) != e.value)
                throw std::invalid_argument("CooMatrix: matrix is not symmetric");
        }
    }

    double compute_frobenius() const {
        double sum = 0.0;
        for (const auto& e : entries_) sum += e.value * e.value;
        return std::sqrt(sum);
    }

    std::size_t n_;
    std::vector<CooEntry> entries_;
    double frobenius_norm_ = 0.0;
    double original_norm_ = 0.0;
    bool normalized_ = false;
};

// Divides every value by ||M||_F and remembers the original norm. Idempotent
// on unit-norm input up to rounding; errors on an all-zero matrix.
inline CooMatrix frobenius_normalize(const CooMatrix& m) {
    if (m.nnz() == 0 || m.frobenius_norm() == 0.0)
        throw std::invalid_argument("frobenius_normalize: zero matrix has no norm");
    CooMatrix out = m;
    const double inv = 1.0 / m.frobenius_norm();
    for (auto& e : out.entries_) e.value *= inv;
    out.frobenius_norm_ = out.compute_frobenius();
    out.original_norm_ = m.normalized() ? m.original_norm() : m.frobenius_norm();
    out.normalized_ = true;
    return out;
}

// Mirror of the hardware's 512-bit memory word: up to 5 COO entries travel
// together, and in-packet grouping decides accumulation order downstream.
struct CooPacket {
    static constexpr std::size_t capacity = 5;
    std::array<CooEntry, capacity> entries{};
    std::size_t count = 0;  // entries beyond count are padding
};

struct RowPartition {
    std::size_t cu_id = 0;
    std::size_t row_begin = 0;
    std::size_t row_end = 0;  // exclusive
    std::vector<CooPacket> packets;

    std::size_t num_entries() const {
        std::size_t n = 0;
        for (const auto& p : packets) n += p.count;
        return n;
    }
};

enum class PartitionPolicy {
    EqualRows,    // equal row counts per CU (hardware behavior)
    BalancedNnz,  // contiguous row ranges with roughly equal nnz (opt-in)
};

namespace detail {

// Packet boundaries are anchored to the global entry index (memory-word
// alignment), so a partition whose range starts mid-word begins with a short
// packet. Since partition boundaries coincide with row starts, every row's
// entries fall on the same packet splits for any partition count, which makes
// the per-row accumulation order -- and thus the floating-point result --
// invariant to the number of CUs.
inline std::vector<CooPacket> packetize(const std::vector<CooEntry>& entries, std::size_t begin,
                                        std::size_t end) {
    std::vector<CooPacket> packets;
    packets.reserve((end - begin) / CooPacket::capacity + 2);
    for (std::size_t i = begin; i < end;) {
        CooPacket p;
        const std::size_t limit =
            std::min(end, (i / CooPacket::capacity + 1) * CooPacket::capacity);
        for (; i < limit; ++i) p.entries[p.count++] = entries[i];
        packets.push_back(p);
    }
    return packets;
}

}  // namespace detail

inline std::vector<RowPartition> partition(const CooMatrix& m, std::size_t num_cus,
                                           PartitionPolicy policy = PartitionPolicy::EqualRows) {
    const std::size_t n = m.n();
    if (num_cus == 0 || num_cus > n)
        throw std::invalid_argument("partition: num_cus must be in [1, n]");

    // Row boundaries: boundaries[c] .. boundaries[c+1] is CU c's row range.
    std::vector<std::size_t> boundaries(num_cus + 1, 0);
    if (policy == PartitionPolicy::EqualRows) {
        const std::size_t base = n / num_cus, extra = n % num_cus;
        for (std::size_t c = 0; c < num_cus; ++c)
            boundaries[c + 1] = boundaries[c] + base + (c < extra ? 1 : 0);
    } else {
        std::vector<std::size_t> row_nnz(n, 0);
        for (const auto& e : m.entries()) ++row_nnz[e.row];
        const double target = static_cast<double>(m.nnz()) / num_cus;
        std::size_t row = 0;
        double acc = 0.0;
        for (std::size_t c = 0; c < num_cus; ++c) {
            boundaries[c] = row;
            const std::size_t rows_left_for_rest = num_cus - c - 1;
            while (row < n - rows_left_for_rest &&
                   (acc < target * (c + 1) || row == boundaries[c]))
                acc += row_nnz[row++];
        }
        boundaries[num_cus] = n;
        // Keep every partition non-empty in rows.
        for (std::size_t c = 1; c <= num_cus; ++c)
            boundaries[c] = std::max(boundaries[c], boundaries[c - 1] + (c < num_cus ? 1 : 0));
        boundaries[num_cus] = n;
    }

    const auto& entries = m.entries();
    std::vector<RowPartition> parts(num_cus);
    std::size_t pos = 0;
    for (std::size_t c = 0; c < num_cus; ++c) {
        parts[c].cu_id = c;
        parts[c].row_begin = boundaries[c];
        parts[c].row_end = boundaries[c + 1];
        const std::size_t first = pos;
        while (pos < entries.size() && entries[pos].row < parts[c].row_end) ++pos;
        parts[c].packets = detail::packetize(entries, first, pos);
    }
    return parts;
}

}  // namespace topk
