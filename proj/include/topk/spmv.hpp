// Streaming SpMV over partitioned COO packets, reproducing the hardware
// pipeline as a deterministic software dataflow: each CU walks its packets in
// order, sums same-row entries inside a packet first (Aggregation Unit), then
// folds the packet sum into the row accumulator; partial vectors are merged
// by concatenation since partitions are row-disjoint.

#pragma once

#include <algorithm>
#include <cstdint>
#include <thread>
#include <vector>

#include "topk/arith.hpp"
#include "topk/coo.hpp"

namespace topk {

struct PartialResult {
    std::size_t cu_id = 0;
    std::size_t row_begin = 0;
    std::size_t row_end = 0;
    std::vector<double> values;  // one value per row in [row_begin, row_end)
};

inline PartialResult spmv_cu(const RowPartition& p, const std::vector<double>& x,
                             const ArithMode& mode = ArithMode::f64(),
                             std::uint64_t* saturations = nullptr) {
    PartialResult out{p.cu_id, p.row_begin, p.row_end,
                      std::vector<double>(p.row_end - p.row_begin, 0.0)};
    for (const auto& packet : p.packets) {
        std::size_t i = 0;
        while (i < packet.count) {
            const std::size_t row = packet.entries[i].row;
            // In-packet aggregation: entries sharing a row are summed before
            // touching the accumulator.
            double agg = arith::mul(packet.entries[i].value, x[packet.entries[i].col], mode,
                                    saturations);
            for (++i; i < packet.count && packet.entries[i].row == row; ++i)
                agg = arith::add(
                    agg,
                    arith::mul(packet.entries[i].value, x[packet.entries[i].col], mode, saturations),
                    mode, saturations);
            double& acc = out.values[row - p.row_begin];
            acc = arith::add(acc, agg, mode, saturations);
        }
    }
    return out;
}

// Concatenates row-disjoint partial results into one dense vector. Input
// order does not matter; coverage of [0, n) must be exact.
inline std::vector<double> merge(std::vector<PartialResult> partials) {
    if (partials.empty()) throw std::invalid_argument("merge: no partial results");
    std::sort(partials.begin(), partials.end(),
              [](const PartialResult& a, const PartialResult& b) {
                  return a.row_begin < b.row_begin;
              });
    if (partials.front().row_begin != 0)
        throw std::invalid_argument("merge: partitions do not start at row 0");
    std::vector<double> out;
    std::size_t next = 0;
    for (const auto& p : partials) {
        if (p.row_begin != next || p.values.size() != p.row_end - p.row_begin)
            throw std::invalid_argument("merge: partitions overlap or leave gaps");
        out.insert(out.end(), p.values.begin(), p.values.end());
        next = p.row_end;
    }
    return out;
}

// Runs every CU (optionally on `threads` workers) and merges. Results are
// identical to the sequential order for any thread count: partitions are
// row-disjoint, so per-row accumulation order never changes.
inline std::vector<double> spmv(const std::vector<RowPartition>& partitions, std::size_t n,
                                const std::vector<double>& x,
                                const ArithMode& mode = ArithMode::f64(),
                                std::uint64_t* saturations = nullptr, unsigned threads = 1) {
    if (x.size() != n) throw std::invalid_argument("spmv: dimension mismatch");
    std::vector<PartialResult> partials(partitions.size());
    if (threads <= 1 || partitions.size() <= 1 || saturations != nullptr) {
        for (std::size_t c = 0; c < partitions.size(); ++c)
            partials[c] = spmv_cu(partitions[c], x, mode, saturations);
    } else {
        const unsigned workers = std::min<unsigned>(threads, partitions.size());
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back([&, w] {
                for (std::size_t c = w; c < partitions.size(); c += workers)
                    partials[c] = spmv_cu(partitions[c], x, mode, nullptr);
            });
        for (auto& t : pool) t.join();
    }
    auto out = merge(std::move(partials));
    if (out.size() != n) throw std::invalid_argument("spmv: partitions do not cover [0, n)");
    return out;
}

inline std::vector<double> spmv(const CooMatrix& m, const std::vector<double>& x,
                                std::size_t num_cus = 1,
                                const ArithMode& mode = ArithMode::f64(),
                                std::uint64_t* saturations = nullptr, unsigned threads = 1) {
    return spmv(partition(m, num_cus), m.n(), x, mode, saturations, threads);
}

}  // namespace topk
