// Matrix Market (.mtx) coordinate-format reader. Handles real / integer /
// pattern fields and general / symmetric qualifiers; 1-based indices are
// converted on load and symmetric headers are expanded to full storage.

#pragma once

#include <cctype>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "topk/coo.hpp"

namespace topk {

namespace detail {

inline std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

}  // namespace detail

// Parses a Matrix Market coordinate file into a CooMatrix. Pattern entries get
// value 1.0; integer values are promoted to real. With `symmetrize` set, the
// matrix is replaced by (M + M^T)/2 before validation; otherwise an
// asymmetric matrix is an error.
inline CooMatrix load_matrix_market(const std::string& path, bool symmetrize = false) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_matrix_market: cannot open " + path);

    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error("load_matrix_market: empty file " + path);

    std::istringstream header(line);
    std::string banner, object, format, field, qualifier;
    header >> banner >> object >> format >> field >> qualifier;
    if (banner != "%%MatrixMarket")
        throw std::runtime_error("load_matrix_market: missing %%MatrixMarket banner");
    object = detail::lower(object);
    format = detail::lower(format);
    field = detail::lower(field);
    qualifier = detail::lower(qualifier);
    if (object != "matrix" || format != "coordinate")
        throw std::runtime_error("load_matrix_market: only coordinate matrices are supported");
    if (field != "real" && field != "integer" && field != "pattern")
        throw std::runtime_error("load_matrix_market: unsupported field type '" + field + "'");
    if (qualifier != "general" && qualifier != "symmetric")
        throw std::runtime_error("load_matrix_market: unsupported qualifier '" + qualifier + "'");
    const bool pattern = field == "pattern";
    const bool symmetric_header = qualifier == "symmetric";

    // Skip comments, read the size line.
    std::size_t rows = 0, cols = 0, declared_nnz = 0;
    for (;;) {
        if (!std::getline(in, line))
            throw std::runtime_error("load_matrix_market: missing size line");
        if (line.empty() || line[0] == '%') continue;
        std::istringstream sz(line);
        if (!(sz >> rows >> cols >> declared_nnz))
            throw std::runtime_error("load_matrix_market: malformed size line");
        break;
    }
    if (rows != cols)
        throw std::runtime_error("load_matrix_market: matrix is not square");

    std::vector<CooEntry> entries;
    entries.reserve(symmetric_header ? 2 * declared_nnz : declared_nnz);
    std::size_t seen = 0;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '%') continue;
        std::istringstream es(line);
        long long r1 = 0, c1 = 0;
        double v = 1.0;
        if (!(es >> r1 >> c1) || (!pattern && !(es >> v)))
            throw std::runtime_error("load_matrix_market: malformed entry line: " + line);
        if (r1 < 1 || c1 < 1 || static_cast<std::size_t>(r1) > rows ||
            static_cast<std::size_t>(c1) > cols)
            throw std::out_of_range("load_matrix_market: entry index out of range: " + line);
        const std::size_t r = static_cast<std::size_t>(r1) - 1;
        const std::size_t c = static_cast<std::size_t>(c1) - 1;
        entries.push_back({r, c, v});
        if (symmetric_header && r != c) entries.push_back({c, r, v});
        ++seen;
    }
    if (seen != declared_nnz)
        throw std::runtime_error("load_matrix_market: entry count does not match header");

    if (symmetrize) {
        // M <- (M + M^T)/2 entrywise: emit half weight both ways, then the
        // CooMatrix constructor sums duplicates.
        std::vector<CooEntry> sym;
        sym.reserve(2 * entries.size());
        for (const auto& e : entries) {
            sym.push_back({e.row, e.col, 0.5 * e.value});
            sym.push_back({e.col, e.row, 0.5 * e.value});
        }
        entries = std::move(sym);
    }

    const bool validate = !(symmetric_header || symmetrize);
    return CooMatrix(rows, std::move(entries), validate);
}

}  // namespace topk
