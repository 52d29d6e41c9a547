#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "pgaslab/ellpack.hpp"

namespace pgaslab {

/// Read a Matrix Market coordinate file into triplets. Supports real,
/// integer and pattern fields; `general` and `symmetric` symmetry (the
/// latter mirrors off-diagonal entries).
inline std::vector<Triplet> read_matrix_market(std::istream& in, index_t& n_out) {
    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error("matrix market: empty file");
    std::istringstream banner(line);
    std::string mm, object, format, field, symmetry;
    banner >> mm >> object >> format >> field >> symmetry;
    if (mm != "%%MatrixMarket" || object != "matrix")
        throw std::runtime_error("matrix market: bad banner: " + line);
    if (format != "coordinate")
        throw std::runtime_error("matrix market: only coordinate format is supported");
    if (field != "real" && field != "integer" && field != "pattern")
        throw std::runtime_error("matrix market: unsupported field: " + field);
    if (symmetry != "general" && symmetry != "symmetric")
        throw std::runtime_error("matrix market: unsupported symmetry: " + symmetry);
    const bool pattern = field == "pattern";
    const bool symmetric = symmetry == "symmetric";

    index_t rows = 0, cols = 0, nnz = 0;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '%') continue;
        std::istringstream sz(line);
        if (!(sz >> rows >> cols >> nnz))
            throw std::runtime_error("matrix market: bad size line: " + line);
        break;
    }
    if (rows != cols)
        throw std::runtime_error("matrix market: matrix must be square");
    n_out = rows;

    std::vector<Triplet> out;
    out.reserve(symmetric ? 2 * nnz : nnz);
    index_t seen = 0;
    while (seen < nnz && std::getline(in, line)) {
        if (line.empty() || line[0] == '%') continue;
        std::istringstream es(line);
        index_t r, c;
        double v = 1.0;
        if (!(es >> r >> c) || (!pattern && !(es >> v)))
            throw std::runtime_error("matrix market: bad entry line: " + line);
        --r;
        --c;  // 1-based file indices
        out.push_back({r, c, v});
        if (symmetric && r != c) out.push_back({c, r, v});
        ++seen;
    }
    if (seen != nnz)
        throw std::runtime_error("matrix market: expected " + std::to_string(nnz) +
                                 " entries, found " + std::to_string(seen));
    return out;
}

/// Max off-diagonal row degree; the default r_nz when none is given.
inline int max_offdiag_degree(index_t n, const std::vector<Triplet>& entries) {
    std::vector<int> deg(n, 0);
    int best = 0;
    for (const Triplet& e : entries)
        if (e.row != e.col) best = std::max(best, ++deg[e.row]);
    return best;
}

inline EllPackMatrix load_matrix_market(const std::string& path, int r_nz_override = -1) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open " + path);
    index_t n = 0;
    const std::vector<Triplet> entries = read_matrix_market(in, n);
    const int r_nz = r_nz_override >= 0 ? r_nz_override : max_offdiag_degree(n, entries);
    return from_triplets(n, r_nz, entries);
}

// Raw binary dump of D/A/J, little-endian host layout.
inline constexpr char kEllpackMagic[8] = {'E', 'L', 'L', 'P', 'A', 'C', 'K', '1'};

inline void save_ellpack(const EllPackMatrix& m, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open " + path + " for writing");
    out.write(kEllpackMagic, sizeof(kEllpackMagic));
    const std::int64_t n = m.n;
    const std::int64_t r = m.r_nz;
    out.write(reinterpret_cast<const char*>(&n), sizeof(n));
    out.write(reinterpret_cast<const char*>(&r), sizeof(r));
    out.write(reinterpret_cast<const char*>(m.diag.data()), m.n * sizeof(double));
    out.write(reinterpret_cast<const char*>(m.values.data()), m.n * m.r_nz * sizeof(double));
    out.write(reinterpret_cast<const char*>(m.cols.data()), m.n * m.r_nz * sizeof(std::int32_t));
    if (!out)
        throw std::runtime_error("write failed: " + path);
}

inline EllPackMatrix load_ellpack(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open " + path);
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kEllpackMagic, sizeof(magic)) != 0)
        throw std::runtime_error(path + ": not an ellpack binary file");
    std::int64_t n = 0, r = 0;
    in.read(reinterpret_cast<char*>(&n), sizeof(n));
    in.read(reinterpret_cast<char*>(&r), sizeof(r));
    if (!in || n < 1 || r < 0)
        throw std::runtime_error(path + ": corrupt header");
    EllPackMatrix m;
    m.n = n;
    m.r_nz = static_cast<int>(r);
    m.diag.resize(n);
    m.values.resize(n * r);
    m.cols.resize(n * r);
    in.read(reinterpret_cast<char*>(m.diag.data()), n * sizeof(double));
    in.read(reinterpret_cast<char*>(m.values.data()), n * r * sizeof(double));
    in.read(reinterpret_cast<char*>(m.cols.data()), n * r * sizeof(std::int32_t));
    if (!in)
        throw std::runtime_error(path + ": truncated file");
    m.validate();
    return m;
}

/// Load by extension: .mtx via Matrix Market, anything else as binary.
inline EllPackMatrix load_matrix(const std::string& path, int r_nz_override = -1) {
    if (path.size() >= 4 && path.compare(path.size() - 4, 4, ".mtx") == 0)
        return load_matrix_market(path, r_nz_override);
    return load_ellpack(path);
}

}  // namespace pgaslab
