#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include "pgaslab/layout.hpp"

namespace pgaslab {

using DenseVector = std::vector<double>;

/// Modified EllPack storage: the matrix is split as M = D + A with a dense
/// diagonal D (length n) and exactly r_nz off-diagonal slots per row held in
/// row-major value/column arrays A and J. A padded slot carries A = 0.0 and
/// J = its own row index, so padding never reaches another thread's data.
struct EllPackMatrix {
    index_t n = 0;
    int r_nz = 0;
    std::vector<double> diag;          // n
    std::vector<double> values;        // n * r_nz
    std::vector<std::int32_t> cols;    // n * r_nz

    index_t slot(index_t row, int j) const { return row * r_nz + j; }

    bool is_padding(index_t row, int j) const {
        return cols[slot(row, j)] == static_cast<std::int32_t>(row);
    }

    void validate() const {
        if (n < 1 || r_nz < 0)
            throw std::invalid_argument("EllPackMatrix: bad dimensions");
        if (static_cast<index_t>(diag.size()) != n ||
            static_cast<index_t>(values.size()) != n * r_nz ||
            static_cast<index_t>(cols.size()) != n * r_nz)
            throw std::invalid_argument("EllPackMatrix: array lengths inconsistent");
        for (std::int32_t c : cols)
            if (c < 0 || static_cast<index_t>(c) >= n)
                throw std::invalid_argument("EllPackMatrix: column index out of range");
    }
};

/// y[i] = D[i]*x[i] + sum_j A[i*r_nz+j]*x[J[i*r_nz+j]], ascending j. Every
/// parallel strategy reproduces this accumulation order bit for bit.
inline DenseVector spmv_reference(const EllPackMatrix& m, const DenseVector& x) {
    if (static_cast<index_t>(x.size()) != m.n)
        throw std::invalid_argument("spmv_reference: x length does not match matrix");
    DenseVector y(m.n);
    for (index_t i = 0; i < m.n; ++i) {
        double tmp = 0.0;
        for (int j = 0; j < m.r_nz; ++j)
            tmp += m.values[i * m.r_nz + j] * x[m.cols[i * m.r_nz + j]];
        y[i] = m.diag[i] * x[i] + tmp;
    }
    return y;
}

struct Triplet {
    index_t row;
    index_t col;
    double value;
};

/// Build a modified EllPack matrix from coordinate entries. Diagonal entries
/// go to D; each row may carry at most r_nz off-diagonal entries, the rest of
/// the row is padded. A missing diagonal leaves D[i] = 0.
inline EllPackMatrix from_triplets(index_t n, int r_nz, const std::vector<Triplet>& entries) {
    if (n < 1 || r_nz < 0)
        throw std::invalid_argument("from_triplets: bad dimensions");
    EllPackMatrix m;
    m.n = n;
    m.r_nz = r_nz;
    m.diag.assign(n, 0.0);
    m.values.assign(n * r_nz, 0.0);
    m.cols.assign(n * r_nz, 0);
    std::vector<int> fill(n, 0);
    for (const Triplet& e : entries) {
        if (e.row < 0 || e.row >= n || e.col < 0 || e.col >= n)
            throw std::invalid_argument("from_triplets: entry index out of range");
        if (e.row == e.col) {
            m.diag[e.row] += e.value;
            continue;
        }
        if (fill[e.row] == r_nz)
            throw std::length_error("from_triplets: row " + std::to_string(e.row) +
                                    " has more than " + std::to_string(r_nz) +
                                    " off-diagonal entries");
        const index_t s = m.slot(e.row, fill[e.row]++);
        m.values[s] = e.value;
        m.cols[s] = static_cast<std::int32_t>(e.col);
    }
    for (index_t i = 0; i < n; ++i)
        for (int j = fill[i]; j < r_nz; ++j)
            m.cols[m.slot(i, j)] = static_cast<std::int32_t>(i);  // padding
    return m;
}

/// Random banded matrix: each row draws r_nz distinct off-diagonal columns
/// within `bandwidth` of the row index (clamped at the edges, padded where the
/// window is too small). Deterministic for a fixed seed.
inline EllPackMatrix generate_banded(index_t n, int r_nz, index_t bandwidth, std::uint64_t seed) {
    if (n <= r_nz)
        throw std::invalid_argument("generate_banded: need n > r_nz");
    if (r_nz < 0 || bandwidth < 0)
        throw std::invalid_argument("generate_banded: bad parameters");
    EllPackMatrix m;
    m.n = n;
    m.r_nz = r_nz;
    m.diag.resize(n);
    m.values.assign(n * r_nz, 0.0);
    m.cols.assign(n * r_nz, 0);

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> val(-1.0, 1.0);
    std::uniform_real_distribution<double> dval(1.0, 2.0);
    std::vector<index_t> picked;
    for (index_t i = 0; i < n; ++i) {
        m.diag[i] = dval(rng);
        const index_t lo = std::max<index_t>(0, i - bandwidth);
        const index_t hi = std::min<index_t>(n - 1, i + bandwidth);
        const index_t window = hi - lo + 1 - 1;  // window excludes i itself
        const int want = static_cast<int>(std::min<index_t>(r_nz, window));
        picked.clear();
        if (window <= 2 * static_cast<index_t>(r_nz)) {
            for (index_t c = lo; c <= hi; ++c)
                if (c != i) picked.push_back(c);
            std::shuffle(picked.begin(), picked.end(), rng);
            picked.resize(want);
        } else {
            std::unordered_set<index_t> seen;
            std::uniform_int_distribution<index_t> col(lo, hi);
            while (static_cast<int>(picked.size()) < want) {
                const index_t c = col(rng);
                if (c == i || !seen.insert(c).second) continue;
                picked.push_back(c);
            }
        }
        std::sort(picked.begin(), picked.end());
        int j = 0;
        for (index_t c : picked) {
            const index_t s = m.slot(i, j++);
            m.cols[s] = static_cast<std::int32_t>(c);
            m.values[s] = val(rng);
        }
        for (; j < r_nz; ++j)
            m.cols[m.slot(i, j)] = static_cast<std::int32_t>(i);  // padding
    }
    return m;
}

}  // namespace pgaslab
