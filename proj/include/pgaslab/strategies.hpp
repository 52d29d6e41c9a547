#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "pgaslab/ellpack.hpp"
#include "pgaslab/layout.hpp"
#include "pgaslab/runtime.hpp"

namespace pgaslab {

enum class Strategy { naive, v1, v2, v3 };

inline const char* strategy_name(Strategy s) {
    switch (s) {
        case Strategy::naive: return "naive";
        case Strategy::v1: return "v1";
        case Strategy::v2: return "v2";
        case Strategy::v3: return "v3";
    }
    return "?";
}

struct StrategyResult {
    DenseVector y;
    std::vector<TrafficLedger> ledgers;
};

namespace detail {

inline void check_spmv_args(const EllPackMatrix& m, const DenseVector& x,
                            const BlockCyclicLayout& layout) {
    if (layout.n != m.n)
        throw std::invalid_argument("strategy: layout n does not match matrix");
    if (static_cast<index_t>(x.size()) != m.n)
        throw std::invalid_argument("strategy: x length does not match matrix");
}

/// A/J use r_nz*BLOCKSIZE blocks so their distribution lines up with x/y/D.
inline BlockCyclicLayout coeff_layout(const EllPackMatrix& m, const BlockCyclicLayout& layout) {
    if (m.r_nz == 0) return BlockCyclicLayout(1, 1);  // unused placeholder
    return BlockCyclicLayout(m.n * m.r_nz, layout.blocksize * m.r_nz);
}

struct SharedSpmvArrays {
    SharedArray<double> x, y, diag, values;
    SharedArray<std::int32_t> cols;

    SharedSpmvArrays(const EllPackMatrix& m, const DenseVector& x0,
                     const BlockCyclicLayout& layout, const Topology& topo)
        : x(layout, topo),
          y(layout, topo),
          diag(layout, topo),
          values(coeff_layout(m, layout), topo),
          cols(coeff_layout(m, layout), topo) {
        x.fill_from(x0);
        diag.fill_from(m.diag);
        if (m.r_nz > 0) {
            values.fill_from(m.values);
            cols.fill_from(m.cols);
        }
    }
};

}  // namespace detail

/// upc_forall-style execution: every thread scans all n iterations, keeps the
/// ones whose y[i] it owns, and touches all five arrays through shared access.
/// The affinity scan itself is not ledgered.
inline StrategyResult run_naive(const EllPackMatrix& m, const DenseVector& x,
                                const BlockCyclicLayout& layout, const Topology& topo) {
    detail::check_spmv_args(m, x, layout);
    detail::SharedSpmvArrays arrays(m, x, layout, topo);
    PgasRuntime rt(topo);
    rt.run([&](ThreadCtx& ctx) {
        for (index_t i = 0; i < m.n; ++i) {
            if (owner_thread(i, layout, topo) != ctx.tid) continue;
            double tmp = 0.0;
            for (int j = 0; j < m.r_nz; ++j) {
                const index_t s = i * m.r_nz + j;
                const std::int32_t col = arrays.cols.get_element(ctx, s);
                tmp += arrays.values.get_element(ctx, s) * arrays.x.get_element(ctx, col);
            }
            arrays.y.set_element(ctx, i,
                                 arrays.diag.get_element(ctx, i) * arrays.x.get_element(ctx, i) + tmp);
        }
        ctx.barrier();
    });
    return {arrays.y.to_vector(), rt.ledgers()};
}

/// Explicit thread privatization: each thread walks only its own blocks and
/// reaches y/D/A/J through local pointers; only the indirect x accesses can
/// generate non-private traffic.
inline StrategyResult run_v1(const EllPackMatrix& m, const DenseVector& x,
                             const BlockCyclicLayout& layout, const Topology& topo) {
    detail::check_spmv_args(m, x, layout);
    detail::SharedSpmvArrays arrays(m, x, layout, topo);
    PgasRuntime rt(topo);
    rt.run([&](ThreadCtx& ctx) {
        const int t = ctx.tid;
        auto loc_y = arrays.y.local_region(t);
        auto loc_d = arrays.diag.local_region(t);
        auto loc_a = arrays.values.local_region(t);
        auto loc_j = arrays.cols.local_region(t);
        const index_t myblocks = blocks_of_thread(t, layout, topo);
        for (index_t mb = 0; mb < myblocks; ++mb) {
            const auto [offset, len] = layout.block_range(thread_block(t, mb, topo));
            const index_t lbase = mb * layout.blocksize;
            for (index_t k = 0; k < len; ++k) {
                double tmp = 0.0;
                for (int j = 0; j < m.r_nz; ++j) {
                    const std::int32_t col = loc_j[(lbase + k) * m.r_nz + j];
                    tmp += loc_a[(lbase + k) * m.r_nz + j] * arrays.x.get_element(ctx, col);
                }
                // x[offset+k] is owner-affine by construction
                loc_y[lbase + k] = loc_d[lbase + k] * arrays.x.get_element(ctx, offset + k) + tmp;
            }
        }
        ctx.barrier();
    });
    return {arrays.y.to_vector(), rt.ledgers()};
}

namespace detail {

/// Blocks of x holding any value this thread dereferences, own blocks included.
inline std::vector<char> screen_needed_blocks(const EllPackMatrix& m,
                                              const BlockCyclicLayout& layout,
                                              const Topology& topo, int t) {
    std::vector<char> needed(layout.nblks, 0);
    const index_t myblocks = blocks_of_thread(t, layout, topo);
    for (index_t mb = 0; mb < myblocks; ++mb) {
        const index_t b = thread_block(t, mb, topo);
        needed[b] = 1;  // the diagonal term reads x[offset+k]
        const auto [offset, len] = layout.block_range(b);
        for (index_t k = 0; k < len; ++k)
            for (int j = 0; j < m.r_nz; ++j)
                needed[layout.block_of(m.cols[(offset + k) * m.r_nz + j])] = 1;
    }
    return needed;
}

}  // namespace detail

/// Block-wise communication: every needed block of x is transported in its
/// entirety into a private full-length copy before computing.
inline StrategyResult run_v2(const EllPackMatrix& m, const DenseVector& x,
                             const BlockCyclicLayout& layout, const Topology& topo) {
    detail::check_spmv_args(m, x, layout);
    detail::SharedSpmvArrays arrays(m, x, layout, topo);
    PgasRuntime rt(topo);
    rt.run([&](ThreadCtx& ctx) {
        const int t = ctx.tid;
        const std::vector<char> needed = detail::screen_needed_blocks(m, layout, topo, t);
        DenseVector x_copy(m.n);
        for (index_t b = 0; b < layout.nblks; ++b) {
            if (!needed[b]) continue;
            const auto [start, len] = layout.block_range(b);
            arrays.x.get_block(ctx, start, len, x_copy.data() + start);
        }
        auto loc_y = arrays.y.local_region(t);
        auto loc_d = arrays.diag.local_region(t);
        auto loc_a = arrays.values.local_region(t);
        auto loc_j = arrays.cols.local_region(t);
        const index_t myblocks = blocks_of_thread(t, layout, topo);
        for (index_t mb = 0; mb < myblocks; ++mb) {
            const auto [offset, len] = layout.block_range(thread_block(t, mb, topo));
            const index_t lbase = mb * layout.blocksize;
            for (index_t k = 0; k < len; ++k) {
                double tmp = 0.0;
                for (int j = 0; j < m.r_nz; ++j)
                    tmp += loc_a[(lbase + k) * m.r_nz + j] * x_copy[loc_j[(lbase + k) * m.r_nz + j]];
                loc_y[lbase + k] = loc_d[lbase + k] * x_copy[offset + k] + tmp;
            }
        }
        ctx.barrier();
    });
    return {arrays.y.to_vector(), rt.ledgers()};
}

/// One message per communicating pair. pair_indices[sender][receiver] holds
/// the sorted unique global x indices owned by the sender and dereferenced by
/// the receiver; indices the receiver owns itself are excluded (the receiver
/// copies its own blocks directly).
struct CommPlan {
    index_t n = 0;
    int r_nz = 0;
    index_t blocksize = 0;
    int total_threads = 0;
    std::uint64_t pattern_hash = 0;
    std::vector<std::vector<std::vector<index_t>>> pair_indices;  // [sender][receiver]

    index_t message_size(int sender, int receiver) const {
        return static_cast<index_t>(pair_indices[sender][receiver].size());
    }
};

namespace detail {

inline std::uint64_t pattern_hash(const EllPackMatrix& m) {
    std::uint64_t h = 14695981039346656037ull;  // FNV-1a over the column array
    auto mix = [&h](std::uint64_t v) {
        h ^= v;
        h *= 1099511628211ull;
    };
    mix(static_cast<std::uint64_t>(m.n));
    mix(static_cast<std::uint64_t>(m.r_nz));
    for (std::int32_t c : m.cols) mix(static_cast<std::uint64_t>(static_cast<std::uint32_t>(c)));
    return h;
}

}  // namespace detail

inline CommPlan build_comm_plan(const EllPackMatrix& m, const BlockCyclicLayout& layout,
                                const Topology& topo) {
    if (layout.n != m.n)
        throw std::invalid_argument("build_comm_plan: layout n does not match matrix");
    const int nt = topo.total_threads;
    CommPlan plan;
    plan.n = m.n;
    plan.r_nz = m.r_nz;
    plan.blocksize = layout.blocksize;
    plan.total_threads = nt;
    plan.pattern_hash = detail::pattern_hash(m);
    plan.pair_indices.assign(nt, std::vector<std::vector<index_t>>(nt));

    for (index_t i = 0; i < m.n; ++i) {
        const int receiver = owner_thread(i, layout, topo);
        for (int j = 0; j < m.r_nz; ++j) {
            const index_t col = m.cols[i * m.r_nz + j];
            const int sender = owner_thread(col, layout, topo);
            if (sender == receiver) continue;
            plan.pair_indices[sender][receiver].push_back(col);
        }
    }
    for (int s = 0; s < nt; ++s)
        for (int r = 0; r < nt; ++r) {
            auto& list = plan.pair_indices[s][r];
            std::sort(list.begin(), list.end());
            list.erase(std::unique(list.begin(), list.end()), list.end());
        }
    return plan;
}

/// Message condensing and consolidation: pack, one put per communicating
/// pair, barrier, own-block copy, unpack, compute.
inline StrategyResult run_v3(const EllPackMatrix& m, const DenseVector& x,
                             const BlockCyclicLayout& layout, const Topology& topo,
                             const CommPlan& plan) {
    detail::check_spmv_args(m, x, layout);
    if (plan.n != m.n || plan.r_nz != m.r_nz || plan.blocksize != layout.blocksize ||
        plan.total_threads != topo.total_threads || plan.pattern_hash != detail::pattern_hash(m))
        throw ContractError("run_v3: plan is stale for this matrix/layout/topology");

    detail::SharedSpmvArrays arrays(m, x, layout, topo);
    const int nt = topo.total_threads;

    // Landing buffers with receiver affinity, one per communicating pair.
    std::vector<std::vector<std::unique_ptr<AffinityRegion<double>>>> recv(nt);
    for (int r = 0; r < nt; ++r) {
        recv[r].resize(nt);
        for (int s = 0; s < nt; ++s) {
            const index_t len = plan.message_size(s, r);
            if (len > 0) recv[r][s] = std::make_unique<AffinityRegion<double>>(r, len);
        }
    }

    PgasRuntime rt(topo);
    rt.run([&](ThreadCtx& ctx) {
        const int t = ctx.tid;
        auto loc_x = arrays.x.local_region(t);
        // pack + put one message per receiving peer
        std::vector<double> send_buffer;
        for (int r = 0; r < nt; ++r) {
            const auto& list = plan.pair_indices[t][r];
            if (list.empty()) continue;
            send_buffer.resize(list.size());
            for (std::size_t k = 0; k < list.size(); ++k)
                send_buffer[k] = loc_x[arrays.x.local_offset(list[k])];
            recv[r][t]->put_block(ctx, send_buffer.data(),
                                  static_cast<index_t>(send_buffer.size()));
        }
        ctx.barrier();

        DenseVector x_copy(m.n);
        const index_t myblocks = blocks_of_thread(t, layout, topo);
        for (index_t mb = 0; mb < myblocks; ++mb) {
            const auto [offset, len] = layout.block_range(thread_block(t, mb, topo));
            arrays.x.get_block(ctx, offset, len, x_copy.data() + offset);
        }
        for (int s = 0; s < nt; ++s) {
            const auto& list = plan.pair_indices[s][t];
            if (list.empty()) continue;
            auto buf = recv[t][s]->local_data(ctx);
            for (std::size_t k = 0; k < list.size(); ++k) x_copy[list[k]] = buf[k];
        }

        auto loc_y = arrays.y.local_region(t);
        auto loc_d = arrays.diag.local_region(t);
        auto loc_a = arrays.values.local_region(t);
        auto loc_j = arrays.cols.local_region(t);
        for (index_t mb = 0; mb < myblocks; ++mb) {
            const auto [offset, len] = layout.block_range(thread_block(t, mb, topo));
            const index_t lbase = mb * layout.blocksize;
            for (index_t k = 0; k < len; ++k) {
                double tmp = 0.0;
                for (int j = 0; j < m.r_nz; ++j)
                    tmp += loc_a[(lbase + k) * m.r_nz + j] * x_copy[loc_j[(lbase + k) * m.r_nz + j]];
                loc_y[lbase + k] = loc_d[lbase + k] * x_copy[offset + k] + tmp;
            }
        }
        ctx.barrier();
    });
    return {arrays.y.to_vector(), rt.ledgers()};
}

inline StrategyResult run_strategy(Strategy s, const EllPackMatrix& m, const DenseVector& x,
                                   const BlockCyclicLayout& layout, const Topology& topo) {
    switch (s) {
        case Strategy::naive: return run_naive(m, x, layout, topo);
        case Strategy::v1: return run_v1(m, x, layout, topo);
        case Strategy::v2: return run_v2(m, x, layout, topo);
        case Strategy::v3: return run_v3(m, x, layout, topo, build_comm_plan(m, layout, topo));
    }
    throw std::invalid_argument("unknown strategy");
}

/// v^l = M v^{l-1}, `steps` times; ledgers accumulate across steps when
/// `accumulated` is given.
inline DenseVector iterate(const EllPackMatrix& m, const DenseVector& x0, index_t steps,
                           Strategy s, const BlockCyclicLayout& layout, const Topology& topo,
                           std::vector<TrafficLedger>* accumulated = nullptr) {
    if (steps < 0) throw std::invalid_argument("iterate: steps must be >= 0");
    DenseVector v = x0;
    CommPlan plan;
    if (s == Strategy::v3 && steps > 0) plan = build_comm_plan(m, layout, topo);
    for (index_t step = 0; step < steps; ++step) {
        StrategyResult r = s == Strategy::v3 ? run_v3(m, v, layout, topo, plan)
                                             : run_strategy(s, m, v, layout, topo);
        v = std::move(r.y);
        if (accumulated) {
            accumulated->resize(r.ledgers.size());
            for (std::size_t t = 0; t < r.ledgers.size(); ++t) {
                (*accumulated)[t].local_indv_count += r.ledgers[t].local_indv_count;
                (*accumulated)[t].remote_indv_count += r.ledgers[t].remote_indv_count;
                (*accumulated)[t].local_cntg_bytes += r.ledgers[t].local_cntg_bytes;
                (*accumulated)[t].remote_cntg_bytes += r.ledgers[t].remote_cntg_bytes;
                (*accumulated)[t].remote_message_count += r.ledgers[t].remote_message_count;
            }
        }
    }
    return v;
}

}  // namespace pgaslab
