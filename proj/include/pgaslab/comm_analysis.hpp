#pragma once

#include <cstdint>
#include <ostream>
#include <set>
#include <vector>

#include "pgaslab/ellpack.hpp"
#include "pgaslab/layout.hpp"

namespace pgaslab {

/// Statically computed per-thread communication quantities. Occurrence counts
/// (c_*) carry multiplicity; message sizes (s_*) count unique values.
struct ThreadCommStats {
    std::uint64_t c_local_indv = 0;
    std::uint64_t c_remote_indv = 0;
    std::uint64_t b_local = 0;
    std::uint64_t b_remote = 0;
    std::uint64_t b_local_bytes = 0;   // actual block lengths, element-sized
    std::uint64_t b_remote_bytes = 0;
    std::uint64_t s_local_out = 0;
    std::uint64_t s_remote_out = 0;
    std::uint64_t s_local_in = 0;
    std::uint64_t s_remote_in = 0;
    std::uint64_t c_remote_out = 0;

    bool operator==(const ThreadCommStats&) const = default;
};

enum class StatsKind { v1, v2, v3 };

struct CommStats {
    StatsKind kind = StatsKind::v1;
    std::vector<ThreadCommStats> threads;
};

/// Occurrences (with multiplicity) of indirect x accesses whose owner is a
/// different thread, split by node locality. Padded slots point at the own
/// row and can never count.
inline CommStats analyze_v1(const EllPackMatrix& m, const BlockCyclicLayout& layout,
                            const Topology& topo) {
    CommStats stats{StatsKind::v1, std::vector<ThreadCommStats>(topo.total_threads)};
    for (index_t i = 0; i < m.n; ++i) {
        const int t = owner_thread(i, layout, topo);
        for (int j = 0; j < m.r_nz; ++j) {
            const int owner = owner_thread(m.cols[i * m.r_nz + j], layout, topo);
            if (owner == t) continue;
            if (topo.same_node(owner, t))
                ++stats.threads[t].c_local_indv;
            else
                ++stats.threads[t].c_remote_indv;
        }
    }
    return stats;
}

/// Needed-block counts per thread (own blocks included), split by the node of
/// the block's owner.
inline CommStats analyze_v2(const EllPackMatrix& m, const BlockCyclicLayout& layout,
                            const Topology& topo) {
    CommStats stats{StatsKind::v2, std::vector<ThreadCommStats>(topo.total_threads)};
    std::vector<char> needed(layout.nblks);
    for (int t = 0; t < topo.total_threads; ++t) {
        std::fill(needed.begin(), needed.end(), 0);
        const index_t myblocks = blocks_of_thread(t, layout, topo);
        for (index_t mb = 0; mb < myblocks; ++mb) {
            const index_t b = thread_block(t, mb, topo);
            needed[b] = 1;
            const auto [offset, len] = layout.block_range(b);
            for (index_t k = 0; k < len; ++k)
                for (int j = 0; j < m.r_nz; ++j)
                    needed[layout.block_of(m.cols[(offset + k) * m.r_nz + j])] = 1;
        }
        for (index_t b = 0; b < layout.nblks; ++b) {
            if (!needed[b]) continue;
            const int owner = static_cast<int>(b % topo.total_threads);
            const std::uint64_t bytes = layout.block_range(b).second * sizeof(double);
            if (topo.same_node(owner, t)) {
                ++stats.threads[t].b_local;
                stats.threads[t].b_local_bytes += bytes;
            } else {
                ++stats.threads[t].b_remote;
                stats.threads[t].b_remote_bytes += bytes;
            }
        }
    }
    return stats;
}

/// Unique-value message size for every ordered (sender, receiver) pair;
/// receiver-owned indices are excluded.
inline std::vector<std::vector<std::uint64_t>> pair_message_counts(const EllPackMatrix& m,
                                                                   const BlockCyclicLayout& layout,
                                                                   const Topology& topo) {
    const int nt = topo.total_threads;
    std::vector<std::set<index_t>> unique(static_cast<std::size_t>(nt) * nt);
    for (index_t i = 0; i < m.n; ++i) {
        const int receiver = owner_thread(i, layout, topo);
        for (int j = 0; j < m.r_nz; ++j) {
            const index_t col = m.cols[i * m.r_nz + j];
            const int sender = owner_thread(col, layout, topo);
            if (sender == receiver) continue;
            unique[static_cast<std::size_t>(sender) * nt + receiver].insert(col);
        }
    }
    std::vector<std::vector<std::uint64_t>> counts(nt, std::vector<std::uint64_t>(nt, 0));
    for (int s = 0; s < nt; ++s)
        for (int r = 0; r < nt; ++r)
            counts[s][r] = unique[static_cast<std::size_t>(s) * nt + r].size();
    return counts;
}

/// Outgoing/incoming consolidated message volumes per thread, aggregated by
/// the peer's node locality; c_remote_out counts nonempty cross-node messages.
inline CommStats analyze_v3(const EllPackMatrix& m, const BlockCyclicLayout& layout,
                            const Topology& topo) {
    CommStats stats{StatsKind::v3, std::vector<ThreadCommStats>(topo.total_threads)};
    const auto counts = pair_message_counts(m, layout, topo);
    for (int s = 0; s < topo.total_threads; ++s)
        for (int r = 0; r < topo.total_threads; ++r) {
            const std::uint64_t c = counts[s][r];
            if (c == 0) continue;
            if (topo.same_node(s, r)) {
                stats.threads[s].s_local_out += c;
                stats.threads[r].s_local_in += c;
            } else {
                stats.threads[s].s_remote_out += c;
                stats.threads[r].s_remote_in += c;
                ++stats.threads[s].c_remote_out;
            }
        }
    return stats;
}

inline CommStats analyze(StatsKind kind, const EllPackMatrix& m, const BlockCyclicLayout& layout,
                         const Topology& topo) {
    switch (kind) {
        case StatsKind::v1: return analyze_v1(m, layout, topo);
        case StatsKind::v2: return analyze_v2(m, layout, topo);
        case StatsKind::v3: return analyze_v3(m, layout, topo);
    }
    throw std::invalid_argument("unknown stats kind");
}

inline void write_commstats_csv(std::ostream& os, const CommStats& stats) {
    os << "thread,c_local_indv,c_remote_indv,b_local,b_remote,"
          "s_local_out,s_remote_out,s_local_in,s_remote_in,c_remote_out\n";
    for (std::size_t t = 0; t < stats.threads.size(); ++t) {
        const ThreadCommStats& s = stats.threads[t];
        os << t << ',' << s.c_local_indv << ',' << s.c_remote_indv << ',' << s.b_local << ','
           << s.b_remote << ',' << s.s_local_out << ',' << s.s_remote_out << ',' << s.s_local_in
           << ',' << s.s_remote_in << ',' << s.c_remote_out << '\n';
    }
}

}  // namespace pgaslab
