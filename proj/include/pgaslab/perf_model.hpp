#pragma once

#include <algorithm>
#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "pgaslab/comm_analysis.hpp"
#include "pgaslab/layout.hpp"
#include "pgaslab/profile.hpp"

namespace pgaslab {

/// Minimum bytes moved between memory and last-level cache per result element:
/// r_nz value/index pairs plus the diagonal load, the x load and the y store.
inline double d_min_comp(int r_nz, const HardwareProfile& p) {
    return r_nz * (p.element_bytes + p.index_bytes) + 3.0 * p.element_bytes;
}

/// Per-thread compute time; partial last blocks are charged as full blocks.
inline double t_comp_thread(int t, const BlockCyclicLayout& layout, const Topology& topo,
                            int r_nz, const HardwareProfile& p) {
    return static_cast<double>(blocks_of_thread(t, layout, topo)) * layout.blocksize *
           d_min_comp(r_nz, p) / p.w_thread_private;
}

inline double t_comm_v1_thread(const ThreadCommStats& s, const HardwareProfile& p) {
    return s.c_local_indv * (p.cacheline_bytes / p.w_thread_private) + s.c_remote_indv * p.tau;
}

/// Intra-node block transfers overlap (max over threads); inter-node ones
/// serialize (sum over threads), each paying the start-up latency.
inline double t_comm_v2_node(int node, const CommStats& stats, const BlockCyclicLayout& layout,
                             const HardwareProfile& p, const Topology& topo) {
    double local_max = 0.0;
    double remote_sum = 0.0;
    for (int t = 0; t < topo.total_threads; ++t) {
        if (topo.node_of(t) != node) continue;
        const ThreadCommStats& s = stats.threads[t];
        local_max = std::max(local_max, s.b_local * 2.0 * layout.blocksize * p.element_bytes /
                                            p.w_thread_private);
        remote_sum += s.b_remote * (p.tau + layout.blocksize * p.element_bytes / p.w_node_remote);
    }
    return local_max + remote_sum;
}

inline double t_pack_thread(const ThreadCommStats& s, const HardwareProfile& p) {
    return (s.s_local_out + s.s_remote_out) * (2.0 * p.element_bytes + p.index_bytes) /
           p.w_thread_private;
}

inline double t_memput_v3_node(int node, const CommStats& stats, const HardwareProfile& p,
                               const Topology& topo) {
    double local_max = 0.0;
    double remote_sum = 0.0;
    for (int t = 0; t < topo.total_threads; ++t) {
        if (topo.node_of(t) != node) continue;
        const ThreadCommStats& s = stats.threads[t];
        local_max = std::max(local_max, 2.0 * s.s_local_out * p.element_bytes / p.w_thread_private);
        remote_sum += s.c_remote_out * p.tau + s.s_remote_out * p.element_bytes / p.w_node_remote;
    }
    return local_max + remote_sum;
}

inline double t_copy_thread(int t, const BlockCyclicLayout& layout, const Topology& topo,
                            const HardwareProfile& p) {
    return 2.0 * static_cast<double>(blocks_of_thread(t, layout, topo)) * layout.blocksize *
           p.element_bytes / p.w_thread_private;
}

inline double t_unpack_thread(const ThreadCommStats& s, const HardwareProfile& p) {
    return (s.s_local_in + s.s_remote_in) * (p.element_bytes + p.index_bytes + p.cacheline_bytes) /
           p.w_thread_private;
}

/// A component of a predicted time breakdown.
struct PredictionComponent {
    std::string component;
    std::string scope;  // "thread" | "node" | "total"
    int index = -1;     // thread or node id, -1 for totals
    double seconds = 0;
};

struct Prediction {
    std::string strategy;
    std::uint64_t iterations = 1;
    double total = 0;  // seconds, already scaled by iterations
    std::vector<PredictionComponent> breakdown;
};

namespace detail {

inline void check_kind(const CommStats& stats, StatsKind expected, const char* what) {
    if (stats.kind != expected)
        throw std::invalid_argument(std::string(what) + ": stats came from the wrong analyzer");

}

}  // namespace detail

/// Slowest thread: max over threads of comp + individual-access cost.
inline Prediction total_v1(const BlockCyclicLayout& layout, const Topology& topo, int r_nz,
                           const CommStats& stats, const HardwareProfile& p,
                           std::uint64_t iterations = 1) {
    detail::check_kind(stats, StatsKind::v1, "total_v1");
    Prediction pred{"v1", iterations, 0, {}};
    double worst = 0.0;
    for (int t = 0; t < topo.total_threads; ++t) {
        const double comp = t_comp_thread(t, layout, topo, r_nz, p);
        const double comm = t_comm_v1_thread(stats.threads[t], p);
        pred.breakdown.push_back({"comp", "thread", t, comp * iterations});
        pred.breakdown.push_back({"comm", "thread", t, comm * iterations});
        worst = std::max(worst, comp + comm);
    }
    pred.total = worst * iterations;
    pred.breakdown.push_back({"total", "total", -1, pred.total});
    return pred;
}

/// Slowest node: max over nodes of (max in-node comp + node communication).
inline Prediction total_v2(const BlockCyclicLayout& layout, const Topology& topo, int r_nz,
                           const CommStats& stats, const HardwareProfile& p,
                           std::uint64_t iterations = 1) {
    detail::check_kind(stats, StatsKind::v2, "total_v2");
    Prediction pred{"v2", iterations, 0, {}};
    for (int t = 0; t < topo.total_threads; ++t)
        pred.breakdown.push_back(
            {"comp", "thread", t, t_comp_thread(t, layout, topo, r_nz, p) * iterations});
    double worst = 0.0;
    for (int node = 0; node < topo.node_count(); ++node) {
        double comp_max = 0.0;
        for (int t = 0; t < topo.total_threads; ++t)
            if (topo.node_of(t) == node)
                comp_max = std::max(comp_max, t_comp_thread(t, layout, topo, r_nz, p));
        const double comm = t_comm_v2_node(node, stats, layout, p, topo);
        pred.breakdown.push_back({"comm", "node", node, comm * iterations});
        worst = std::max(worst, comp_max + comm);
    }
    pred.total = worst * iterations;
    pred.breakdown.push_back({"total", "total", -1, pred.total});
    return pred;
}

/// Barrier-split sum: slowest node through pack+memput, then the slowest
/// thread through copy+unpack+comp.
inline Prediction total_v3(const BlockCyclicLayout& layout, const Topology& topo, int r_nz,
                           const CommStats& stats, const HardwareProfile& p,
                           std::uint64_t iterations = 1) {
    detail::check_kind(stats, StatsKind::v3, "total_v3");
    Prediction pred{"v3", iterations, 0, {}};
    double phase1 = 0.0;
    for (int node = 0; node < topo.node_count(); ++node) {
        double pack_max = 0.0;
        for (int t = 0; t < topo.total_threads; ++t)
            if (topo.node_of(t) == node)
                pack_max = std::max(pack_max, t_pack_thread(stats.threads[t], p));
        const double memput = t_memput_v3_node(node, stats, p, topo);
        pred.breakdown.push_back({"memput", "node", node, memput * iterations});
        phase1 = std::max(phase1, pack_max + memput);
    }
    double phase2 = 0.0;
    for (int t = 0; t < topo.total_threads; ++t) {
        const double pack = t_pack_thread(stats.threads[t], p);
        const double copy = t_copy_thread(t, layout, topo, p);
        const double unpack = t_unpack_thread(stats.threads[t], p);
        const double comp = t_comp_thread(t, layout, topo, r_nz, p);
        pred.breakdown.push_back({"pack", "thread", t, pack * iterations});
        pred.breakdown.push_back({"copy", "thread", t, copy * iterations});
        pred.breakdown.push_back({"unpack", "thread", t, unpack * iterations});
        pred.breakdown.push_back({"comp", "thread", t, comp * iterations});
        phase2 = std::max(phase2, copy + unpack + comp);
    }
    pred.breakdown.push_back({"phase_comm", "total", -1, phase1 * iterations});
    pred.breakdown.push_back({"phase_compute", "total", -1, phase2 * iterations});
    pred.total = (phase1 + phase2) * iterations;
    pred.breakdown.push_back({"total", "total", -1, pred.total});
    return pred;
}

inline Prediction predict(StatsKind kind, const BlockCyclicLayout& layout, const Topology& topo,
                          int r_nz, const CommStats& stats, const HardwareProfile& p,
                          std::uint64_t iterations = 1) {
    switch (kind) {
        case StatsKind::v1: return total_v1(layout, topo, r_nz, stats, p, iterations);
        case StatsKind::v2: return total_v2(layout, topo, r_nz, stats, p, iterations);
        case StatsKind::v3: return total_v3(layout, topo, r_nz, stats, p, iterations);
    }
    throw std::invalid_argument("unknown stats kind");
}

inline void write_prediction_csv(std::ostream& os, const Prediction& pred) {
    os << "strategy,component,scope,index,seconds\n";
    for (const PredictionComponent& c : pred.breakdown)
        os << pred.strategy << ',' << c.component << ',' << c.scope << ',' << c.index << ','
           << c.seconds << '\n';
}

inline nlohmann::json prediction_to_json(const Prediction& pred) {
    nlohmann::json breakdown = nlohmann::json::array();
    for (const PredictionComponent& c : pred.breakdown)
        breakdown.push_back({{"component", c.component},
                             {"scope", c.scope},
                             {"index", c.index},
                             {"seconds", c.seconds}});
    return {{"strategy", pred.strategy},
            {"iterations", pred.iterations},
            {"total_seconds", pred.total},
            {"breakdown", breakdown}};
}

}  // namespace pgaslab
