#pragma once

#include <algorithm>
#include <functional>
#include <memory>
#include <vector>

#include "pgaslab/layout.hpp"
#include "pgaslab/profile.hpp"
#include "pgaslab/runtime.hpp"

namespace pgaslab {

/// 2D thread grid over an M x N interior. Each thread holds an
/// (M/mprocs + 2) x (N/nprocs + 2) subdomain including a one-cell halo.
struct ProcessGrid {
    int mprocs = 1;
    int nprocs = 1;
    index_t M = 0;
    index_t N = 0;

    ProcessGrid() = default;
    ProcessGrid(int mprocs_, int nprocs_, index_t M_, index_t N_)
        : mprocs(mprocs_), nprocs(nprocs_), M(M_), N(N_) {
        if (mprocs < 1 || nprocs < 1 || M < 1 || N < 1)
            throw std::invalid_argument("ProcessGrid: bad dimensions");
        if (M % mprocs != 0 || N % nprocs != 0)
            throw std::invalid_argument("ProcessGrid: thread grid must divide the mesh evenly");
    }

    int total_threads() const { return mprocs * nprocs; }
    index_t local_m() const { return M / mprocs + 2; }  // rows incl. halo
    index_t local_n() const { return N / nprocs + 2; }  // cols incl. halo
    int iproc(int t) const { return t / nprocs; }
    int kproc(int t) const { return t % nprocs; }
    int rank(int ip, int kp) const { return ip * nprocs + kp; }

    void check_topology(const Topology& topo) const {
        if (topo.total_threads != total_threads())
            throw std::invalid_argument("ProcessGrid: mprocs*nprocs must equal total_threads");
    }
};

struct HeatParams {
    double dt = 0.1;
    double dx2i = 1.0;
    double dy2i = 1.0;
};

/// Explicit-Euler stencil update shared by the distributed solver and the
/// serial reference so both evaluate identical floating-point expressions.
inline double heat_stencil(double c, double down, double up, double right, double left,
                           const HeatParams& p) {
    return c + p.dt * ((down + up - 2.0 * c) * p.dy2i + (right + left - 2.0 * c) * p.dx2i);
}

/// Single-domain serial reference on an (M+2) x (N+2) field with fixed
/// (never-updated) outermost layer.
class SerialHeatReference {
public:
    SerialHeatReference(index_t M, index_t N, HeatParams params,
                        const std::function<double(index_t, index_t)>& init)
        : M_(M), N_(N), params_(params), phi_((M + 2) * (N + 2)), phin_(phi_.size()) {
        for (index_t i = 0; i < M + 2; ++i)
            for (index_t k = 0; k < N + 2; ++k) phi_[at(i, k)] = init(i, k);
    }

    void step() {
        for (index_t i = 1; i <= M_; ++i)
            for (index_t k = 1; k <= N_; ++k)
                phin_[at(i, k)] = heat_stencil(phi_[at(i, k)], phi_[at(i + 1, k)],
                                               phi_[at(i - 1, k)], phi_[at(i, k + 1)],
                                               phi_[at(i, k - 1)], params_);
        for (index_t i = 1; i <= M_; ++i)
            for (index_t k = 1; k <= N_; ++k) phi_[at(i, k)] = phin_[at(i, k)];
    }

    void advance(int steps) {
        for (int s = 0; s < steps; ++s) step();
    }

    double value(index_t i, index_t k) const { return phi_[at(i, k)]; }

    /// Interior values, row-major M x N.
    std::vector<double> interior() const {
        std::vector<double> out(M_ * N_);
        for (index_t i = 0; i < M_; ++i)
            for (index_t k = 0; k < N_; ++k) out[i * N_ + k] = phi_[at(i + 1, k + 1)];
        return out;
    }

private:
    index_t at(index_t i, index_t k) const { return i * (N_ + 2) + k; }

    index_t M_, N_;
    HeatParams params_;
    std::vector<double> phi_, phin_;
};

/// Distributed 2D heat solver over the emulated PGAS runtime. Horizontal
/// halos are packed through per-thread scratch regions; vertical halo rows
/// already lie contiguously and are fetched directly.
class HeatSolver {
public:
    HeatSolver(ProcessGrid grid, Topology topo, HeatParams params,
               const std::function<double(index_t, index_t)>& init)
        : grid_(grid), topo_(topo), params_(params), rt_(topo) {
        grid_.check_topology(topo_);
        const index_t m = grid_.local_m();
        const index_t n = grid_.local_n();
        const int nt = topo_.total_threads;
        phi_.reserve(nt);
        col_first_.reserve(nt);
        col_last_.reserve(nt);
        for (int t = 0; t < nt; ++t) {
            phi_.push_back(std::make_unique<AffinityRegion<double>>(t, m * n));
            col_first_.push_back(std::make_unique<AffinityRegion<double>>(t, m - 2));
            col_last_.push_back(std::make_unique<AffinityRegion<double>>(t, m - 2));
            auto field = phi_.back()->host_data();
            const index_t gi0 = static_cast<index_t>(grid_.iproc(t)) * (m - 2);
            const index_t gk0 = static_cast<index_t>(grid_.kproc(t)) * (n - 2);
            for (index_t i = 0; i < m; ++i)
                for (index_t k = 0; k < n; ++k) field[i * n + k] = init(gi0 + i, gk0 + k);
        }
    }

    void advance(int steps) {
        rt_.run([&](ThreadCtx& ctx) {
            for (int s = 0; s < steps; ++s) {
                halo_phase(ctx);
                compute_phase(ctx);
            }
        });
    }

    void exchange_halos_once() {
        rt_.run([&](ThreadCtx& ctx) { halo_phase(ctx); });
    }

    const std::vector<TrafficLedger>& ledgers() const { return rt_.ledgers(); }
    void reset_ledgers() { rt_.reset_ledgers(); }

    /// Thread t's full local field (halo included), row-major m x n.
    std::vector<double> local_field(int t) const {
        auto d = phi_[t]->host_data();
        return {d.begin(), d.end()};
    }

    /// Global interior, row-major M x N.
    std::vector<double> gather_interior() const {
        const index_t m = grid_.local_m();
        const index_t n = grid_.local_n();
        std::vector<double> out(grid_.M * grid_.N);
        for (int t = 0; t < topo_.total_threads; ++t) {
            auto field = phi_[t]->host_data();
            const index_t gi0 = static_cast<index_t>(grid_.iproc(t)) * (m - 2);
            const index_t gk0 = static_cast<index_t>(grid_.kproc(t)) * (n - 2);
            for (index_t i = 1; i < m - 1; ++i)
                for (index_t k = 1; k < n - 1; ++k)
                    out[(gi0 + i - 1) * grid_.N + (gk0 + k - 1)] = field[i * n + k];
        }
        return out;
    }

private:
    void halo_phase(ThreadCtx& ctx) {
        const int t = ctx.tid;
        const index_t m = grid_.local_m();
        const index_t n = grid_.local_n();
        const int ip = grid_.iproc(t);
        const int kp = grid_.kproc(t);
        auto field = phi_[t]->local_data(ctx);

        // pack the two interior columns for the horizontal direction
        if (kp > 0) {
            auto vec = col_first_[t]->local_data(ctx);
            for (index_t i = 0; i < m - 2; ++i) vec[i] = field[(i + 1) * n + 1];
        }
        if (kp < grid_.nprocs - 1) {
            auto vec = col_last_[t]->local_data(ctx);
            for (index_t i = 0; i < m - 2; ++i) vec[i] = field[(i + 1) * n + (n - 2)];
        }
        ctx.barrier();

        std::vector<double> halovec(m - 2);
        if (kp > 0) {
            col_last_[grid_.rank(ip, kp - 1)]->get_block(ctx, 0, m - 2, halovec.data());
            for (index_t i = 1; i < m - 1; ++i) field[i * n + 0] = halovec[i - 1];
        }
        if (kp < grid_.nprocs - 1) {
            col_first_[grid_.rank(ip, kp + 1)]->get_block(ctx, 0, m - 2, halovec.data());
            for (index_t i = 1; i < m - 1; ++i) field[i * n + (n - 1)] = halovec[i - 1];
        }
        // vertical rows are contiguous at the source; no packing needed
        if (ip > 0)
            phi_[grid_.rank(ip - 1, kp)]->get_block(ctx, (m - 2) * n + 1, n - 2, &field[0 * n + 1]);
        if (ip < grid_.mprocs - 1)
            phi_[grid_.rank(ip + 1, kp)]->get_block(ctx, 1 * n + 1, n - 2,
                                                    &field[(m - 1) * n + 1]);
        ctx.barrier();
    }

    void compute_phase(ThreadCtx& ctx) {
        const int t = ctx.tid;
        const index_t m = grid_.local_m();
        const index_t n = grid_.local_n();
        auto field = phi_[t]->local_data(ctx);
        std::vector<double>& phin = scratch(t);
        for (index_t i = 1; i < m - 1; ++i)
            for (index_t k = 1; k < n - 1; ++k)
                phin[i * n + k] = heat_stencil(field[i * n + k], field[(i + 1) * n + k],
                                               field[(i - 1) * n + k], field[i * n + k + 1],
                                               field[i * n + k - 1], params_);
        for (index_t i = 1; i < m - 1; ++i)
            for (index_t k = 1; k < n - 1; ++k) field[i * n + k] = phin[i * n + k];
        ctx.barrier();
    }

    std::vector<double>& scratch(int t) {
        if (phin_.empty()) phin_.resize(topo_.total_threads);
        auto& buf = phin_[t];
        buf.resize(grid_.local_m() * grid_.local_n());
        return buf;
    }

    ProcessGrid grid_;
    Topology topo_;
    HeatParams params_;
    PgasRuntime rt_;
    std::vector<std::unique_ptr<AffinityRegion<double>>> phi_, col_first_, col_last_;
    std::vector<std::vector<double>> phin_;
};

/// Halo-exchange cost model. Message volumes are exact functions of the grid;
/// locality follows the thread-to-node placement.
struct HaloModelBreakdown {
    double pack_max = 0;    // slowest per-thread pack, seconds/step
    double unpack_max = 0;  // equal to pack by construction
    double memget = 0;      // slowest node's transfer term
    double total = 0;
};

inline HaloModelBreakdown model_halo_breakdown(const ProcessGrid& grid, const HardwareProfile& p,
                                               const Topology& topo) {
    grid.check_topology(topo);
    const double horiz_len = static_cast<double>(grid.local_m() - 2);
    const double vert_len = static_cast<double>(grid.local_n() - 2);

    HaloModelBreakdown out;
    double worst = 0.0;
    for (int node = 0; node < topo.node_count(); ++node) {
        double pack_max = 0.0, local_max = 0.0, remote_sum = 0.0;
        for (int t = 0; t < topo.total_threads; ++t) {
            if (topo.node_of(t) != node) continue;
            const int ip = grid.iproc(t);
            const int kp = grid.kproc(t);
            double s_horiz = 0, s_local = 0, s_remote = 0;
            auto neighbor = [&](int nip, int nkp, double len, bool horizontal) {
                if (nip < 0 || nip >= grid.mprocs || nkp < 0 || nkp >= grid.nprocs) return;
                if (horizontal) s_horiz += len;
                if (topo.same_node(t, grid.rank(nip, nkp)))
                    s_local += len;
                else
                    s_remote += len;
            };
            neighbor(ip, kp - 1, horiz_len, true);
            neighbor(ip, kp + 1, horiz_len, true);
            neighbor(ip - 1, kp, vert_len, false);
            neighbor(ip + 1, kp, vert_len, false);

            pack_max = std::max(pack_max, s_horiz * (p.element_bytes + p.cacheline_bytes) /
                                              p.w_thread_private);
            local_max = std::max(local_max, 2.0 * s_local * p.element_bytes / p.w_thread_private);
            remote_sum += s_remote * p.element_bytes / p.w_node_remote;
        }
        const double node_total = 2.0 * pack_max + local_max + remote_sum;
        if (node_total > worst) {
            worst = node_total;
            out.pack_max = pack_max;
            out.unpack_max = pack_max;
            out.memget = local_max + remote_sum;
        }
    }
    out.total = worst;
    return out;
}

/// Predicted halo-exchange seconds per time step.
inline double model_halo(const ProcessGrid& grid, const HardwareProfile& p, const Topology& topo) {
    return model_halo_breakdown(grid, p, topo).total;
}

/// Predicted compute seconds per time step (identical for every thread).
inline double model_comp(const ProcessGrid& grid, const HardwareProfile& p) {
    return 3.0 * static_cast<double>(grid.local_m() - 2) *
           static_cast<double>(grid.local_n() - 2) * p.element_bytes / p.w_thread_private;
}

}  // namespace pgaslab
