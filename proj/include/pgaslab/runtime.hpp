#pragma once

#include <algorithm>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <functional>
#include <mutex>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "pgaslab/layout.hpp"

namespace pgaslab {

/// Per-emulated-thread record of non-private memory operations. An access is
/// remote iff accessor and owner sit on different nodes, individual iff it
/// came through get_element, contiguous iff it came through get/put_block.
struct TrafficLedger {
    std::uint64_t local_indv_count = 0;
    std::uint64_t remote_indv_count = 0;
    std::uint64_t local_cntg_bytes = 0;
    std::uint64_t remote_cntg_bytes = 0;
    std::uint64_t remote_message_count = 0;

    bool operator==(const TrafficLedger&) const = default;
};

struct ContractError : std::logic_error {
    using std::logic_error::logic_error;
};

struct BarrierTimeout : std::runtime_error {
    using std::runtime_error::runtime_error;
};

class PgasRuntime;

/// Handle passed to each emulated thread's body.
struct ThreadCtx {
    int tid;
    PgasRuntime* rt;
    TrafficLedger* ledger;

    void barrier();
};

/// Emulated PGAS runtime. Spawns one worker per emulated thread, hands each a
/// private ledger, and provides the barrier. It charges no wall-clock costs;
/// it only classifies and counts traffic.
class PgasRuntime {
public:
    explicit PgasRuntime(Topology topo,
                         std::chrono::milliseconds barrier_timeout = std::chrono::minutes(2))
        : topo_(topo), ledgers_(topo.total_threads), barrier_timeout_(barrier_timeout) {}

    const Topology& topology() const { return topo_; }
    const std::vector<TrafficLedger>& ledgers() const { return ledgers_; }
    void reset_ledgers() { ledgers_.assign(topo_.total_threads, TrafficLedger{}); }

    /// Run `body` on every emulated thread and join. Exceptions from workers
    /// are rethrown (first one wins).
    void run(const std::function<void(ThreadCtx&)>& body) {
        const int nt = topo_.total_threads;
        std::vector<std::thread> workers;
        std::vector<std::exception_ptr> errors(nt);
        workers.reserve(nt);
        for (int t = 0; t < nt; ++t) {
            workers.emplace_back([&, t] {
                ThreadCtx ctx{t, this, &ledgers_[t]};
                try {
                    body(ctx);
                } catch (...) {
                    errors[t] = std::current_exception();
                    abort_barrier();
                }
            });
        }
        for (auto& w : workers) w.join();
        for (auto& e : errors)
            if (e) std::rethrow_exception(e);
    }

    void barrier() {
        std::unique_lock<std::mutex> lock(mutex_);
        if (aborted_)
            throw BarrierTimeout("barrier aborted");
        const std::uint64_t gen = generation_;
        if (++arrived_ == topo_.total_threads) {
            arrived_ = 0;
            ++generation_;
            cv_.notify_all();
            return;
        }
        if (!cv_.wait_for(lock, barrier_timeout_,
                          [&] { return generation_ != gen || aborted_; }) ||
            aborted_) {
            aborted_ = true;
            cv_.notify_all();
            throw BarrierTimeout("barrier timed out after " +
                                 std::to_string(barrier_timeout_.count()) + " ms");
        }
    }

    enum class Locality { self, local, remote };

    Locality classify(int accessor, int owner) const {
        if (accessor == owner) return Locality::self;
        return topo_.same_node(accessor, owner) ? Locality::local : Locality::remote;
    }

    void record_individual(ThreadCtx& ctx, int owner) {
        switch (classify(ctx.tid, owner)) {
            case Locality::self: break;
            case Locality::local: ++ctx.ledger->local_indv_count; break;
            case Locality::remote: ++ctx.ledger->remote_indv_count; break;
        }
    }

    /// Bulk transfers: self-directed traffic counts as local contiguous;
    /// every cross-node transfer is one message.
    void record_contiguous(ThreadCtx& ctx, int owner, std::uint64_t bytes) {
        if (bytes == 0) return;
        if (classify(ctx.tid, owner) == Locality::remote) {
            ctx.ledger->remote_cntg_bytes += bytes;
            ++ctx.ledger->remote_message_count;
        } else {
            ctx.ledger->local_cntg_bytes += bytes;
        }
    }

private:
    void abort_barrier() {
        std::lock_guard<std::mutex> lock(mutex_);
        aborted_ = true;
        cv_.notify_all();
    }

    Topology topo_;
    std::vector<TrafficLedger> ledgers_;
    std::chrono::milliseconds barrier_timeout_;
    std::mutex mutex_;
    std::condition_variable cv_;
    int arrived_ = 0;
    std::uint64_t generation_ = 0;
    bool aborted_ = false;
};

inline void ThreadCtx::barrier() { rt->barrier(); }

/// Block-cyclically distributed shared array. Each owner's blocks live
/// contiguously in that owner's region, in block order.
template <typename T>
class SharedArray {
public:
    SharedArray(BlockCyclicLayout layout, Topology topo)
        : layout_(layout), topo_(topo), regions_(topo.total_threads) {
        for (int t = 0; t < topo_.total_threads; ++t)
            regions_[t].resize(elements_of_thread(t, layout_, topo_));
    }

    const BlockCyclicLayout& layout() const { return layout_; }

    /// Host-side (setup/teardown) access, never ledgered.
    T& host_ref(index_t i) {
        const auto [owner, off] = locate(i);
        return regions_[owner][off];
    }
    const T& host_ref(index_t i) const {
        const auto [owner, off] = locate(i);
        return regions_[owner][off];
    }

    void fill_from(const std::vector<T>& src) {
        if (static_cast<index_t>(src.size()) != layout_.n)
            throw std::invalid_argument("SharedArray::fill_from: length mismatch");
        for (index_t i = 0; i < layout_.n; ++i) host_ref(i) = src[i];
    }

    std::vector<T> to_vector() const {
        std::vector<T> out(layout_.n);
        for (index_t i = 0; i < layout_.n; ++i) out[i] = host_ref(i);
        return out;
    }

    /// The accessing thread's own contiguous storage (pointer-to-local cast).
    std::span<T> local_region(int t) { return regions_[t]; }
    std::span<const T> local_region(int t) const { return regions_[t]; }

    /// Local offset of global index i inside its owner's region.
    index_t local_offset(index_t i) const {
        const index_t b = layout_.block_of(i);
        const index_t ordinal = b / topo_.total_threads;
        return ordinal * layout_.blocksize + layout_.phase_of(i);
    }

    T get_element(ThreadCtx& ctx, index_t i) const {
        const auto [owner, off] = locate(i);
        ctx.rt->record_individual(ctx, owner);
        return regions_[owner][off];
    }

    void set_element(ThreadCtx& ctx, index_t i, T value) {
        const auto [owner, off] = locate(i);
        ctx.rt->record_individual(ctx, owner);
        regions_[owner][off] = value;
    }

    /// One-sided bulk get of [src_start, src_start+length) into a private
    /// buffer. The span must be contiguous inside one owner's region.
    void get_block(ThreadCtx& ctx, index_t src_start, index_t length, T* dst) const {
        if (length == 0) return;
        if (length < 0) throw std::invalid_argument("get_block: negative length");
        layout_.check_index(src_start);
        layout_.check_index(src_start + length - 1);
        const auto [owner, off] = locate(src_start);
        const auto [owner_end, off_end] = locate(src_start + length - 1);
        if (owner != owner_end || off_end - off != length - 1)
            throw ContractError("get_block: span crosses an affinity boundary");
        const T* src = regions_[owner].data() + off;
        std::copy(src, src + length, dst);
        ctx.rt->record_contiguous(ctx, owner, static_cast<std::uint64_t>(length) * sizeof(T));
    }

private:
    std::pair<int, index_t> locate(index_t i) const {
        const int owner = owner_thread(i, layout_, topo_);
        return {owner, local_offset(i)};
    }

    BlockCyclicLayout layout_;
    Topology topo_;
    std::vector<std::vector<T>> regions_;
};

/// A region with single-thread affinity (the engine's upc_alloc analog):
/// physically owned by one thread, addressable by all.
template <typename T>
class AffinityRegion {
public:
    AffinityRegion(int owner, index_t size) : owner_(owner), data_(size) {}

    int owner() const { return owner_; }
    index_t size() const { return static_cast<index_t>(data_.size()); }

    /// One-sided put of `length` elements at `dst_offset`.
    void put_block(ThreadCtx& ctx, const T* src, index_t length, index_t dst_offset = 0) {
        if (length == 0) return;
        check_span(dst_offset, length, "put_block");
        std::copy(src, src + length, data_.data() + dst_offset);
        ctx.rt->record_contiguous(ctx, owner_, static_cast<std::uint64_t>(length) * sizeof(T));
    }

    /// One-sided get of `length` elements from `src_offset`.
    void get_block(ThreadCtx& ctx, index_t src_offset, index_t length, T* dst) const {
        if (length == 0) return;
        check_span(src_offset, length, "get_block");
        std::copy(data_.data() + src_offset, data_.data() + src_offset + length, dst);
        ctx.rt->record_contiguous(ctx, owner_, static_cast<std::uint64_t>(length) * sizeof(T));
    }

    /// Owner-affine direct access, never ledgered.
    std::span<T> local_data(ThreadCtx& ctx) {
        if (ctx.tid != owner_)
            throw ContractError("AffinityRegion::local_data: caller is not the owner");
        return data_;
    }

    std::span<T> host_data() { return data_; }
    std::span<const T> host_data() const { return data_; }

private:
    void check_span(index_t off, index_t length, const char* what) const {
        if (off < 0 || length < 0 || off + length > size())
            throw std::out_of_range(std::string("AffinityRegion::") + what + ": span out of range");
    }

    int owner_;
    std::vector<T> data_;
};

}  // namespace pgaslab
