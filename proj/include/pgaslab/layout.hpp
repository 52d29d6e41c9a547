#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>

namespace pgaslab {

using index_t = std::int64_t;

/// Thread count and thread-to-node placement. Threads are packed onto nodes
/// in contiguous groups of threads_per_node; the last node may be ragged.
struct Topology {
    int total_threads = 1;
    int threads_per_node = 1;

    Topology() = default;
    Topology(int threads, int per_node)
        : total_threads(threads), threads_per_node(per_node) {
        if (threads < 1 || per_node < 1)
            throw std::invalid_argument("Topology: thread counts must be >= 1");
    }

    int node_count() const {
        return (total_threads + threads_per_node - 1) / threads_per_node;
    }

    int node_of(int thread) const {
        if (thread < 0 || thread >= total_threads)
            throw std::out_of_range("Topology::node_of: thread " + std::to_string(thread) +
                                    " outside [0," + std::to_string(total_threads) + ")");
        return thread / threads_per_node;
    }

    bool same_node(int a, int b) const { return node_of(a) == node_of(b); }
};

/// Ceiling division of the element count by the block size.
inline index_t num_blocks(index_t n, index_t blocksize) {
    if (blocksize < 1)
        throw std::invalid_argument("num_blocks: blocksize must be >= 1");
    if (n < 1)
        throw std::invalid_argument("num_blocks: n must be >= 1");
    return n / blocksize + (n % blocksize != 0 ? 1 : 0);
}

/// Block-cyclic distribution of n elements in blocks of `blocksize`.
/// Block b holds global indices [b*blocksize, min((b+1)*blocksize, n)) and is
/// owned by thread (b mod THREADS); the last block may be partial.
struct BlockCyclicLayout {
    index_t n = 0;
    index_t blocksize = 0;
    index_t nblks = 0;

    BlockCyclicLayout() = default;
    BlockCyclicLayout(index_t n_, index_t blocksize_)
        : n(n_), blocksize(blocksize_), nblks(num_blocks(n_, blocksize_)) {}

    index_t block_of(index_t i) const {
        check_index(i);
        return i / blocksize;
    }

    index_t phase_of(index_t i) const {
        check_index(i);
        return i % blocksize;
    }

    /// (start index, length) of block b; the last block may be short.
    std::pair<index_t, index_t> block_range(index_t b) const {
        if (b < 0 || b >= nblks)
            throw std::out_of_range("block_range: block " + std::to_string(b) +
                                    " outside [0," + std::to_string(nblks) + ")");
        const index_t start = b * blocksize;
        const index_t length = std::min(blocksize, n - start);
        return {start, length};
    }

    void check_index(index_t i) const {
        if (i < 0 || i >= n)
            throw std::out_of_range("BlockCyclicLayout: index " + std::to_string(i) +
                                    " outside [0," + std::to_string(n) + ")");
    }
};

inline int owner_thread(index_t i, const BlockCyclicLayout& layout, const Topology& topo) {
    return static_cast<int>(layout.block_of(i) % topo.total_threads);
}

/// Number of blocks assigned to thread t under cyclic block ownership.
inline index_t blocks_of_thread(int t, const BlockCyclicLayout& layout, const Topology& topo) {
    if (t < 0 || t >= topo.total_threads)
        throw std::out_of_range("blocks_of_thread: thread out of range");
    const index_t base = layout.nblks / topo.total_threads;
    const index_t rem = layout.nblks % topo.total_threads;
    return base + (t < rem ? 1 : 0);
}

/// Global block index of thread t's b-th owned block.
inline index_t thread_block(int t, index_t b, const Topology& topo) {
    return b * topo.total_threads + t;
}

/// Total element count owned by thread t (partial last block counted short).
inline index_t elements_of_thread(int t, const BlockCyclicLayout& layout, const Topology& topo) {
    index_t total = 0;
    const index_t nb = blocks_of_thread(t, layout, topo);
    for (index_t b = 0; b < nb; ++b)
        total += layout.block_range(thread_block(t, b, topo)).second;
    return total;
}

}  // namespace pgaslab
