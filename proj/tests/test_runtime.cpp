#include <atomic>

#include <catch_amalgamated.hpp>

#include "pgaslab/runtime.hpp"

using namespace pgaslab;

TEST_CASE("get_element classification against the node map") {
    // 32 threads, 16 per node; blocksize 1 so element i is owned by thread i
    const Topology topo(32, 16);
    const BlockCyclicLayout layout(32, 1);
    SharedArray<double> arr(layout, topo);
    for (index_t i = 0; i < 32; ++i) arr.host_ref(i) = static_cast<double>(i);

    PgasRuntime rt(topo);
    rt.run([&](ThreadCtx& ctx) {
        if (ctx.tid != 0) {
            ctx.barrier();
            return;
        }
        CHECK(arr.get_element(ctx, 0) == 0.0);  // own element
        CHECK(ctx.ledger->local_indv_count == 0);
        CHECK(arr.get_element(ctx, 1) == 1.0);  // same node
        CHECK(ctx.ledger->local_indv_count == 1);
        CHECK(arr.get_element(ctx, 16) == 16.0);  // other node
        CHECK(ctx.ledger->remote_indv_count == 1);
        ctx.barrier();
    });
    CHECK(rt.ledgers()[0].local_indv_count == 1);
    CHECK(rt.ledgers()[0].remote_indv_count == 1);
    CHECK(rt.ledgers()[0].remote_cntg_bytes == 0);
}

TEST_CASE("get_block byte accounting") {
    const index_t bs = 65536;
    const Topology topo(32, 16);
    const BlockCyclicLayout layout(bs * 32, bs);  // block b owned by thread b
    SharedArray<double> arr(layout, topo);

    PgasRuntime rt(topo);
    std::vector<double> buf(bs);
    rt.run([&](ThreadCtx& ctx) {
        if (ctx.tid != 0) return;
        arr.get_block(ctx, 0, bs, buf.data());  // own block: local contiguous
        CHECK(ctx.ledger->local_cntg_bytes == 524288);
        CHECK(ctx.ledger->remote_message_count == 0);
        arr.get_block(ctx, 16 * bs, bs, buf.data());  // full block from node 1
        CHECK(ctx.ledger->remote_cntg_bytes == 524288);
        CHECK(ctx.ledger->remote_message_count == 1);
        arr.get_block(ctx, 0, 0, buf.data());  // zero length: no change
        CHECK(ctx.ledger->local_cntg_bytes == 524288);
    });
}

TEST_CASE("get_block rejects spans crossing an affinity boundary") {
    const Topology topo(4, 4);
    const BlockCyclicLayout layout(64, 8);
    SharedArray<double> arr(layout, topo);
    PgasRuntime rt(topo);
    std::vector<double> buf(16);
    CHECK_THROWS_AS(rt.run([&](ThreadCtx& ctx) {
                        if (ctx.tid == 0) arr.get_block(ctx, 4, 8, buf.data());
                    }),
                    ContractError);
    // same owner but locally non-contiguous: blocks 0 and 4 both belong to
    // thread 0, yet [0,8) followed by a gap means a 40-element span crosses
    PgasRuntime rt2(topo);
    std::vector<double> big(40);
    CHECK_THROWS_AS(rt2.run([&](ThreadCtx& ctx) {
                        if (ctx.tid == 0) arr.get_block(ctx, 0, 40, big.data());
                    }),
                    ContractError);
}

TEST_CASE("single-block layout allows whole-array gets on one thread") {
    const Topology topo(1, 1);
    const BlockCyclicLayout layout(100, 64);  // two blocks, both on thread 0
    SharedArray<double> arr(layout, topo);
    for (index_t i = 0; i < 100; ++i) arr.host_ref(i) = static_cast<double>(i);
    PgasRuntime rt(topo);
    std::vector<double> buf(100);
    rt.run([&](ThreadCtx& ctx) { arr.get_block(ctx, 0, 100, buf.data()); });
    for (index_t i = 0; i < 100; ++i) CHECK(buf[i] == static_cast<double>(i));
    CHECK(rt.ledgers()[0].local_cntg_bytes == 800);
}

TEST_CASE("affinity region ownership and bounds") {
    const Topology topo(2, 2);
    AffinityRegion<double> region(1, 8);
    PgasRuntime rt(topo);
    std::atomic<int> contract_errors{0};
    rt.run([&](ThreadCtx& ctx) {
        if (ctx.tid == 0) {
            try {
                (void)region.local_data(ctx);
            } catch (const ContractError&) {
                ++contract_errors;
            }
            double v = 7.0;
            region.put_block(ctx, &v, 1, 3);
            CHECK(ctx.ledger->local_cntg_bytes == 8);
        }
        ctx.barrier();
        if (ctx.tid == 1) CHECK(region.local_data(ctx)[3] == 7.0);
    });
    CHECK(contract_errors == 1);

    PgasRuntime rt2(topo);
    std::vector<double> buf(16);
    CHECK_THROWS_AS(rt2.run([&](ThreadCtx& ctx) {
                        if (ctx.tid == 0) region.get_block(ctx, 4, 8, buf.data());
                    }),
                    std::out_of_range);
}

TEST_CASE("values put before a barrier are visible after it, repeatedly") {
    const Topology topo(2, 1);
    AffinityRegion<double> region(0, 1);
    PgasRuntime rt(topo);
    std::atomic<int> failures{0};
    rt.run([&](ThreadCtx& ctx) {
        for (int trial = 0; trial < 1000; ++trial) {
            if (ctx.tid == 1) {
                const double v = static_cast<double>(trial);
                region.put_block(ctx, &v, 1);
            }
            ctx.barrier();
            if (ctx.tid == 0 && region.local_data(ctx)[0] != static_cast<double>(trial))
                ++failures;
            ctx.barrier();
        }
    });
    CHECK(failures == 0);
    // the 1000 cross-node puts were all counted
    CHECK(rt.ledgers()[1].remote_cntg_bytes == 8000);
    CHECK(rt.ledgers()[1].remote_message_count == 1000);
}

TEST_CASE("deterministic workloads give identical ledgers across runs") {
    const Topology topo(4, 2);
    const BlockCyclicLayout layout(64, 4);
    auto workload = [&] {
        SharedArray<double> arr(layout, topo);
        PgasRuntime rt(topo);
        rt.run([&](ThreadCtx& ctx) {
            for (index_t i = 0; i < 64; i += ctx.tid + 1) (void)arr.get_element(ctx, i);
            ctx.barrier();
        });
        return rt.ledgers();
    };
    CHECK(workload() == workload());
}

TEST_CASE("worker exceptions propagate and unblock the barrier") {
    const Topology topo(2, 2);
    PgasRuntime rt(topo, std::chrono::milliseconds(30000));
    CHECK_THROWS_AS(rt.run([&](ThreadCtx& ctx) {
                        if (ctx.tid == 0) throw std::runtime_error("boom");
                        ctx.barrier();
                    }),
                    std::runtime_error);
}
