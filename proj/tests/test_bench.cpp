#include <doctest.h>

#include <map>

#include "iovauth/bench.hpp"

using namespace iovauth;
using bench::OpCounter;

TEST_SUITE_BEGIN("bench");

TEST_CASE("counting wrapper tallies exactly the four counted op kinds") {
    ToyGroup g = ToyGroup::tiny();
    bench::CountingGroup cg(g);
    cg.g1_mul(Scalar{2}, G1{3});
    cg.g1_add(G1{1}, G1{2});   // free
    cg.g2_mul(G2{2}, G2{4});   // free
    cg.scalar_mul(Scalar{2}, Scalar{3}); // free
    cg.pair(G1{1}, G1{1});
    cg.g2_exp(G2{2}, Scalar{5});
    std::vector<uint8_t> d{1};
    cg.map_to_point(d);
    CHECK(cg.counts() == OpCounter{1, 1, 1, 1});
    cg.reset();
    CHECK(cg.counts() == OpCounter{0, 0, 0, 0});
    OpCounter sum;
    sum += OpCounter{1, 2, 3, 4};
    sum += OpCounter{1, 2, 3, 4};
    CHECK(sum == OpCounter{2, 4, 6, 8});
}

TEST_CASE("instrumented counts match the published op profile on every input") {
    ToyGroup g = ToyGroup::medium();
    for (uint64_t seed : {1ull, 2ull, 77ull, 991ull}) {
        CHECK(bench::count_ops(g, bench::Workload::clss_sign, seed) == OpCounter{0, 2, 0, 0});
        CHECK(bench::count_ops(g, bench::Workload::clss_verify, seed) == OpCounter{1, 3, 0, 0});
        // signing a report adds the pseudonym (2M) and the key
        // randomization (3M + 1E) on the vehicle side
        CHECK(bench::count_ops(g, bench::Workload::iov_sign_report, seed) ==
              OpCounter{0, 7, 1, 0});
        // the road side still pays a single pairing
        CHECK(bench::count_ops(g, bench::Workload::iov_verify_request, seed) ==
              OpCounter{1, 3, 2, 0});
    }
}

TEST_CASE("cost model reproduces the published per-scheme totals") {
    bench::CostModel m; // 11.88 / 23.34 / 10.06 / 10.09
    auto check_scheme = [&](const char* name, double sign, double verify, double total) {
        auto c = bench::predict_cost(m, name);
        CHECK(c.sign_ms == doctest::Approx(sign).epsilon(1e-9));
        CHECK(c.verify_ms == doctest::Approx(verify).epsilon(1e-9));
        CHECK(c.total_ms == doctest::Approx(total).epsilon(1e-9));
    };
    check_scheme("Ours", 20.12, 42.06, 62.18);
    check_scheme("HHC", 33.40, 67.22, 100.62);
    check_scheme("HTH", 66.80, 127.60, 194.40);
    check_scheme("THSW", 33.43, 70.86, 104.29);
    check_scheme("CCL", 10.06, 67.22, 77.28);
    CHECK_THROWS_AS(bench::predict_cost(m, "XYZ"), Error);
}

TEST_CASE("this scheme has the strictly smallest predicted total") {
    auto rows = bench::predict_all(bench::CostModel{});
    double ours = 0;
    for (const auto& r : rows)
        if (r.scheme == "Ours") ours = r.total_ms;
    for (const auto& r : rows)
        if (r.scheme != "Ours") CHECK(ours < r.total_ms);
}

TEST_CASE("cost model is linear in the per-op times") {
    bench::CostModel m;
    bench::CostModel doubled{m.pairing_ms * 2, m.map_to_point_ms * 2, m.mul_ms * 2, m.exp_ms * 2};
    for (const auto& s : bench::scheme_table()) {
        auto a = bench::predict_cost(m, s.name);
        auto b = bench::predict_cost(doubled, s.name);
        CHECK(b.sign_ms == 2 * a.sign_ms);
        CHECK(b.verify_ms == 2 * a.verify_ms);
        CHECK(b.total_ms == 2 * a.total_ms);
    }
}

TEST_CASE("verification scaling is linear and keeps the published ordering") {
    bench::CostModel m;
    std::vector<uint64_t> ns{0, 1, 10, 100, 1000};
    auto rows = bench::verify_scaling(m, ns);
    CHECK(rows.size() == ns.size() * 5);
    std::map<std::pair<uint64_t, std::string>, double> by;
    for (const auto& r : rows) by[{r.n, r.scheme}] = r.verify_total_ms;
    for (const auto& s : bench::scheme_table()) CHECK(by.at({0, s.name}) == 0.0);
    CHECK(by.at({100, "Ours"}) == doctest::Approx(4206.0).epsilon(1e-9));
    double per = bench::predict_cost(m, "Ours").verify_ms;
    for (uint64_t n : ns) CHECK(by.at({n, "Ours"}) == static_cast<double>(n) * per);
    for (uint64_t n : {1ull, 10ull, 100ull, 1000ull})
        for (const auto& s : bench::scheme_table())
            if (std::string(s.name) != "Ours") CHECK(by.at({n, "Ours"}) < by.at({n, s.name}));
}

TEST_CASE("csv tables carry the expected rows") {
    auto rows = bench::predict_all(bench::CostModel{});
    auto csv = bench::cost_csv(rows);
    CHECK(csv.find("scheme,sign_ms,verify_ms,total_ms\n") == 0);
    CHECK(csv.find("Ours,20.12,42.06,62.18") != std::string::npos);
    CHECK(csv.find("HTH,66.80,127.60,194.40") != std::string::npos);

    std::vector<uint64_t> ns{100};
    auto scaling = bench::verify_scaling(bench::CostModel{}, ns);
    auto scsv = bench::scaling_csv(scaling);
    CHECK(scsv.find("n,scheme,verify_total_ms\n") == 0);
    CHECK(scsv.find("100,Ours,4206.00") != std::string::npos);
}

TEST_CASE("measure wants at least two repetitions and reports stable counts") {
    ToyGroup g = ToyGroup::medium();
    CHECK_THROWS_WITH_AS(bench::measure(g, bench::Workload::clss_sign, 1),
                         doctest::Contains("repetitions"), Error);
    auto a = bench::measure(g, bench::Workload::clss_verify, 5);
    auto b = bench::measure(g, bench::Workload::clss_verify, 5);
    CHECK(a.ops == b.ops); // counts are deterministic, times vary
    CHECK(a.ops == OpCounter{1, 3, 0, 0});
    CHECK(a.repetitions == 5);
    CHECK(a.backend == "toy");
    CHECK_FALSE(a.comparable);
    CHECK_FALSE(a.cpu_note.empty());
    CHECK(a.mean_ms >= 0.0);
    CHECK(a.stddev_ms >= 0.0);
}

TEST_CASE("parallel batch verification matches the serial reference") {
    ToyGroup g = ToyGroup::medium();
    auto fx = bench::make_batch_fixture(g, 300, 5);
    auto ser = bench::verify_batch_serial(g, fx.params, fx.requests, 1000, 300);
    auto par = bench::verify_batch_parallel(g, fx.params, fx.requests, 1000, 300);
    REQUIRE(ser.verdicts.size() == 300);
    CHECK(ser.verdicts == par.verdicts);
    for (auto v : ser.verdicts) CHECK(v == protocol::Verdict::accept);
    // merged per-thread counters equal the serial totals
    CHECK(ser.ops == par.ops);
    CHECK(ser.ops == OpCounter{300, 900, 600, 0});
}

TEST_CASE("batch verification flags bad requests identically in both paths") {
    ToyGroup g = ToyGroup::medium();
    auto fx = bench::make_batch_fixture(g, 64, 9);
    fx.requests[10].sigma = g.g1_add(fx.requests[10].sigma, g.params().P);
    fx.requests[20].ts = 90000; // stale
    auto ser = bench::verify_batch_serial(g, fx.params, fx.requests, 1000, 300);
    auto par = bench::verify_batch_parallel(g, fx.params, fx.requests, 1000, 300);
    CHECK(ser.verdicts == par.verdicts);
    CHECK(ser.verdicts[10] == protocol::Verdict::bad_signature);
    CHECK(ser.verdicts[20] == protocol::Verdict::replay);
    CHECK(ser.verdicts[0] == protocol::Verdict::accept);
}

TEST_SUITE_END();
