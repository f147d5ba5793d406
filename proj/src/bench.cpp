#include "iovauth/bench.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace iovauth::bench {

OpCounter& OpCounter::operator+=(const OpCounter& o) {
    pairings += o.pairings;
    g1_muls += o.g1_muls;
    g2_exps += o.g2_exps;
    map_to_point += o.map_to_point;
    return *this;
}

const char* workload_name(Workload w) {
    switch (w) {
    case Workload::clss_sign: return "clss_sign";
    case Workload::clss_verify: return "clss_verify";
    case Workload::iov_sign_report: return "iov_sign_report";
    case Workload::iov_verify_request: return "iov_verify_request";
    }
    return "?";
}

namespace {

// everything a workload needs, prepared on the uninstrumented group
struct Fixture {
    clss::SystemParams params;
    protocol::ObuKeys keys;
    std::string id = "OBU-bench";
    std::vector<uint8_t> msg{'r', 'o', 'a', 'd'};
    clss::Signature sig;       // for clss_verify
    G1 enc_pk;                 // for iov workloads
    protocol::ServiceRequest req; // for iov_verify_request
    uint64_t ts = 1000;
};

Fixture make_fixture(const Group& g, uint64_t seed) {
    Rng rng(seed);
    Sha256Hashes h(g);
    Fixture fx;
    auto setup = clss::setup(g, rng);
    fx.params = setup.params;
    auto sv = clss::set_secret_value(g, rng);
    auto ppk = clss::extract_partial_key(g, h, setup.master, fx.id, sv.pk1, rng);
    auto kp = clss::assemble_keys(g, sv.x, sv.pk1, ppk);
    fx.keys = protocol::ObuKeys{kp.sk, kp.pk};
    fx.sig = clss::sign(g, h, fx.params, fx.keys.sk, fx.id, fx.keys.pk, fx.msg);
    Scalar esk = random_scalar(rng, g);
    fx.enc_pk = g.g1_mul(esk, g.params().P);
    fx.req = protocol::sign_report(g, h, fx.params, fx.keys, fx.id, fx.enc_pk, fx.msg, fx.ts, rng);
    return fx;
}

void run_workload(const Group& g, Workload w, const Fixture& fx, uint64_t seed) {
    Sha256Hashes h(g);
    Rng rng(seed + 1);
    switch (w) {
    case Workload::clss_sign:
        clss::sign(g, h, fx.params, fx.keys.sk, fx.id, fx.keys.pk, fx.msg);
        break;
    case Workload::clss_verify:
        clss::verify(g, h, fx.params, fx.id, fx.keys.pk, fx.msg, fx.sig);
        break;
    case Workload::iov_sign_report:
        protocol::sign_report(g, h, fx.params, fx.keys, fx.id, fx.enc_pk, fx.msg, fx.ts, rng);
        break;
    case Workload::iov_verify_request:
        protocol::rsu_verify_request(g, h, fx.params, fx.req, fx.ts, 300);
        break;
    }
}

} // namespace

OpCounter count_ops(const Group& base, Workload w, uint64_t seed) {
    Fixture fx = make_fixture(base, seed);
    CountingGroup cg(base);
    // fixture params reference the same backend; only the counted call
    // goes through the wrapper
    run_workload(cg, w, fx, seed);
    return cg.counts();
}

static const std::array<SchemeOps, 5> kSchemes = {{
    {"HHC", {0, 1, 1, 0}, {2, 1, 2, 0}},
    {"HTH", {0, 2, 2, 0}, {4, 3, 1, 0}},
    {"THSW", {0, 1, 0, 1}, {4, 1, 0, 0}},
    {"CCL", {0, 0, 1, 0}, {2, 1, 2, 0}},
    {"Ours", {0, 0, 2, 0}, {1, 0, 3, 0}},
}};

std::span<const SchemeOps> scheme_table() { return kSchemes; }

static double vec_cost(const CostModel& m, const OpVector& v) {
    return m.pairing_ms * v.pp + m.map_to_point_ms * v.h + m.mul_ms * v.m + m.exp_ms * v.e;
}

SchemeCost predict_cost(const CostModel& model, std::string_view scheme) {
    for (const auto& s : kSchemes) {
        if (scheme == s.name) {
            SchemeCost c;
            c.scheme = s.name;
            c.sign_ms = vec_cost(model, s.sign);
            c.verify_ms = vec_cost(model, s.verify);
            c.total_ms = c.sign_ms + c.verify_ms;
            return c;
        }
    }
    throw Error(Errc::invalid_params, "unknown scheme " + std::string(scheme));
}

std::vector<SchemeCost> predict_all(const CostModel& model) {
    std::vector<SchemeCost> out;
    for (const auto& s : kSchemes) out.push_back(predict_cost(model, s.name));
    return out;
}

std::vector<ScalingRow> verify_scaling(const CostModel& model, std::span<const uint64_t> n_vehicles) {
    std::vector<ScalingRow> out;
    for (uint64_t n : n_vehicles)
        for (const auto& s : kSchemes)
            out.push_back({n, s.name, static_cast<double>(n) * vec_cost(model, s.verify)});
    return out;
}

static std::string fmt_ms(double v) {
    std::ostringstream ss;
    ss.setf(std::ios::fixed);
    ss.precision(2);
    ss << v;
    return ss.str();
}

std::string cost_csv(std::span<const SchemeCost> rows) {
    std::string out = "scheme,sign_ms,verify_ms,total_ms\n";
    for (const auto& r : rows)
        out += r.scheme + "," + fmt_ms(r.sign_ms) + "," + fmt_ms(r.verify_ms) + "," +
               fmt_ms(r.total_ms) + "\n";
    return out;
}

std::string scaling_csv(std::span<const ScalingRow> rows) {
    std::string out = "n,scheme,verify_total_ms\n";
    for (const auto& r : rows)
        out += std::to_string(r.n) + "," + r.scheme + "," + fmt_ms(r.verify_total_ms) + "\n";
    return out;
}

static std::string cpu_note() {
    std::ifstream in("/proc/cpuinfo");
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind("model name", 0) == 0) {
            auto colon = line.find(':');
            if (colon != std::string::npos && colon + 2 <= line.size())
                return line.substr(colon + 2);
        }
    }
    return "unknown CPU";
}

TimingStats measure(const Group& base, Workload w, uint64_t repetitions, uint64_t seed) {
    if (repetitions < 2)
        throw Error(Errc::invalid_params, "measure: need at least 2 repetitions");
    Fixture fx = make_fixture(base, seed);
    TimingStats st;
    st.workload = workload_name(w);
    st.repetitions = repetitions;
    st.backend = base.params().backend == BackendId::toy ? "toy" : "production";
    st.cpu_note = cpu_note();
    st.comparable = base.params().backend != BackendId::toy;

    CountingGroup cg(base);
    run_workload(cg, w, fx, seed);
    st.ops = cg.counts();

    std::vector<double> samples;
    samples.reserve(repetitions);
    for (uint64_t i = 0; i < repetitions; ++i) {
        auto t0 = std::chrono::steady_clock::now();
        run_workload(base, w, fx, seed);
        auto t1 = std::chrono::steady_clock::now();
        samples.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
    }
    double sum = 0;
    for (double s : samples) sum += s;
    st.mean_ms = sum / static_cast<double>(repetitions);
    double var = 0;
    for (double s : samples) var += (s - st.mean_ms) * (s - st.mean_ms);
    st.stddev_ms = std::sqrt(var / static_cast<double>(repetitions - 1));
    return st;
}

BatchFixture make_batch_fixture(const Group& base, size_t n, uint64_t seed) {
    Rng rng(seed);
    Sha256Hashes h(base);
    auto setup = clss::setup(base, rng);
    auto sv = clss::set_secret_value(base, rng);
    std::string id = "OBU-batch";
    auto ppk = clss::extract_partial_key(base, h, setup.master, id, sv.pk1, rng);
    auto kp = clss::assemble_keys(base, sv.x, sv.pk1, ppk);
    protocol::ObuKeys keys{kp.sk, kp.pk};
    Scalar esk = random_scalar(rng, base);
    G1 enc_pk = base.g1_mul(esk, base.params().P);
    BatchFixture fx;
    fx.params = setup.params;
    fx.requests.reserve(n);
    for (size_t i = 0; i < n; ++i) {
        std::string text = "report-" + std::to_string(i);
        std::span<const uint8_t> report{reinterpret_cast<const uint8_t*>(text.data()), text.size()};
        fx.requests.push_back(
            protocol::sign_report(base, h, setup.params, keys, id, enc_pk, report, 1000, rng));
    }
    return fx;
}

BatchResult verify_batch_serial(const Group& base, const clss::SystemParams& params,
                                std::span<const protocol::ServiceRequest> reqs, uint64_t now,
                                uint64_t delta) {
    BatchResult out;
    out.verdicts.resize(reqs.size());
    CountingGroup cg(base);
    Sha256Hashes h(cg);
    auto t0 = std::chrono::steady_clock::now();
    for (size_t i = 0; i < reqs.size(); ++i)
        out.verdicts[i] = protocol::rsu_verify_request(cg, h, params, reqs[i], now, delta).verdict;
    auto t1 = std::chrono::steady_clock::now();
    out.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    out.ops = cg.counts();
    out.threads = 1;
    return out;
}

BatchResult verify_batch_parallel(const Group& base, const clss::SystemParams& params,
                                  std::span<const protocol::ServiceRequest> reqs, uint64_t now,
                                  uint64_t delta) {
#ifndef _OPENMP
    return verify_batch_serial(base, params, reqs, now, delta);
#else
    BatchResult out;
    out.verdicts.resize(reqs.size());
    int max_threads = omp_get_max_threads();
    std::vector<OpCounter> per_thread(max_threads);
    auto t0 = std::chrono::steady_clock::now();
#pragma omp parallel
    {
        CountingGroup cg(base); // per-thread counter around the shared backend
        Sha256Hashes h(cg);
#pragma omp for schedule(static)
        for (long i = 0; i < static_cast<long>(reqs.size()); ++i)
            out.verdicts[i] =
                protocol::rsu_verify_request(cg, h, params, reqs[i], now, delta).verdict;
        per_thread[omp_get_thread_num()] += cg.counts();
    }
    auto t1 = std::chrono::steady_clock::now();
    out.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    for (const auto& c : per_thread) out.ops += c;
    out.threads = max_threads;
    return out;
#endif
}

} // namespace iovauth::bench
