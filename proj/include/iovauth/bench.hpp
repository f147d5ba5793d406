#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "iovauth/protocol.hpp"

// Operation counting, the analytic per-scheme cost model, wall-clock
// measurement, and batch verification (serial reference plus an
// OpenMP-parallel kernel over independent requests).
namespace iovauth::bench {

struct OpCounter {
    uint64_t pairings = 0;
    uint64_t g1_muls = 0;
    uint64_t g2_exps = 0;
    uint64_t map_to_point = 0;

    OpCounter& operator+=(const OpCounter& o);
    bool operator==(const OpCounter&) const = default;
};

// Instrumented group-provider wrapper. Only pairings, G1 scalar
// multiplications, G2 exponentiations and map-to-point are counted;
// point additions, G2 multiplications and scalar field ops are free.
class CountingGroup final : public Group {
public:
    explicit CountingGroup(const Group& inner) : inner_(&inner) {}

    const OpCounter& counts() const { return counts_; }
    void reset() { counts_ = {}; }

    const GroupParams& params() const override { return inner_->params(); }
    G1 g1_mul(Scalar k, const G1& a) const override { ++counts_.g1_muls; return inner_->g1_mul(k, a); }
    G1 g1_add(const G1& a, const G1& b) const override { return inner_->g1_add(a, b); }
    G1 g1_neg(const G1& a) const override { return inner_->g1_neg(a); }
    G1 g1_zero() const override { return inner_->g1_zero(); }
    G1 map_to_point(std::span<const uint8_t> d) const override { ++counts_.map_to_point; return inner_->map_to_point(d); }
    G2 pair(const G1& a, const G1& b) const override { ++counts_.pairings; return inner_->pair(a, b); }
    G2 g2_exp(const G2& b, Scalar k) const override { ++counts_.g2_exps; return inner_->g2_exp(b, k); }
    G2 g2_mul(const G2& a, const G2& b) const override { return inner_->g2_mul(a, b); }
    G2 g2_one() const override { return inner_->g2_one(); }
    size_t scalar_width() const override { return inner_->scalar_width(); }
    size_t g1_width() const override { return inner_->g1_width(); }
    size_t g2_width() const override { return inner_->g2_width(); }
    std::vector<uint8_t> encode_scalar(Scalar k) const override { return inner_->encode_scalar(k); }
    std::vector<uint8_t> encode_g1(const G1& a) const override { return inner_->encode_g1(a); }
    std::vector<uint8_t> encode_g2(const G2& a) const override { return inner_->encode_g2(a); }
    Scalar decode_scalar(std::span<const uint8_t> in) const override { return inner_->decode_scalar(in); }
    G1 decode_g1(std::span<const uint8_t> in) const override { return inner_->decode_g1(in); }
    G2 decode_g2(std::span<const uint8_t> in) const override { return inner_->decode_g2(in); }

private:
    const Group* inner_;
    mutable OpCounter counts_;
};

enum class Workload { clss_sign, clss_verify, iov_sign_report, iov_verify_request };
const char* workload_name(Workload w);

// Counts collected from one instrumented run of the workload on fresh
// seeded fixtures.
OpCounter count_ops(const Group& base, Workload w, uint64_t seed = 1);

// per-operation counts of one scheme phase
struct OpVector {
    int pp = 0; // pairings
    int h = 0;  // map-to-point
    int m = 0;  // G1 scalar multiplications
    int e = 0;  // G2 exponentiations
};

struct SchemeOps {
    const char* name;
    OpVector sign;
    OpVector verify;
};

// Comparison schemes and this one, by published operation profile.
std::span<const SchemeOps> scheme_table();

struct CostModel {
    double pairing_ms = 11.88;
    double map_to_point_ms = 23.34;
    double mul_ms = 10.06;
    double exp_ms = 10.09;
};

struct SchemeCost {
    std::string scheme;
    double sign_ms = 0;
    double verify_ms = 0;
    double total_ms = 0;
};

SchemeCost predict_cost(const CostModel& model, std::string_view scheme);
std::vector<SchemeCost> predict_all(const CostModel& model);

struct ScalingRow {
    uint64_t n = 0;
    std::string scheme;
    double verify_total_ms = 0;
};
std::vector<ScalingRow> verify_scaling(const CostModel& model, std::span<const uint64_t> n_vehicles);

std::string cost_csv(std::span<const SchemeCost> rows);
std::string scaling_csv(std::span<const ScalingRow> rows);

struct TimingStats {
    std::string workload;
    uint64_t repetitions = 0;
    double mean_ms = 0;
    double stddev_ms = 0;
    OpCounter ops; // identical across repetitions
    std::string backend;
    std::string cpu_note;
    bool comparable = false; // toy-backend timings are not comparable to real curves
};

// Wall-clock stats over `repetitions` runs; throws invalid_params when
// repetitions < 2.
TimingStats measure(const Group& base, Workload w, uint64_t repetitions, uint64_t seed = 1);

struct BatchResult {
    std::vector<protocol::Verdict> verdicts;
    OpCounter ops; // merged across threads for the parallel path
    double wall_ms = 0;
    int threads = 1;
};

BatchResult verify_batch_serial(const Group& base, const clss::SystemParams& params,
                                std::span<const protocol::ServiceRequest> reqs, uint64_t now,
                                uint64_t delta);
// Same verdicts as the serial reference; per-thread counters are merged
// after the loop. Falls back to the serial path without OpenMP.
BatchResult verify_batch_parallel(const Group& base, const clss::SystemParams& params,
                                  std::span<const protocol::ServiceRequest> reqs, uint64_t now,
                                  uint64_t delta);

// Fixture shared by the batch paths and the CLI: one OBU, n requests.
struct BatchFixture {
    clss::SystemParams params;
    std::vector<protocol::ServiceRequest> requests;
};
BatchFixture make_batch_fixture(const Group& base, size_t n, uint64_t seed = 1);

} // namespace iovauth::bench
