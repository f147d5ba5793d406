#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "iovauth/bench.hpp"
#include "iovauth/simnet.hpp"
#include "iovauth/store.hpp"
#include "iovauth/wire.hpp"

namespace fs = std::filesystem;
using namespace iovauth;

namespace {

// exit codes, also documented in the README
constexpr int kOk = 0;
constexpr int kValidation = 1;
constexpr int kMissingOrParse = 2;
constexpr int kReplay = 3;
constexpr int kBadSignature = 4;
constexpr int kDenied = 5;
constexpr int kBadPseudonym = 6;
constexpr int kUntraceableEpoch = 7;

int verdict_exit(protocol::Verdict v) {
    switch (v) {
    case protocol::Verdict::accept: return kOk;
    case protocol::Verdict::replay: return kReplay;
    case protocol::Verdict::bad_signature: return kBadSignature;
    case protocol::Verdict::denied: return kDenied;
    case protocol::Verdict::bad_pseudonym: return kBadPseudonym;
    }
    return kValidation;
}

int error_exit(const Error& e) {
    switch (e.code()) {
    case Errc::io_error:
    case Errc::parse_error: return kMissingOrParse;
    case Errc::untraceable_epoch: return kUntraceableEpoch;
    case Errc::bad_pseudonym: return kBadPseudonym;
    case Errc::invalid_element: return kBadSignature;
    default: return kValidation;
    }
}

struct Config {
    std::string state_dir = "state";
    std::string params_set = "TINY";
    uint64_t q = 0, p = 0, g0 = 0;
    uint64_t delta = 300;
    uint64_t epoch_length = 1000;
    std::vector<std::string> regions;
};

std::vector<std::string> split_csv(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

Config load_config(const std::string& path) {
    Config cfg;
    if (path.empty()) return cfg;
    std::ifstream in(path);
    if (!in) throw Error(Errc::io_error, "missing file: " + path);
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string key, value;
        if (!(ls >> key >> value))
            throw Error(Errc::parse_error, path + ":" + std::to_string(lineno) + ": expected 'key value'");
        if (key == "state_dir") cfg.state_dir = value;
        else if (key == "params") cfg.params_set = value;
        else if (key == "q") cfg.q = std::stoull(value);
        else if (key == "p") cfg.p = std::stoull(value);
        else if (key == "g0") cfg.g0 = std::stoull(value);
        else if (key == "delta") cfg.delta = std::stoull(value);
        else if (key == "epoch_length") cfg.epoch_length = std::stoull(value);
        else if (key == "regions") cfg.regions = split_csv(value);
        else throw Error(Errc::parse_error, path + ":" + std::to_string(lineno) + ": unknown key " + key);
    }
    return cfg;
}

std::string id_file(const std::string& dir, const std::string& kind, std::string_view id) {
    return dir + "/" + kind + "_" +
           store::to_hex({reinterpret_cast<const uint8_t*>(id.data()), id.size()}) + ".txt";
}

ToyGroup make_group(const Config& cfg) {
    if (cfg.params_set == "TINY") return ToyGroup::tiny();
    if (cfg.params_set == "MEDIUM") return ToyGroup::medium();
    if (cfg.params_set == "custom") return toy_setup(cfg.q, cfg.p, cfg.g0);
    throw Error(Errc::invalid_params, "params must be TINY, MEDIUM or custom");
}

std::vector<uint8_t> read_binary(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::io_error, "missing file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    auto s = ss.str();
    return {s.begin(), s.end()};
}

protocol::TccState load_tcc(const Config& cfg, const store::LoadedSystem& sys) {
    protocol::TccState tcc;
    tcc.params = sys.params;
    tcc.master = store::load_master(cfg.state_dir + "/master.txt", sys.group);
    tcc.lslu = store::load_lslu(cfg.state_dir + "/lslu.txt", sys.group);
    tcc.lsrb = store::load_lsrb(cfg.state_dir + "/lsrb.txt");
    tcc.archive = store::load_epochs(cfg.state_dir + "/epochs.txt", sys.group);
    return tcc;
}

void print_timing(const bench::TimingStats& st) {
    std::cout << "  " << st.workload << ": mean=" << st.mean_ms << " ms stddev=" << st.stddev_ms
              << " ms reps=" << st.repetitions << " ops{PP=" << st.ops.pairings
              << ",M=" << st.ops.g1_muls << ",E=" << st.ops.g2_exps
              << ",H=" << st.ops.map_to_point << "}\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"certificateless anonymous vehicle authentication toolkit"};
    app.require_subcommand(1);

    std::string config_path;
    app.add_option("--config", config_path, "key-value config file")
        ->envname("IOVAUTH_CONFIG");
    std::string state_dir_flag;
    app.add_option("--state-dir", state_dir_flag, "state directory (overrides config)");
    uint64_t seed = 1;
    app.add_option("--seed", seed, "seed for all randomness");

    // setup
    auto* cmd_setup = app.add_subcommand("setup", "initialize system parameters and lists");
    std::string params_set;
    uint64_t custom_q = 0, custom_p = 0, custom_g0 = 0;
    std::string backend = "toy";
    cmd_setup->add_option("--backend", backend, "group backend (toy)");
    cmd_setup->add_option("--params", params_set, "TINY | MEDIUM | custom");
    cmd_setup->add_option("--q", custom_q, "custom toy group order");
    cmd_setup->add_option("--p", custom_p, "custom toy modulus");
    cmd_setup->add_option("--g0", custom_g0, "custom toy pairing base");

    // register-obu / register-rsu
    auto* cmd_robu = app.add_subcommand("register-obu", "enroll a vehicle and extend Ls_lu");
    std::string obu_id;
    uint64_t reg_time = 0;
    cmd_robu->add_option("--id", obu_id, "vehicle identity")->required();
    cmd_robu->add_option("--time", reg_time, "registration time");

    auto* cmd_rrsu = app.add_subcommand("register-rsu", "enroll a road-side unit");
    std::string rsu_id;
    cmd_rrsu->add_option("--id", rsu_id, "road-side unit identity")->required();

    // issue-epoch
    auto* cmd_epoch = app.add_subcommand("issue-epoch", "issue a regional encryption key epoch");
    std::string epoch_region;
    uint64_t epoch_from = 0, epoch_to = 0, epoch_len = 0;
    cmd_epoch->add_option("--region", epoch_region, "region name")->required();
    cmd_epoch->add_option("--from", epoch_from, "window start (inclusive)");
    cmd_epoch->add_option("--to", epoch_to, "window end (exclusive)");
    cmd_epoch->add_option("--length", epoch_len, "append a window of this length");

    // sign
    auto* cmd_sign = app.add_subcommand("sign", "produce an anonymous service request");
    std::string sign_id, report_path, req_out, sigma_out, sign_region;
    uint64_t sign_time = 0;
    cmd_sign->add_option("--id", sign_id, "vehicle identity")->required();
    cmd_sign->add_option("--report", report_path, "report payload file")->required();
    cmd_sign->add_option("--time", sign_time, "timestamp T")->required();
    cmd_sign->add_option("--region", sign_region, "region (default: first configured)");
    cmd_sign->add_option("--out", req_out, "request output path (default state/request.bin)");
    cmd_sign->add_option("--sigma-out", sigma_out, "also write the bare signature, hex");

    // verify
    auto* cmd_verify = app.add_subcommand("verify", "road-side verification of a request");
    std::string req_in;
    uint64_t now = 0, delta_flag = 0;
    cmd_verify->add_option("--req", req_in, "request path (default state/request.bin)");
    cmd_verify->add_option("--time", now, "verifier clock 'now'")->required();
    cmd_verify->add_option("--delta", delta_flag, "freshness window (seconds)");

    // simulate
    auto* cmd_sim = app.add_subcommand("simulate", "run a scripted scenario");
    std::string scenario_path, transcript_path, summary_path;
    bool sim_seed_override = false;
    cmd_sim->add_option("--scenario", scenario_path, "scenario file")->required();
    cmd_sim->add_option("--transcript", transcript_path, "write the event log here");
    cmd_sim->add_option("--summary", summary_path, "write the JSON summary here");
    cmd_sim->add_flag("--override-seed", sim_seed_override, "use --seed instead of the scenario seed");

    // track
    auto* cmd_track = app.add_subcommand("track", "reveal the sender of a disputed request");
    std::string track_req, track_region, track_note = "cli-evidence";
    cmd_track->add_option("--req", track_req, "request path (default state/request.bin)");
    cmd_track->add_option("--region", track_region, "region named by the evidence")->required();
    cmd_track->add_option("--evidence", track_note, "evidence reference stored in Ls_rb");

    // bench
    auto* cmd_bench = app.add_subcommand("bench", "operation counts, timings, batch comparison");
    bool ops_only = false;
    uint64_t reps = 5;
    std::string bench_params = "MEDIUM";
    std::string batch_list = "256,2048";
    std::string bench_csv;
    cmd_bench->add_flag("--ops-only", ops_only, "suppress wall-clock measurement");
    cmd_bench->add_option("--reps", reps, "repetitions per workload");
    cmd_bench->add_option("--params", bench_params, "TINY | MEDIUM");
    cmd_bench->add_option("--batch", batch_list, "batch sizes for serial vs parallel verify");
    cmd_bench->add_option("--csv", bench_csv, "write measured timings as CSV");

    // cost-model
    auto* cmd_cost = app.add_subcommand("cost-model", "analytic per-scheme cost comparison");
    bench::CostModel model;
    std::string scaling_list = "1,10,100,1000";
    std::string csv_cost, csv_scaling;
    cmd_cost->add_option("--pairing-ms", model.pairing_ms, "pairing time");
    cmd_cost->add_option("--map-ms", model.map_to_point_ms, "map-to-point time");
    cmd_cost->add_option("--mul-ms", model.mul_ms, "G1 multiplication time");
    cmd_cost->add_option("--exp-ms", model.exp_ms, "G2 exponentiation time");
    cmd_cost->add_option("--scaling", scaling_list, "vehicle counts for the scaling table");
    cmd_cost->add_option("--csv-cost", csv_cost, "write the per-scheme CSV here");
    cmd_cost->add_option("--csv-scaling", csv_scaling, "write the scaling CSV here");

    // accept global flags after the subcommand name too
    for (auto* sc : app.get_subcommands([](const CLI::App*) { return true; }))
        sc->fallthrough();

    CLI11_PARSE(app, argc, argv);

    try {
        Config cfg = load_config(config_path);
        if (!state_dir_flag.empty()) cfg.state_dir = state_dir_flag;
        if (cmd_verify->count("--delta")) cfg.delta = delta_flag;
        const std::string dir = cfg.state_dir;
        const std::string params_path = dir + "/params.txt";

        if (*cmd_setup) {
            if (!params_set.empty()) cfg.params_set = params_set;
            if (custom_q) { cfg.q = custom_q; cfg.p = custom_p; cfg.g0 = custom_g0; cfg.params_set = "custom"; }
            if (backend != "toy")
                throw Error(Errc::invalid_params, "only the toy backend is built in");
            ToyGroup group = make_group(cfg);
            Rng rng(seed);
            auto setup = clss::setup(group, rng);
            fs::create_directories(dir);
            store::save_params(params_path, group, setup.params);
            store::save_master(dir + "/master.txt", group, setup.master);
            store::save_lslu(dir + "/lslu.txt", group, {});
            store::save_lsrb(dir + "/lsrb.txt", {});
            store::save_epochs(dir + "/epochs.txt", group, {});
            std::cout << "params written to " << params_path << "\n";
            return kOk;
        }

        if (*cmd_sim) {
            auto scenario = simnet::load_scenario(scenario_path);
            if (sim_seed_override) scenario.seed = seed;
            auto transcript = simnet::run_scenario(scenario);
            if (!transcript_path.empty())
                store::write_file_atomic(transcript_path, transcript.text());
            else
                std::cout << transcript.text();
            if (!summary_path.empty())
                store::write_file_atomic(summary_path, transcript.summary_json());
            else
                std::cout << transcript.summary_json();
            bool ok = transcript.expectations_checked == transcript.expectations_matched;
            if (!ok) std::cerr << "expectation mismatch\n";
            return ok ? kOk : kValidation;
        }

        if (*cmd_bench) {
            ToyGroup bg = bench_params == "TINY" ? ToyGroup::tiny() : ToyGroup::medium();
            std::cout << "operation counts (backend=" << bench_params << "):\n";
            for (auto w : {bench::Workload::clss_sign, bench::Workload::clss_verify,
                           bench::Workload::iov_sign_report, bench::Workload::iov_verify_request}) {
                auto c = bench::count_ops(bg, w, seed);
                std::cout << "  " << bench::workload_name(w) << ": PP=" << c.pairings
                          << " M=" << c.g1_muls << " E=" << c.g2_exps << " H=" << c.map_to_point
                          << "\n";
            }
            if (!ops_only) {
                std::cout << "wall-clock (toy backend, not comparable to published curve timings):\n";
                std::string csv = "workload,mean_ms,stddev_ms,reps\n";
                for (auto w : {bench::Workload::clss_sign, bench::Workload::clss_verify,
                               bench::Workload::iov_sign_report,
                               bench::Workload::iov_verify_request}) {
                    auto st = bench::measure(bg, w, reps, seed);
                    print_timing(st);
                    csv += st.workload + "," + std::to_string(st.mean_ms) + "," +
                           std::to_string(st.stddev_ms) + "," + std::to_string(st.repetitions) + "\n";
                }
                auto any = bench::measure(bg, bench::Workload::clss_sign, reps, seed);
                std::cout << "  cpu: " << any.cpu_note << "\n";
                if (!bench_csv.empty()) store::write_file_atomic(bench_csv, csv);

                std::cout << "batch verification, serial vs OpenMP:\n";
                for (const auto& tok : split_csv(batch_list)) {
                    size_t n = std::stoull(tok);
                    auto fx = bench::make_batch_fixture(bg, n, seed);
                    auto ser = bench::verify_batch_serial(bg, fx.params, fx.requests, 1000, 300);
                    auto par = bench::verify_batch_parallel(bg, fx.params, fx.requests, 1000, 300);
                    bool same = ser.verdicts == par.verdicts && ser.ops == par.ops;
                    std::cout << "  n=" << n << " serial=" << ser.wall_ms << " ms parallel="
                              << par.wall_ms << " ms threads=" << par.threads
                              << " speedup=" << (par.wall_ms > 0 ? ser.wall_ms / par.wall_ms : 0)
                              << (same ? "" : "  !! verdict or count divergence") << "\n";
                    if (!same) return kValidation;
                }
            }
            return kOk;
        }

        if (*cmd_cost) {
            auto rows = bench::predict_all(model);
            std::cout << "scheme  sign_ms  verify_ms  total_ms\n";
            for (const auto& r : rows)
                std::cout << r.scheme << "  " << r.sign_ms << "  " << r.verify_ms << "  "
                          << r.total_ms << "\n";
            std::vector<uint64_t> ns;
            for (const auto& tok : split_csv(scaling_list)) ns.push_back(std::stoull(tok));
            auto scaling = bench::verify_scaling(model, ns);
            std::cout << "verification scaling (n, scheme, total_ms):\n";
            for (const auto& r : scaling)
                std::cout << "  " << r.n << " " << r.scheme << " " << r.verify_total_ms << "\n";
            if (!csv_cost.empty()) store::write_file_atomic(csv_cost, bench::cost_csv(rows));
            if (!csv_scaling.empty())
                store::write_file_atomic(csv_scaling, bench::scaling_csv(scaling));
            return kOk;
        }


        auto sys = store::load_params(params_path);
        const ToyGroup& group = sys.group;
        Sha256Hashes hashes(group);

        if (*cmd_robu) {
            auto tcc = load_tcc(cfg, sys);
            Rng rng(seed);
            auto sv = clss::set_secret_value(group, rng);
            auto ppk = protocol::register_obu(tcc, group, hashes, obu_id, sv.pk1, reg_time, rng);
            if (!clss::verify_partial_key(group, hashes, sys.params, obu_id, sv.pk1, ppk))
                throw Error(Errc::invalid_params, "partial key failed its check equation");
            auto kp = clss::assemble_keys(group, sv.x, sv.pk1, ppk);
            store::save_obu_keys(id_file(dir, "obu", obu_id), group, obu_id,
                                 protocol::ObuKeys{kp.sk, kp.pk});
            store::save_lslu(dir + "/lslu.txt", group, tcc.lslu);
            std::cout << "obu " << obu_id << " registered; keys in " << id_file(dir, "obu", obu_id)
                      << "\n";
            return kOk;
        }

        if (*cmd_rrsu) {
            auto tcc = load_tcc(cfg, sys);
            auto reg = protocol::register_rsu(tcc, group, hashes, rsu_id);
            if (!protocol::verify_rsu_key(group, hashes, sys.params, rsu_id, reg.key))
                throw Error(Errc::invalid_params, "rsu key failed its check equation");
            store::save_rsu_key(id_file(dir, "rsu", rsu_id), group, rsu_id, reg.key);
            std::cout << "rsu " << rsu_id << " registered; lsrb version " << reg.lsrb.version
                      << "\n";
            return kOk;
        }

        if (*cmd_epoch) {
            auto tcc = load_tcc(cfg, sys);
            Rng rng(seed);
            uint64_t from = epoch_from, to = epoch_to;
            if (epoch_len) {
                from = tcc.archive.last_end(epoch_region).value_or(0);
                to = from + epoch_len;
            }
            auto e = protocol::issue_regional_epoch(tcc, group, epoch_region, from, to, rng);
            store::save_epochs(dir + "/epochs.txt", group, tcc.archive);
            std::cout << "epoch region=" << e.region << " index=" << e.index << " window=["
                      << e.valid_from << "," << e.valid_to << ")\n";
            return kOk;
        }

        if (*cmd_sign) {
            auto obu = store::load_obu_keys(id_file(dir, "obu", sign_id), group);
            auto archive = store::load_epochs(dir + "/epochs.txt", group);
            std::string region = sign_region;
            if (region.empty() && !cfg.regions.empty()) region = cfg.regions.front();
            if (region.empty())
                throw Error(Errc::invalid_params, "no region given; use --region or config");
            const auto* epoch = archive.find(region, sign_time);
            if (!epoch)
                throw Error(Errc::invalid_params, "no epoch covers region " + region + " at t=" +
                                                      std::to_string(sign_time));
            auto report = read_binary(report_path);
            Rng rng(seed);
            auto req = protocol::sign_report(group, hashes, sys.params, obu.keys, obu.id,
                                             epoch->enc_pk, report, sign_time, rng);
            auto bytes = wire::encode_request(group, req);
            std::string out_path = req_out.empty() ? dir + "/request.bin" : req_out;
            store::write_file_atomic(out_path,
                                     std::string_view{reinterpret_cast<const char*>(bytes.data()),
                                                      bytes.size()});
            if (!sigma_out.empty()) store::save_signature(sigma_out, group, req.sigma);
            std::cout << "request written to " << out_path << "\n";
            return kOk;
        }

        if (*cmd_verify) {
            std::string in_path = req_in.empty() ? dir + "/request.bin" : req_in;
            auto bytes = read_binary(in_path);
            auto req = wire::decode_request(group, bytes);
            auto outcome = protocol::rsu_verify_request(group, hashes, sys.params, req, now, cfg.delta);
            std::cout << "verdict=" << protocol::verdict_name(outcome.verdict);
            if (outcome.verdict == protocol::Verdict::accept)
                std::cout << " th0=" << outcome.th0.v << " th1=" << outcome.th1.v;
            std::cout << "\n";
            return verdict_exit(outcome.verdict);
        }

        if (*cmd_track) {
            auto tcc = load_tcc(cfg, sys);
            std::string in_path = track_req.empty() ? dir + "/request.bin" : track_req;
            auto req = wire::decode_request(group, read_binary(in_path));
            auto res = protocol::track_vehicle(tcc, group, req, track_region, track_note);
            store::save_lsrb(dir + "/lsrb.txt", tcc.lsrb);
            std::cout << "tracked id=" << res.obu_id << " epoch=" << res.epoch_index
                      << " lsrb_version=" << res.lsrb_version << "\n";
            return kOk;
        }

        return kValidation;
    } catch (const Error& e) {
        std::cerr << "error [" << errc_name(e.code()) << "]: " << e.what() << "\n";
        return error_exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kValidation;
    }
}
