#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>
#include <unistd.h>

#include "iovauth/store.hpp"

// end-to-end checks of the command-line tool, driven through the shell
namespace fs = std::filesystem;

TEST_SUITE_BEGIN("cli");

namespace {

struct RunResult {
    int exit_code = -1;
    std::string out;
};

struct CliWorld {
    fs::path work;

    CliWorld() {
        work = fs::temp_directory_path() / ("iovauth-cli-" + std::to_string(::getpid()));
        fs::remove_all(work);
        fs::create_directories(work);
    }
    ~CliWorld() { fs::remove_all(work); }

    RunResult run(const std::string& args, bool raw = false) const {
        std::string out_file = (work / "cmd.out").string();
        std::string cmd = raw ? args + " >" + out_file
                              : std::string(IOVAUTH_BIN_PATH) + " " + args + " >" + out_file +
                                    " 2>&1";
        int status = std::system(cmd.c_str());
        RunResult r;
        r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
        std::ifstream in(out_file);
        std::ostringstream ss;
        ss << in.rdbuf();
        r.out = ss.str();
        return r;
    }

    std::string state(const char* name) const { return (work / "state" / name).string(); }
    std::string path(const char* name) const { return (work / name).string(); }

    RunResult in_state(const std::string& args) const {
        return run("--state-dir " + (work / "state").string() + " " + args);
    }
};

} // namespace

TEST_CASE("full pipeline: setup, register, epoch, sign, verify, track") {
    CliWorld w;
    CHECK(w.in_state("setup --params TINY --seed 1").exit_code == 0);
    CHECK(fs::exists(w.state("params.txt")));
    CHECK(fs::exists(w.state("master.txt")));

    CHECK(w.in_state("register-obu --id OBU-1 --seed 2").exit_code == 0);
    auto lslu = iovauth::store::read_file(w.state("lslu.txt"));
    CHECK(lslu.find("version 1") != std::string::npos);
    CHECK(lslu.find("entry ") != std::string::npos);

    // duplicate and revoked registrations are validation failures
    CHECK(w.in_state("register-obu --id OBU-1 --seed 3").exit_code == 1);

    CHECK(w.in_state("register-rsu --id RSU-1").exit_code == 0);
    CHECK(w.in_state("issue-epoch --region R1 --from 0 --to 2000 --seed 4").exit_code == 0);

    std::ofstream(w.path("road.bin")) << "pothole km 12";
    CHECK(w.in_state("sign --id OBU-1 --report " + w.path("road.bin") +
                     " --time 1000 --region R1 --seed 5 --sigma-out " + w.path("sigma.hex"))
              .exit_code == 0);
    CHECK(fs::exists(w.state("request.bin")));
    CHECK(fs::exists(w.path("sigma.hex")));

    auto ok = w.in_state("verify --time 1100 --delta 300");
    CHECK(ok.exit_code == 0);
    CHECK(ok.out.find("verdict=Accept") != std::string::npos);

    auto stale = w.in_state("verify --time 2000 --delta 300");
    CHECK(stale.exit_code == 3);
    CHECK(stale.out.find("verdict=Replay") != std::string::npos);

    auto tracked = w.in_state("track --region R1 --evidence complaint-42");
    CHECK(tracked.exit_code == 0);
    CHECK(tracked.out.find("tracked id=OBU-1") != std::string::npos);
    auto lsrb = iovauth::store::read_file(w.state("lsrb.txt"));
    CHECK(lsrb.find("version 1") != std::string::npos);
    CHECK(lsrb.find("complaint-42") != std::string::npos);

    // a revoked id cannot register again
    CHECK(w.in_state("register-obu --id OBU-1 --seed 9").exit_code == 1);
}

TEST_CASE("identical seeds give identical files") {
    CliWorld a, b;
    for (const CliWorld* w : {&a, &b}) {
        CHECK(w->in_state("setup --params TINY --seed 11").exit_code == 0);
        CHECK(w->in_state("register-obu --id OBU-1 --seed 12").exit_code == 0);
        CHECK(w->in_state("issue-epoch --region R1 --from 0 --to 2000 --seed 13").exit_code == 0);
        std::ofstream(w->path("r.bin")) << "same report";
        CHECK(w->in_state("sign --id OBU-1 --report " + w->path("r.bin") +
                          " --time 500 --region R1 --seed 14")
                  .exit_code == 0);
    }
    for (const char* f : {"params.txt", "master.txt", "lslu.txt", "epochs.txt", "request.bin"})
        CHECK(iovauth::store::read_file(a.state(f)) == iovauth::store::read_file(b.state(f)));
}

TEST_CASE("missing state names the absent file") {
    CliWorld w;
    auto r = w.in_state("verify --time 10");
    CHECK(r.exit_code == 2);
    CHECK(r.out.find("params.txt") != std::string::npos);
}

TEST_CASE("malformed hex in a state file is a parse error with an offset") {
    CliWorld w;
    CHECK(w.in_state("setup --params TINY --seed 1").exit_code == 0);
    CHECK(w.in_state("register-obu --id OBU-1 --seed 2").exit_code == 0);
    CHECK(w.in_state("issue-epoch --region R1 --from 0 --to 100 --seed 3").exit_code == 0);
    // corrupt the stored secret
    auto obu_file = w.state("obu_4f42552d31.txt");
    auto text = iovauth::store::read_file(obu_file);
    auto pos = text.find("x ");
    text[pos + 2] = 'z';
    iovauth::store::write_file_atomic(obu_file, text);
    std::ofstream(w.path("r.bin")) << "x";
    auto r = w.in_state("sign --id OBU-1 --report " + w.path("r.bin") + " --time 50 --region R1");
    CHECK(r.exit_code == 2);
    CHECK(r.out.find("offset") != std::string::npos);
}

TEST_CASE("setup rejects invalid custom toy parameters") {
    CliWorld w;
    auto r = w.in_state("setup --params custom --q 12 --p 23 --g0 2");
    CHECK(r.exit_code == 1);
    CHECK(r.out.find("not prime") != std::string::npos);
    CHECK(w.in_state("setup --params custom --q 11 --p 23 --g0 2").exit_code == 0);
}

TEST_CASE("epoch issuance refuses overlapping windows") {
    CliWorld w;
    CHECK(w.in_state("setup --params TINY --seed 1").exit_code == 0);
    CHECK(w.in_state("issue-epoch --region R1 --from 0 --to 100").exit_code == 0);
    CHECK(w.in_state("issue-epoch --region R1 --from 50 --to 150").exit_code == 1);
    CHECK(w.in_state("issue-epoch --region R1 --length 100").exit_code == 0);
    auto epochs = iovauth::store::read_file(w.state("epochs.txt"));
    CHECK(epochs.find("epoch R1 1 100 200") != std::string::npos);
}

TEST_CASE("sign without a covering epoch fails with a clear message") {
    CliWorld w;
    CHECK(w.in_state("setup --params TINY --seed 1").exit_code == 0);
    CHECK(w.in_state("register-obu --id OBU-1 --seed 2").exit_code == 0);
    std::ofstream(w.path("r.bin")) << "x";
    auto r = w.in_state("sign --id OBU-1 --report " + w.path("r.bin") + " --time 99 --region R1");
    CHECK(r.exit_code == 1);
    CHECK(r.out.find("no epoch") != std::string::npos);
}

TEST_CASE("config file supplies defaults, via flag or environment") {
    CliWorld w;
    {
        std::ofstream cfg(w.path("iov.cfg"));
        cfg << "# tool defaults\n"
            << "state_dir " << (w.work / "state").string() << "\n"
            << "regions R1,R2\n"
            << "delta 120\n";
    }
    std::string with_cfg = "--config " + w.path("iov.cfg") + " ";
    CHECK(w.run(with_cfg + "setup --params TINY --seed 1").exit_code == 0);
    CHECK(fs::exists(w.state("params.txt")));
    CHECK(w.run(with_cfg + "register-obu --id OBU-1 --seed 2").exit_code == 0);
    CHECK(w.run(with_cfg + "issue-epoch --region R1 --from 0 --to 900").exit_code == 0);
    std::ofstream(w.path("r.bin")) << "x";
    // no --region: the first configured region applies
    CHECK(w.run(with_cfg + "sign --id OBU-1 --report " + w.path("r.bin") + " --time 100 --seed 3")
              .exit_code == 0);
    // configured delta = 120: now - T = 150 is already a replay
    CHECK(w.run(with_cfg + "verify --time 250").exit_code == 3);

    // same config through the environment variable
    auto env = w.run("IOVAUTH_CONFIG=" + w.path("iov.cfg") + " " + std::string(IOVAUTH_BIN_PATH) +
                         " verify --time 150" + " >/dev/null 2>&1; echo -n $?",
                     true);
    CHECK(env.out == "0");
}

TEST_CASE("a corrupted request file is a parse error with an offset") {
    CliWorld w;
    CHECK(w.in_state("setup --params TINY --seed 1").exit_code == 0);
    CHECK(w.in_state("register-obu --id OBU-1 --seed 2").exit_code == 0);
    CHECK(w.in_state("issue-epoch --region R1 --from 0 --to 200").exit_code == 0);
    std::ofstream(w.path("r.bin")) << "x";
    CHECK(w.in_state("sign --id OBU-1 --report " + w.path("r.bin") + " --time 50 --region R1")
              .exit_code == 0);
    auto req = iovauth::store::read_file(w.state("request.bin"));
    req.resize(req.size() - 2);
    iovauth::store::write_file_atomic(w.state("request.bin"), req);
    auto r = w.in_state("verify --time 60");
    CHECK(r.exit_code == 2);
    CHECK(r.out.find("offset") != std::string::npos);
}

TEST_CASE("simulate runs scenario files deterministically") {
    CliWorld w;
    std::string scn = std::string(IOVAUTH_SCENARIO_DIR) + "/baseline.scn";
    auto once = w.run("simulate --scenario " + scn + " --transcript " + w.path("t1.log") +
                      " --summary " + w.path("s1.json"));
    CHECK(once.exit_code == 0);
    auto twice = w.run("simulate --scenario " + scn + " --transcript " + w.path("t2.log") +
                       " --summary " + w.path("s2.json"));
    CHECK(twice.exit_code == 0);
    CHECK(iovauth::store::read_file(w.path("t1.log")) ==
          iovauth::store::read_file(w.path("t2.log")));
    CHECK(iovauth::store::read_file(w.path("s1.json")) ==
          iovauth::store::read_file(w.path("s2.json")));
    CHECK(iovauth::store::read_file(w.path("s1.json")).find("\"Accept\": 5") != std::string::npos);
}

TEST_CASE("cost-model prints the comparison and writes CSV tables") {
    CliWorld w;
    auto r = w.run("cost-model --csv-cost " + w.path("cost.csv") + " --csv-scaling " +
                   w.path("scaling.csv") + " --scaling 100");
    CHECK(r.exit_code == 0);
    auto csv = iovauth::store::read_file(w.path("cost.csv"));
    CHECK(csv.find("Ours,20.12,42.06,62.18") != std::string::npos);
    auto scaling = iovauth::store::read_file(w.path("scaling.csv"));
    CHECK(scaling.find("100,Ours,4206.00") != std::string::npos);
}

TEST_CASE("bench --ops-only prints the op profile without timing") {
    CliWorld w;
    auto r = w.run("bench --ops-only");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("clss_sign: PP=0 M=2 E=0 H=0") != std::string::npos);
    CHECK(r.out.find("clss_verify: PP=1 M=3 E=0 H=0") != std::string::npos);
    CHECK(r.out.find("wall-clock") == std::string::npos);
}

TEST_SUITE_END();
