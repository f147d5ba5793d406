#include <doctest.h>

#include <filesystem>
#include <unistd.h>

#include "iovauth/store.hpp"

using namespace iovauth;
namespace fs = std::filesystem;

TEST_SUITE_BEGIN("store");

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("iovauth-store-" + std::to_string(::getpid()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const char* name) const { return (path / name).string(); }
};

} // namespace

TEST_CASE("hex round-trips and rejects bad digits with offsets") {
    std::vector<uint8_t> bytes{0x00, 0x7f, 0xff, 0x1a};
    CHECK(store::to_hex(bytes) == "007fff1a");
    CHECK(store::from_hex("007fff1a") == bytes);
    CHECK_THROWS_WITH_AS(store::from_hex("0g"), doctest::Contains("offset 1"), Error);
    CHECK_THROWS_WITH_AS(store::from_hex("abc"), doctest::Contains("odd length"), Error);
}

TEST_CASE("atomic write leaves no temp file behind") {
    TempDir dir;
    store::write_file_atomic(dir.file("a.txt"), "hello\n");
    CHECK(store::read_file(dir.file("a.txt")) == "hello\n");
    CHECK_FALSE(fs::exists(dir.file("a.txt.tmp")));
    store::write_file_atomic(dir.file("a.txt"), "replaced\n");
    CHECK(store::read_file(dir.file("a.txt")) == "replaced\n");
    CHECK_THROWS_WITH_AS(store::read_file(dir.file("nope.txt")), doctest::Contains("nope.txt"),
                         Error);
}

TEST_CASE("system params round-trip and revalidate on load") {
    TempDir dir;
    ToyGroup g = ToyGroup::tiny();
    Rng rng(1);
    auto setup = clss::setup(g, rng);
    store::save_params(dir.file("params.txt"), g, setup.params);
    auto sys = store::load_params(dir.file("params.txt"));
    CHECK(sys.params.ppub1 == setup.params.ppub1);
    CHECK(sys.params.ppub2 == setup.params.ppub2);
    CHECK(sys.group.params().q == 11);

    // a forged ppub2 fails the linking invariant
    auto text = store::read_file(dir.file("params.txt"));
    auto pos = text.find("ppub2");
    text = text.substr(0, pos) + "ppub2 01\n";
    store::write_file_atomic(dir.file("bad.txt"), text);
    CHECK_THROWS_WITH_AS(store::load_params(dir.file("bad.txt")),
                         doctest::Contains("Ppub2"), Error);
}

TEST_CASE("key material round-trips bit-exactly") {
    TempDir dir;
    ToyGroup g = ToyGroup::medium();
    Sha256Hashes h(g);
    Rng rng(2);
    auto setup = clss::setup(g, rng);
    store::save_master(dir.file("master.txt"), g, setup.master);
    CHECK(store::load_master(dir.file("master.txt"), g).s == setup.master.s);

    auto sv = clss::set_secret_value(g, rng);
    auto ppk = clss::extract_partial_key(g, h, setup.master, "OBU one", sv.pk1, rng);
    auto kp = clss::assemble_keys(g, sv.x, sv.pk1, ppk);
    protocol::ObuKeys keys{kp.sk, kp.pk};
    store::save_obu_keys(dir.file("obu.txt"), g, "OBU one", keys);
    auto back = store::load_obu_keys(dir.file("obu.txt"), g);
    CHECK(back.id == "OBU one"); // ids may contain spaces, hex framing keeps them intact
    CHECK(back.keys.sk.x == keys.sk.x);
    CHECK(back.keys.sk.partial == keys.sk.partial);
    CHECK(back.keys.pk == keys.pk);

    protocol::TccState tcc{setup.master, setup.params, {}, {}, {}};
    auto reg = protocol::register_rsu(tcc, g, h, "RSU-1");
    store::save_rsu_key(dir.file("rsu.txt"), g, "RSU-1", reg.key);
    auto rback = store::load_rsu_key(dir.file("rsu.txt"), g);
    CHECK(rback.id == "RSU-1");
    CHECK(rback.key == reg.key);
}

TEST_CASE("user and revocation lists keep versions and entries") {
    TempDir dir;
    ToyGroup g = ToyGroup::tiny();
    protocol::LegitUserList lslu;
    lslu.version = 3;
    lslu.entries.push_back({"OBU-1", G2{18}, 42});
    lslu.entries.push_back({"OBU two", G2{2}, 43});
    store::save_lslu(dir.file("lslu.txt"), g, lslu);
    auto lback = store::load_lslu(dir.file("lslu.txt"), g);
    CHECK(lback.version == 3);
    REQUIRE(lback.entries.size() == 2);
    CHECK(lback.entries[1].id == "OBU two");
    CHECK(lback.entries[1].pk1 == G2{2});
    CHECK(lback.entries[0].registered_at == 42);

    protocol::RevocationList lsrb;
    lsrb.add("OBU-1", "report#7");
    store::save_lsrb(dir.file("lsrb.txt"), lsrb);
    auto rback = store::load_lsrb(dir.file("lsrb.txt"));
    CHECK(rback.version == 1);
    CHECK(rback.contains("OBU-1"));
    CHECK(rback.entries[0].evidence == "report#7");
}

TEST_CASE("epoch archive round-trips with indices and windows") {
    TempDir dir;
    ToyGroup g = ToyGroup::medium();
    Rng rng(3);
    protocol::TccState tcc;
    tcc.params.group = g.params();
    protocol::issue_regional_epoch(tcc, g, "R1", 0, 100, rng);
    protocol::issue_regional_epoch(tcc, g, "R1", 100, 200, rng);
    protocol::issue_regional_epoch(tcc, g, "R2", 0, 50, rng);
    store::save_epochs(dir.file("epochs.txt"), g, tcc.archive);
    auto back = store::load_epochs(dir.file("epochs.txt"), g);
    CHECK(back.count("R1") == 2);
    CHECK(back.count("R2") == 1);
    const auto* e = back.find("R1", 150);
    REQUIRE(e != nullptr);
    CHECK(e->index == 1);
    CHECK(e->enc_sk == tcc.archive.find("R1", 150)->enc_sk);
}

TEST_CASE("signature files are a single hex element") {
    TempDir dir;
    ToyGroup g = ToyGroup::tiny();
    store::save_signature(dir.file("sig.hex"), g, G1{8});
    CHECK(store::read_file(dir.file("sig.hex")) == "08\n");
    CHECK(store::load_signature(dir.file("sig.hex"), g) == G1{8});
}

TEST_CASE("record parsing flags missing fields and bad integers") {
    TempDir dir;
    store::write_file_atomic(dir.file("m.txt"), "nonsense 12\n");
    ToyGroup g = ToyGroup::tiny();
    CHECK_THROWS_WITH_AS(store::load_master(dir.file("m.txt"), g), doctest::Contains("missing"),
                         Error);
    store::write_file_atomic(dir.file("p.txt"), "backend toy\nq eleven\np 23\ng0 2\n");
    CHECK_THROWS_WITH_AS(store::load_params(dir.file("p.txt")),
                         doctest::Contains("not an integer"), Error);
}

TEST_SUITE_END();
