#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <set>

#include "iovauth/hashes.hpp"

using namespace iovauth;

TEST_SUITE_BEGIN("bilinear");

TEST_CASE("toy_setup accepts the tiny parameters") {
    ToyGroup g = toy_setup(11, 23, 2);
    CHECK(g.params().q == 11);
    CHECK(g.params().p == 23);
    CHECK(g.params().P == G1{1});
    CHECK(g.params().g == G2{2});
    CHECK(g.pair(g.params().P, g.params().P) == g.params().g);
}

TEST_CASE("toy_setup rejects bad parameters") {
    CHECK_THROWS_WITH_AS(toy_setup(11, 23, 1), doctest::Contains("trivial order"), Error);
    CHECK_THROWS_WITH_AS(toy_setup(7, 23, 2), doctest::Contains("does not divide"), Error);
    CHECK_THROWS_AS(toy_setup(12, 23, 2), Error); // q composite
    CHECK_THROWS_AS(toy_setup(11, 22, 2), Error); // p composite
    CHECK_THROWS_AS(toy_setup(11, 23, 0), Error);
    CHECK_THROWS_AS(toy_setup(11, 23, 23), Error); // zero residue
}

TEST_CASE("medium parameters pass the same validation") {
    ToyGroup m = ToyGroup::medium();
    ToyGroup validated = toy_setup(m.params().q, m.params().p, m.params().g0);
    CHECK(validated.params().q == m.params().q);
    CHECK(is_prime_u64(m.params().q));
    CHECK(is_prime_u64(m.params().p));
    CHECK((m.params().p - 1) % m.params().q == 0);
}

TEST_CASE("pairing worked examples") {
    ToyGroup g = ToyGroup::tiny();
    CHECK(g.pair(G1{3}, G1{4}) == G2{2});       // 2^(12 mod 11) mod 23
    CHECK(g.pair(G1{0}, G1{4}) == g.g2_one());  // bilinearity at zero
    CHECK(g.pair(g.g1_mul(Scalar{2}, G1{3}), G1{4}) == g.g2_exp(g.pair(G1{3}, G1{4}), Scalar{2}));
}

TEST_CASE("bilinearity exhaustive over the tiny group") {
    ToyGroup g = ToyGroup::tiny();
    for (uint64_t a = 0; a < 11; ++a)
        for (uint64_t b = 0; b < 11; ++b)
            for (uint64_t x = 0; x < 11; ++x)
                for (uint64_t y = 0; y < 11; ++y) {
                    G2 lhs = g.pair(g.g1_mul(Scalar{x}, G1{a}), g.g1_mul(Scalar{y}, G1{b}));
                    G2 rhs = g.g2_exp(g.pair(G1{a}, G1{b}), g.scalar_mul(Scalar{x}, Scalar{y}));
                    REQUIRE(lhs == rhs);
                }
}

TEST_CASE("bilinearity randomized at medium size") {
    ToyGroup g = ToyGroup::medium();
    Rng rng(7);
    for (int i = 0; i < 200; ++i) {
        G1 a{random_scalar(rng, g).v}, b{random_scalar(rng, g).v};
        Scalar x = random_scalar(rng, g), y = random_scalar(rng, g);
        CHECK(g.pair(g.g1_mul(x, a), g.g1_mul(y, b)) ==
              g.g2_exp(g.pair(a, b), g.scalar_mul(x, y)));
    }
}

TEST_CASE("non-degeneracy: pair(P,P) has order exactly q") {
    for (ToyGroup g : {ToyGroup::tiny(), ToyGroup::medium()}) {
        G2 gg = g.pair(g.params().P, g.params().P);
        CHECK(gg != g.g2_one());
        CHECK(g.g2_exp(gg, Scalar{0}) == g.g2_one());
        CHECK(powmod_u64(gg.v, g.params().q, g.params().p) == 1);
    }
}

TEST_CASE("group op examples") {
    ToyGroup g = ToyGroup::tiny();
    CHECK(g.g1_mul(Scalar{5}, G1{7}) == G1{2}); // 35 mod 11
    CHECK(g.g1_mul(Scalar{1}, G1{9}) == G1{9});
    CHECK(g.g2_exp(G2{18}, Scalar{5}) == G2{3}); // 18^5 mod 23
    CHECK(g.g1_add(G1{9}, G1{5}) == G1{3});
    CHECK(g.g1_add(G1{4}, g.g1_neg(G1{4})) == g.g1_zero());
}

TEST_CASE("scalar field laws, exhaustive for q=11") {
    ToyGroup g = ToyGroup::tiny();
    CHECK(g.scalar_inv(Scalar{4}) == Scalar{3});
    CHECK(g.scalar_inv(Scalar{5}) == Scalar{9}); // brute force: 5*9 = 45 = 1 mod 11
    CHECK_THROWS_WITH_AS(g.scalar_inv(Scalar{0}), doctest::Contains("no inverse"), Error);
    for (uint64_t a = 0; a < 11; ++a) {
        for (uint64_t b = 0; b < 11; ++b) {
            CHECK(g.scalar_add(Scalar{a}, Scalar{b}).v == (a + b) % 11);
            CHECK(g.scalar_mul(Scalar{a}, Scalar{b}).v == (a * b) % 11);
            for (uint64_t c = 0; c < 11; ++c) {
                // associativity and distributivity
                CHECK(g.scalar_mul(Scalar{a}, g.scalar_mul(Scalar{b}, Scalar{c})) ==
                      g.scalar_mul(g.scalar_mul(Scalar{a}, Scalar{b}), Scalar{c}));
                CHECK(g.scalar_mul(Scalar{a}, g.scalar_add(Scalar{b}, Scalar{c})) ==
                      g.scalar_add(g.scalar_mul(Scalar{a}, Scalar{b}),
                                   g.scalar_mul(Scalar{a}, Scalar{c})));
            }
        }
        if (a != 0) CHECK(g.scalar_mul(Scalar{a}, g.scalar_inv(Scalar{a})) == Scalar{1});
    }
}

TEST_CASE("encoding round-trips for all element kinds") {
    for (ToyGroup g : {ToyGroup::tiny(), ToyGroup::medium()}) {
        Rng rng(11);
        for (int i = 0; i < 100; ++i) {
            Scalar s = random_scalar(rng, g);
            CHECK(g.decode_scalar(g.encode_scalar(s)) == s);
            G1 a{random_scalar(rng, g).v};
            CHECK(g.decode_g1(g.encode_g1(a)) == a);
            G2 b = g.g2_exp(g.params().g, random_scalar(rng, g));
            CHECK(g.decode_g2(g.encode_g2(b)) == b);
        }
        CHECK(g.decode_g1(g.encode_g1(g.g1_zero())) == g.g1_zero());
    }
}

TEST_CASE("decoding rejects out-of-group values") {
    ToyGroup g = ToyGroup::tiny();
    std::vector<uint8_t> wide{0x00, 0x01};
    CHECK_THROWS_AS(g.decode_scalar(wide), Error);       // width mismatch
    std::vector<uint8_t> big{13};
    CHECK_THROWS_AS(g.decode_scalar(big), Error);        // >= q
    CHECK_THROWS_AS(g.decode_g1(big), Error);
    std::vector<uint8_t> nonmember{5};                   // 5^11 mod 23 != 1
    CHECK_THROWS_AS(g.decode_g2(nonmember), Error);
    std::vector<uint8_t> zero{0};
    CHECK_THROWS_AS(g.decode_g2(zero), Error);
    CHECK(g.decode_g2(std::vector<uint8_t>{1}) == g.g2_one());
}

TEST_CASE("hash_to_scalar is deterministic and domain-separated") {
    ToyGroup g = ToyGroup::medium();
    Sha256Hashes h(g);
    auto in = HashInput(g).add_str("OBU-1").add_scalar(Scalar{42});
    Scalar a = h.hash(HashDomain::h0, in);
    Scalar b = h.hash(HashDomain::h0, in);
    CHECK(a == b);
    CHECK(a.v >= 1);
    CHECK(a.v < g.params().q);

    // same bytes under different domains: no collisions expected at 63-bit q
    Rng rng(3);
    int collisions = 0;
    for (int i = 0; i < 1000; ++i) {
        auto probe = HashInput(g).add_u64(rng.next_u64());
        if (h.hash(HashDomain::h0, probe) == h.hash(HashDomain::h1, probe)) ++collisions;
    }
    CHECK(collisions == 0);
}

TEST_CASE("hash_to_scalar stays nonzero at tiny q") {
    ToyGroup g = ToyGroup::tiny();
    Sha256Hashes h(g);
    for (uint64_t i = 0; i < 2000; ++i) {
        Scalar s = h.hash(HashDomain::h2, HashInput(g).add_u64(i));
        CHECK(s.v >= 1);
        CHECK(s.v < 11);
    }
}

TEST_CASE("scripted oracle pops per-domain FIFOs and errors when exhausted") {
    ToyGroup g = ToyGroup::tiny();
    ScriptedHashes h(g);
    h.preload(HashDomain::h0, 4);
    h.preload(HashDomain::h0, 7);
    h.preload(HashDomain::h1, 5);
    auto in = HashInput(g).add_str("ignored");
    CHECK(h.hash(HashDomain::h0, in) == Scalar{4});
    CHECK(h.hash(HashDomain::h1, in) == Scalar{5});
    CHECK(h.hash(HashDomain::h0, in) == Scalar{7});
    CHECK_THROWS_WITH_AS(h.hash(HashDomain::h0, in), doctest::Contains("exhausted"), Error);
    CHECK_THROWS_AS(h.preload(HashDomain::h0, 0), Error);  // outside [1, q)
    CHECK_THROWS_AS(h.preload(HashDomain::h0, 11), Error);
}

TEST_CASE("scripted oracle loads from plain text") {
    ToyGroup g = ToyGroup::tiny();
    auto h = ScriptedHashes::from_text(g, "# vectors\nH0 4\nH1 5\nH2 3\nH3 2\n");
    CHECK(h.remaining(HashDomain::h0) == 1);
    CHECK(h.hash(HashDomain::h3, HashInput(g)) == Scalar{2});
    CHECK_THROWS_AS(ScriptedHashes::from_text(g, "H9 1\n"), Error);
    CHECK_THROWS_AS(ScriptedHashes::from_text(g, "H0\n"), Error);
}

TEST_CASE("scripted oracle loads vector files") {
    ToyGroup g = ToyGroup::tiny();
    std::string path = "/tmp/iovauth-oracle-test.txt";
    {
        std::ofstream out(path);
        out << "H0 4\nH4 9\n";
    }
    auto h = ScriptedHashes::from_file(g, path);
    CHECK(h.hash(HashDomain::h0, HashInput(g)) == Scalar{4});
    CHECK(h.hash(HashDomain::h4, HashInput(g)) == Scalar{9});
    std::remove(path.c_str());
    CHECK_THROWS_WITH_AS(ScriptedHashes::from_file(g, "/tmp/does-not-exist-iovauth.txt"),
                         doctest::Contains("cannot open"), Error);
}

TEST_CASE("random_scalar is reproducible, nonzero and in range") {
    ToyGroup g = ToyGroup::tiny();
    Rng a(99), b(99);
    for (int i = 0; i < 1000; ++i) CHECK(random_scalar(a, g) == random_scalar(b, g));
    Rng c(1);
    for (int i = 0; i < 100000; ++i) {
        Scalar s = random_scalar(c, g);
        REQUIRE(s.v >= 1);
        REQUIRE(s.v < 11);
    }
}

TEST_CASE("random_scalar chi-square uniformity at q=11") {
    ToyGroup g = ToyGroup::tiny();
    Rng rng(42);
    const int draws = 100000;
    std::array<int, 10> bins{};
    for (int i = 0; i < draws; ++i) ++bins[random_scalar(rng, g).v - 1];
    double expected = draws / 10.0;
    double chi2 = 0;
    for (int o : bins) chi2 += (o - expected) * (o - expected) / expected;
    // df = 9, alpha = 0.01
    CHECK(chi2 < 21.666);
}

TEST_CASE("map_to_point lands in G1 and is counted separately") {
    ToyGroup g = ToyGroup::medium();
    std::vector<uint8_t> data{1, 2, 3};
    G1 a = g.map_to_point(data);
    CHECK(a.v < g.params().q);
    CHECK(a == g.map_to_point(data));
}

TEST_SUITE_END();
