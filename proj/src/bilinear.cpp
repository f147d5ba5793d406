#include "iovauth/bilinear.hpp"

#include <bit>

#include "iovauth/hashes.hpp"

namespace iovauth {

const char* errc_name(Errc code) {
    switch (code) {
    case Errc::invalid_params: return "InvalidParams";
    case Errc::invalid_element: return "InvalidElement";
    case Errc::non_invertible: return "NonInvertible";
    case Errc::degenerate_challenge: return "DegenerateChallenge";
    case Errc::degenerate_identity: return "DegenerateIdentity";
    case Errc::already_registered: return "AlreadyRegistered";
    case Errc::revoked: return "Revoked";
    case Errc::overlapping_epoch: return "OverlappingEpoch";
    case Errc::untraceable_epoch: return "UntraceableEpoch";
    case Errc::bad_pseudonym: return "BadPseudonym";
    case Errc::script_exhausted: return "ScriptExhausted";
    case Errc::parse_error: return "ParseError";
    case Errc::io_error: return "IoError";
    }
    return "Unknown";
}

uint64_t mulmod_u64(uint64_t a, uint64_t b, uint64_t m) {
    return static_cast<uint64_t>((static_cast<__uint128_t>(a) * b) % m);
}

uint64_t powmod_u64(uint64_t b, uint64_t e, uint64_t m) {
    uint64_t r = 1 % m;
    b %= m;
    while (e) {
        if (e & 1) r = mulmod_u64(r, b, m);
        b = mulmod_u64(b, b, m);
        e >>= 1;
    }
    return r;
}

bool is_prime_u64(uint64_t n) {
    if (n < 2) return false;
    for (uint64_t d : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        if (n % d == 0) return n == d;
    }
    uint64_t d = n - 1;
    int r = 0;
    while ((d & 1) == 0) { d >>= 1; ++r; }
    // deterministic witness set for all 64-bit n
    for (uint64_t a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        uint64_t x = powmod_u64(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int i = 1; i < r; ++i) {
            x = mulmod_u64(x, x, n);
            if (x == n - 1) { composite = false; break; }
        }
        if (composite) return false;
    }
    return true;
}

static size_t byte_width(uint64_t v) {
    return (std::bit_width(v) + 7) / 8;
}

static std::vector<uint8_t> encode_be(uint64_t v, size_t width) {
    std::vector<uint8_t> out(width);
    for (size_t i = 0; i < width; ++i)
        out[width - 1 - i] = static_cast<uint8_t>(v >> (8 * i));
    return out;
}

static uint64_t decode_be(std::span<const uint8_t> in) {
    uint64_t v = 0;
    for (uint8_t b : in) v = (v << 8) | b;
    return v;
}

// ---- scalar field ----

Scalar Group::scalar_add(Scalar a, Scalar b) const {
    uint64_t q = params().q;
    uint64_t s = a.v + b.v; // q < 2^63, no overflow
    if (s >= q) s -= q;
    return Scalar{s};
}

Scalar Group::scalar_sub(Scalar a, Scalar b) const {
    return scalar_add(a, scalar_neg(b));
}

Scalar Group::scalar_mul(Scalar a, Scalar b) const {
    return Scalar{mulmod_u64(a.v, b.v, params().q)};
}

Scalar Group::scalar_neg(Scalar a) const {
    return Scalar{a.v == 0 ? 0 : params().q - a.v};
}

Scalar Group::scalar_inv(Scalar a) const {
    if (a.v == 0) throw Error(Errc::non_invertible, "scalar_inv: zero has no inverse");
    return Scalar{powmod_u64(a.v, params().q - 2, params().q)};
}

Scalar Group::scalar_from_u64(uint64_t v) const {
    return Scalar{v % params().q};
}

// ---- toy backend ----

ToyGroup toy_setup(uint64_t q, uint64_t p, uint64_t g0) {
    if (!is_prime_u64(q)) throw Error(Errc::invalid_params, "toy_setup: q is not prime");
    if (!is_prime_u64(p)) throw Error(Errc::invalid_params, "toy_setup: p is not prime");
    if ((p - 1) % q != 0) throw Error(Errc::invalid_params, "toy_setup: q does not divide p-1");
    if (q >= (1ull << 63)) throw Error(Errc::invalid_params, "toy_setup: q too large");
    uint64_t g = g0 % p;
    if (g == 0) throw Error(Errc::invalid_params, "toy_setup: g0 is the zero residue");
    if (g == 1) throw Error(Errc::invalid_params, "toy_setup: g0 has trivial order");
    if (powmod_u64(g, q, p) != 1) throw Error(Errc::invalid_params, "toy_setup: g0^q != 1 mod p");
    return ToyGroup(q, p, g0);
}

ToyGroup ToyGroup::tiny() { return ToyGroup(11, 23, 2); }

ToyGroup ToyGroup::medium() {
    // 63-bit prime q with p = 2q+1 prime and g0 of order q mod p,
    // pinned from a one-off primality search
    return ToyGroup(4611686018427389243ull, 9223372036854778487ull, 4);
}

ToyGroup::ToyGroup(uint64_t q, uint64_t p, uint64_t g0) {
    params_.q = q;
    params_.p = p;
    params_.g0 = g0 % p;
    params_.P = G1{1 % q};
    params_.g = G2{params_.g0}; // e(P, P) = g0^1
    params_.backend = BackendId::toy;
    qw_ = byte_width(q);
    pw_ = byte_width(p);
}

G1 ToyGroup::g1_mul(Scalar k, const G1& a) const {
    return G1{mulmod_u64(k.v, a.v, params_.q)};
}

G1 ToyGroup::g1_add(const G1& a, const G1& b) const {
    uint64_t s = a.v + b.v;
    if (s >= params_.q) s -= params_.q;
    return G1{s};
}

G1 ToyGroup::g1_neg(const G1& a) const {
    return G1{a.v == 0 ? 0 : params_.q - a.v};
}

G1 ToyGroup::map_to_point(std::span<const uint8_t> data) const {
    uint64_t s = digest_to_nonzero_residue(0x12, data, params_.q);
    return G1{mulmod_u64(s, params_.P.v, params_.q)};
}

G2 ToyGroup::pair(const G1& a, const G1& b) const {
    return G2{powmod_u64(params_.g0, mulmod_u64(a.v, b.v, params_.q), params_.p)};
}

G2 ToyGroup::g2_exp(const G2& b, Scalar k) const {
    return G2{powmod_u64(b.v, k.v, params_.p)};
}

G2 ToyGroup::g2_mul(const G2& a, const G2& b) const {
    return G2{mulmod_u64(a.v, b.v, params_.p)};
}

std::vector<uint8_t> ToyGroup::encode_scalar(Scalar k) const { return encode_be(k.v, qw_); }
std::vector<uint8_t> ToyGroup::encode_g1(const G1& a) const { return encode_be(a.v, qw_); }
std::vector<uint8_t> ToyGroup::encode_g2(const G2& a) const { return encode_be(a.v, pw_); }

Scalar ToyGroup::decode_scalar(std::span<const uint8_t> in) const {
    if (in.size() != qw_) throw Error(Errc::invalid_element, "decode_scalar: bad width");
    uint64_t v = decode_be(in);
    if (v >= params_.q) throw Error(Errc::invalid_element, "decode_scalar: value >= q");
    return Scalar{v};
}

G1 ToyGroup::decode_g1(std::span<const uint8_t> in) const {
    if (in.size() != qw_) throw Error(Errc::invalid_element, "decode_g1: bad width");
    uint64_t v = decode_be(in);
    if (v >= params_.q) throw Error(Errc::invalid_element, "decode_g1: not a group member");
    return G1{v};
}

G2 ToyGroup::decode_g2(std::span<const uint8_t> in) const {
    if (in.size() != pw_) throw Error(Errc::invalid_element, "decode_g2: bad width");
    uint64_t v = decode_be(in);
    if (v == 0 || v >= params_.p || powmod_u64(v, params_.q, params_.p) != 1)
        throw Error(Errc::invalid_element, "decode_g2: not in the order-q subgroup");
    return G2{v};
}

// ---- randomness ----

void Rng::fill(std::span<uint8_t> out) {
    size_t i = 0;
    while (i < out.size()) {
        uint64_t w = eng_();
        for (int b = 0; b < 8 && i < out.size(); ++b, ++i)
            out[i] = static_cast<uint8_t>(w >> (8 * b));
    }
}

Scalar random_scalar(Rng& rng, const Group& g) {
    uint64_t q = g.params().q;
    int bits = std::bit_width(q);
    uint64_t mask = (bits >= 64) ? ~0ull : ((1ull << bits) - 1);
    for (;;) {
        uint64_t v = rng.next_u64() & mask;
        if (v != 0 && v < q) return Scalar{v};
    }
}

} // namespace iovauth
