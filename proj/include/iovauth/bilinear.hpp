#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "iovauth/errors.hpp"

namespace iovauth {

// Strong value types for the three algebraic domains. Raw storage is a
// 64-bit residue; how it is interpreted belongs to the Group backend.
struct Scalar {
    uint64_t v = 0;
    bool operator==(const Scalar&) const = default;
};

struct G1 {
    uint64_t v = 0;
    bool operator==(const G1&) const = default;
};

struct G2 {
    uint64_t v = 0;
    bool operator==(const G2&) const = default;
};

enum class BackendId { toy, production };

struct GroupParams {
    uint64_t q = 0; // prime order of G1, G2 and the scalar field
    uint64_t p = 0; // toy backend modulus, q | p-1
    uint64_t g0 = 0; // toy base of the pairing, order q mod p
    G1 P;            // G1 generator
    G2 g;            // e(P, P)
    BackendId backend = BackendId::toy;
};

// Symmetric bilinear group provider. All operations are pure; a backend
// object is safe to share across threads.
class Group {
public:
    virtual ~Group() = default;

    virtual const GroupParams& params() const = 0;

    // G1 (additive, order q)
    virtual G1 g1_mul(Scalar k, const G1& a) const = 0;
    virtual G1 g1_add(const G1& a, const G1& b) const = 0;
    virtual G1 g1_neg(const G1& a) const = 0;
    virtual G1 g1_zero() const = 0;
    virtual G1 map_to_point(std::span<const uint8_t> data) const = 0;

    // pairing and G2 (multiplicative, order q)
    virtual G2 pair(const G1& a, const G1& b) const = 0;
    virtual G2 g2_exp(const G2& b, Scalar k) const = 0;
    virtual G2 g2_mul(const G2& a, const G2& b) const = 0;
    virtual G2 g2_one() const = 0;

    // canonical encodings: big-endian, fixed width
    virtual size_t scalar_width() const = 0;
    virtual size_t g1_width() const = 0;
    virtual size_t g2_width() const = 0;
    virtual std::vector<uint8_t> encode_scalar(Scalar k) const = 0;
    virtual std::vector<uint8_t> encode_g1(const G1& a) const = 0;
    virtual std::vector<uint8_t> encode_g2(const G2& a) const = 0;
    virtual Scalar decode_scalar(std::span<const uint8_t> in) const = 0;
    virtual G1 decode_g1(std::span<const uint8_t> in) const = 0;
    virtual G2 decode_g2(std::span<const uint8_t> in) const = 0;

    // scalar field mod q
    Scalar scalar_add(Scalar a, Scalar b) const;
    Scalar scalar_sub(Scalar a, Scalar b) const;
    Scalar scalar_mul(Scalar a, Scalar b) const;
    Scalar scalar_neg(Scalar a) const;
    Scalar scalar_inv(Scalar a) const; // throws non_invertible on zero
    Scalar scalar_from_u64(uint64_t v) const;
};

// Insecure toy backend: G1 is (Z_q, +) with P = 1, G2 is the order-q
// subgroup of units mod p, e(a, b) = g0^(a*b mod q) mod p.
class ToyGroup final : public Group {
public:
    static ToyGroup tiny();   // q=11, p=23, g0=2 (worked desk vectors)
    static ToyGroup medium(); // 63-bit q (statistical and soundness tests)

    ToyGroup(uint64_t q, uint64_t p, uint64_t g0);

    const GroupParams& params() const override { return params_; }

    G1 g1_mul(Scalar k, const G1& a) const override;
    G1 g1_add(const G1& a, const G1& b) const override;
    G1 g1_neg(const G1& a) const override;
    G1 g1_zero() const override { return G1{0}; }
    G1 map_to_point(std::span<const uint8_t> data) const override;

    G2 pair(const G1& a, const G1& b) const override;
    G2 g2_exp(const G2& b, Scalar k) const override;
    G2 g2_mul(const G2& a, const G2& b) const override;
    G2 g2_one() const override { return G2{1}; }

    size_t scalar_width() const override { return qw_; }
    size_t g1_width() const override { return qw_; }
    size_t g2_width() const override { return pw_; }
    std::vector<uint8_t> encode_scalar(Scalar k) const override;
    std::vector<uint8_t> encode_g1(const G1& a) const override;
    std::vector<uint8_t> encode_g2(const G2& a) const override;
    Scalar decode_scalar(std::span<const uint8_t> in) const override;
    G1 decode_g1(std::span<const uint8_t> in) const override;
    G2 decode_g2(std::span<const uint8_t> in) const override;

private:
    GroupParams params_;
    size_t qw_ = 0, pw_ = 0;
};

// Validating constructor for the toy backend; rejects parameters whose
// subgroup structure does not hold (q, p prime; q | p-1; ord(g0) = q).
ToyGroup toy_setup(uint64_t q, uint64_t p, uint64_t g0);

// Deterministic-when-seeded randomness source. One logical thread of
// control at a time.
class Rng {
public:
    explicit Rng(uint64_t seed) : eng_(seed) {}
    uint64_t next_u64() { return eng_(); }
    void fill(std::span<uint8_t> out);

private:
    std::mt19937_64 eng_;
};

// Uniform over [1, q) by masked rejection sampling.
Scalar random_scalar(Rng& rng, const Group& g);

// 64-bit modular helpers (also used by the toy backend internally).
uint64_t mulmod_u64(uint64_t a, uint64_t b, uint64_t m);
uint64_t powmod_u64(uint64_t b, uint64_t e, uint64_t m);
bool is_prime_u64(uint64_t n);

} // namespace iovauth
