#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "iovauth/bilinear.hpp"

namespace iovauth {

// Domain tags for the five protocol hash functions. The KDF and MAC use
// disjoint tag bytes (0x10, 0x11) and map_to_point uses 0x12.
enum class HashDomain : uint8_t { h0 = 0, h1 = 1, h2 = 2, h3 = 3, h4 = 4 };

// Canonical type-tagged input encoder. Scalars and group elements are
// fixed-width big-endian; byte strings and identities are length-prefixed.
class HashInput {
public:
    explicit HashInput(const Group& g) : g_(&g) {}

    HashInput& add_bytes(std::span<const uint8_t> b);
    HashInput& add_str(std::string_view s);
    HashInput& add_u64(uint64_t v); // timestamps, 8-byte big-endian
    HashInput& add_scalar(Scalar k);
    HashInput& add_g1(const G1& a);
    HashInput& add_g2(const G2& a);

    std::span<const uint8_t> bytes() const { return buf_; }

private:
    const Group* g_;
    std::vector<uint8_t> buf_;
};

// Hash-to-scalar oracle for H0..H4; outputs are in [1, q).
class Hashes {
public:
    virtual ~Hashes() = default;
    virtual Scalar hash(HashDomain d, const HashInput& in) = 0;
};

// SHA-256 digest reduced mod q; a zero result is resampled by appending
// a counter byte to the input.
class Sha256Hashes final : public Hashes {
public:
    explicit Sha256Hashes(const Group& g) : q_(g.params().q) {}
    Scalar hash(HashDomain d, const HashInput& in) override;

private:
    uint64_t q_;
};

// Test oracle returning preloaded values in FIFO order per domain tag.
class ScriptedHashes final : public Hashes {
public:
    explicit ScriptedHashes(const Group& g) : q_(g.params().q) {}

    void preload(HashDomain d, uint64_t value);
    void preload_n(HashDomain d, uint64_t value, size_t n);
    size_t remaining(HashDomain d) const { return fifo_[static_cast<size_t>(d)].size(); }

    // plain-text script: one "domain_tag decimal_value" pair per line, e.g. "H0 4"
    static ScriptedHashes from_file(const Group& g, const std::string& path);
    static ScriptedHashes from_text(const Group& g, std::string_view text);

    Scalar hash(HashDomain d, const HashInput& in) override;

private:
    uint64_t q_;
    std::array<std::deque<uint64_t>, 5> fifo_;
};

std::array<uint8_t, 32> sha256(std::span<const uint8_t> data);

// Reduce sha256(tag || data [|| counter]) into [1, m); shared by
// hash-to-scalar and the toy map-to-point.
uint64_t digest_to_nonzero_residue(uint8_t tag, std::span<const uint8_t> data, uint64_t m);

// Counter-mode keystream over the canonical encoding of a shared G1 point.
std::vector<uint8_t> kdf_expand(const Group& g, const G1& shared, size_t len);

// Keyed digest: sha256(mac_tag || enc(key) || enc(msg)).
std::vector<uint8_t> mac_tag(const Group& g, Scalar key, Scalar msg);

} // namespace iovauth
