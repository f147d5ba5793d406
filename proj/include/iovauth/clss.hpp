#pragma once

#include <span>
#include <string_view>

#include "iovauth/bilinear.hpp"
#include "iovauth/hashes.hpp"

// Certificateless short signature. The user key combines a KGC-issued
// partial key with a self-chosen secret value; signatures are a single
// G1 element.
namespace iovauth::clss {

struct MasterKey {
    Scalar s;
};

struct SystemParams {
    GroupParams group;
    G1 ppub1; // s*P
    G2 ppub2; // g^s; pair(ppub1, P) == ppub2
};

struct PartialPrivateKey {
    G1 r_id;     // r_ID * P
    Scalar s_id; // h0*r_ID - h1*s mod q
    bool operator==(const PartialPrivateKey&) const = default;
};

struct FullPrivateKey {
    Scalar x;
    PartialPrivateKey partial;
};

struct PublicKey {
    G2 pk1; // g^(1/x)
    G1 pk2; // r_ID * P
    G1 pk3; // (1/x) * P
    bool operator==(const PublicKey&) const = default;
};

struct Signature {
    G1 sigma;
    bool operator==(const Signature&) const = default;
};

struct Setup {
    MasterKey master;
    SystemParams params;
};

struct SecretValue {
    Scalar x;
    G2 pk1;
};

struct KeyPair {
    FullPrivateKey sk;
    PublicKey pk;
};

Setup setup(const Group& g, Rng& rng);

SecretValue set_secret_value(const Group& g, Rng& rng);

PartialPrivateKey extract_partial_key(const Group& g, Hashes& h, const MasterKey& master,
                                      std::string_view id, const G2& pk1, Rng& rng);

// h1*Ppub1 == h0*R_ID - s_ID*P
bool verify_partial_key(const Group& g, Hashes& h, const SystemParams& params,
                        std::string_view id, const G2& pk1, const PartialPrivateKey& ppk);

KeyPair assemble_keys(const Group& g, Scalar x, const G2& pk1, const PartialPrivateKey& ppk);

// sigma = (x*s_ID + h0*h2)^(-1) * (P + x*Ppub1); deterministic, two G1
// scalar multiplications. Throws degenerate_challenge when the scalar
// to invert is zero.
Signature sign(const Group& g, Hashes& h, const SystemParams& params, const FullPrivateKey& sk,
               std::string_view id, const PublicKey& pk, std::span<const uint8_t> msg);

// Ppub2 * PK1 == pair(sigma, h0*PK2 - h1*Ppub1 + h0*h2*PK3); one pairing,
// three G1 scalar multiplications.
bool verify(const Group& g, Hashes& h, const SystemParams& params, std::string_view id,
            const PublicKey& pk, std::span<const uint8_t> msg, const Signature& sig);

// challenge hashes shared with the vehicle protocol layer
Scalar hash_h0(const Group& g, Hashes& h, std::string_view id, const G2& pk1);
Scalar hash_h1(const Group& g, Hashes& h, std::string_view id, const G1& r_id);

} // namespace iovauth::clss
