#include "iovauth/clss.hpp"

namespace iovauth::clss {

Scalar hash_h0(const Group& g, Hashes& h, std::string_view id, const G2& pk1) {
    return h.hash(HashDomain::h0, HashInput(g).add_str(id).add_g2(pk1));
}

Scalar hash_h1(const Group& g, Hashes& h, std::string_view id, const G1& r_id) {
    return h.hash(HashDomain::h1, HashInput(g).add_str(id).add_g1(r_id));
}

static Scalar hash_h2(const Group& g, Hashes& h, std::span<const uint8_t> msg, std::string_view id,
                      const G1& pk2, const G1& pk3) {
    return h.hash(HashDomain::h2, HashInput(g).add_bytes(msg).add_str(id).add_g1(pk2).add_g1(pk3));
}

Setup setup(const Group& g, Rng& rng) {
    Scalar s = random_scalar(rng, g);
    SystemParams params;
    params.group = g.params();
    params.ppub1 = g.g1_mul(s, g.params().P);
    params.ppub2 = g.g2_exp(g.params().g, s);
    return Setup{MasterKey{s}, params};
}

SecretValue set_secret_value(const Group& g, Rng& rng) {
    Scalar x = random_scalar(rng, g);
    G2 pk1 = g.g2_exp(g.params().g, g.scalar_inv(x));
    return SecretValue{x, pk1};
}

PartialPrivateKey extract_partial_key(const Group& g, Hashes& h, const MasterKey& master,
                                      std::string_view id, const G2& pk1, Rng& rng) {
    if (id.empty()) throw Error(Errc::invalid_params, "extract_partial_key: empty identity");
    Scalar r = random_scalar(rng, g);
    G1 r_id = g.g1_mul(r, g.params().P);
    Scalar h0 = hash_h0(g, h, id, pk1);
    Scalar h1 = hash_h1(g, h, id, r_id);
    Scalar s_id = g.scalar_sub(g.scalar_mul(h0, r), g.scalar_mul(h1, master.s));
    return PartialPrivateKey{r_id, s_id};
}

bool verify_partial_key(const Group& g, Hashes& h, const SystemParams& params,
                        std::string_view id, const G2& pk1, const PartialPrivateKey& ppk) {
    Scalar h0 = hash_h0(g, h, id, pk1);
    Scalar h1 = hash_h1(g, h, id, ppk.r_id);
    G1 lhs = g.g1_mul(h1, params.ppub1);
    G1 rhs = g.g1_add(g.g1_mul(h0, ppk.r_id), g.g1_neg(g.g1_mul(ppk.s_id, g.params().P)));
    return lhs == rhs;
}

KeyPair assemble_keys(const Group& g, Scalar x, const G2& pk1, const PartialPrivateKey& ppk) {
    PublicKey pk;
    pk.pk1 = pk1;
    pk.pk2 = ppk.r_id;
    pk.pk3 = g.g1_mul(g.scalar_inv(x), g.params().P);
    return KeyPair{FullPrivateKey{x, ppk}, pk};
}

Signature sign(const Group& g, Hashes& h, const SystemParams& params, const FullPrivateKey& sk,
               std::string_view id, const PublicKey& pk, std::span<const uint8_t> msg) {
    Scalar h0 = hash_h0(g, h, id, pk.pk1);
    Scalar h2 = hash_h2(g, h, msg, id, pk.pk2, pk.pk3);
    Scalar denom = g.scalar_add(g.scalar_mul(sk.x, sk.partial.s_id), g.scalar_mul(h0, h2));
    if (denom.v == 0)
        throw Error(Errc::degenerate_challenge, "sign: x*s_ID + h0*h2 = 0 mod q");
    G1 base = g.g1_add(g.params().P, g.g1_mul(sk.x, params.ppub1));
    return Signature{g.g1_mul(g.scalar_inv(denom), base)};
}

bool verify(const Group& g, Hashes& h, const SystemParams& params, std::string_view id,
            const PublicKey& pk, std::span<const uint8_t> msg, const Signature& sig) {
    Scalar h0 = hash_h0(g, h, id, pk.pk1);
    Scalar h1 = hash_h1(g, h, id, pk.pk2);
    Scalar h2 = hash_h2(g, h, msg, id, pk.pk2, pk.pk3);
    G1 x = g.g1_add(g.g1_mul(h0, pk.pk2), g.g1_neg(g.g1_mul(h1, params.ppub1)));
    x = g.g1_add(x, g.g1_mul(g.scalar_mul(h0, h2), pk.pk3));
    G2 lhs = g.g2_mul(params.ppub2, pk.pk1);
    G2 rhs = g.pair(sig.sigma, x);
    return lhs == rhs;
}

} // namespace iovauth::clss
