#include "iovauth/protocol.hpp"

#include <algorithm>

namespace iovauth::protocol {

const char* verdict_name(Verdict v) {
    switch (v) {
    case Verdict::accept: return "Accept";
    case Verdict::replay: return "Replay";
    case Verdict::bad_signature: return "BadSignature";
    case Verdict::bad_pseudonym: return "BadPseudonym";
    case Verdict::denied: return "Denied";
    }
    return "Unknown";
}

bool LegitUserList::contains(std::string_view id) const {
    return std::any_of(entries.begin(), entries.end(), [&](const auto& e) { return e.id == id; });
}

bool RevocationList::contains(std::string_view id) const {
    return std::any_of(entries.begin(), entries.end(), [&](const auto& e) { return e.id == id; });
}

void RevocationList::add(std::string_view id, std::string_view evidence) {
    entries.push_back(LsrbEntry{std::string(id), std::string(evidence)});
    ++version;
}

void EpochArchive::add(RegionalKeyEpoch e) {
    if (e.valid_from >= e.valid_to)
        throw Error(Errc::invalid_params, "epoch: empty validity window");
    if (auto end = last_end(e.region)) {
        if (e.valid_from != *end)
            throw Error(Errc::overlapping_epoch,
                        "epoch for region " + e.region + " must start at " + std::to_string(*end));
    }
    e.index = count(e.region);
    epochs_.push_back(std::move(e));
}

const RegionalKeyEpoch* EpochArchive::find(std::string_view region, uint64_t t) const {
    for (const auto& e : epochs_)
        if (e.region == region && e.valid_from <= t && t < e.valid_to) return &e;
    return nullptr;
}

const RegionalKeyEpoch* EpochArchive::find_index(std::string_view region, uint64_t index) const {
    for (const auto& e : epochs_)
        if (e.region == region && e.index == index) return &e;
    return nullptr;
}

uint64_t EpochArchive::count(std::string_view region) const {
    uint64_t n = 0;
    for (const auto& e : epochs_)
        if (e.region == region) ++n;
    return n;
}

std::optional<uint64_t> EpochArchive::last_end(std::string_view region) const {
    std::optional<uint64_t> end;
    for (const auto& e : epochs_)
        if (e.region == region && (!end || e.valid_to > *end)) end = e.valid_to;
    return end;
}

TccState tcc_init(const Group& g, Rng& rng) {
    auto [master, params] = clss::setup(g, rng);
    return TccState{master, params, {}, {}, {}};
}

clss::PartialPrivateKey register_obu(TccState& tcc, const Group& g, Hashes& h,
                                     std::string_view id, const G2& pk1, uint64_t now, Rng& rng) {
    if (tcc.lsrb.contains(id))
        throw Error(Errc::revoked, "register_obu: " + std::string(id) + " is revoked");
    if (tcc.lslu.contains(id))
        throw Error(Errc::already_registered, "register_obu: " + std::string(id) + " already registered");
    auto ppk = clss::extract_partial_key(g, h, tcc.master, id, pk1, rng);
    tcc.lslu.entries.push_back(LsluEntry{std::string(id), pk1, now});
    ++tcc.lslu.version;
    return ppk;
}

static Scalar hash_h3(const Group& g, Hashes& h, std::string_view id) {
    return h.hash(HashDomain::h3, HashInput(g).add_str(id));
}

RsuRegistration register_rsu(TccState& tcc, const Group& g, Hashes& h, std::string_view id) {
    if (id.empty()) throw Error(Errc::invalid_params, "register_rsu: empty identity");
    Scalar h3 = hash_h3(g, h, id);
    Scalar denom = g.scalar_add(h3, tcc.master.s);
    if (denom.v == 0)
        throw Error(Errc::degenerate_identity, "register_rsu: H3(ID_R) + s = 0 mod q");
    RsuPrivateKey key{g.g1_mul(g.scalar_inv(denom), g.params().P)};
    return RsuRegistration{key, tcc.lsrb};
}

bool verify_rsu_key(const Group& g, Hashes& h, const clss::SystemParams& params,
                    std::string_view id, const RsuPrivateKey& key) {
    Scalar h3 = hash_h3(g, h, id);
    G1 x = g.g1_add(g.g1_mul(h3, g.params().P), params.ppub1);
    return g.pair(key.d_idr, x) == g.params().g;
}

RegionalKeyEpoch issue_regional_epoch(TccState& tcc, const Group& g, std::string_view region,
                                      uint64_t valid_from, uint64_t valid_to, Rng& rng) {
    RegionalKeyEpoch e;
    e.region = std::string(region);
    e.valid_from = valid_from;
    e.valid_to = valid_to;
    e.enc_sk = random_scalar(rng, g);
    e.enc_pk = g.g1_mul(e.enc_sk, g.params().P);
    tcc.archive.add(e);
    return *tcc.archive.find_index(region, tcc.archive.count(region) - 1);
}

static void append_be32(std::vector<uint8_t>& buf, uint32_t v) {
    buf.push_back(static_cast<uint8_t>(v >> 24));
    buf.push_back(static_cast<uint8_t>(v >> 16));
    buf.push_back(static_cast<uint8_t>(v >> 8));
    buf.push_back(static_cast<uint8_t>(v));
}

Pseudonym make_pseudonym(const Group& g, const G1& enc_pk, std::span<const uint8_t> report,
                         std::string_view id, Rng& rng) {
    if (id.empty()) throw Error(Errc::invalid_params, "make_pseudonym: empty identity");
    Scalar u = random_scalar(rng, g);
    Pseudonym f;
    f.c1 = g.g1_mul(u, g.params().P);
    G1 shared = g.g1_mul(u, enc_pk);
    std::vector<uint8_t> plain;
    append_be32(plain, static_cast<uint32_t>(report.size()));
    plain.insert(plain.end(), report.begin(), report.end());
    plain.insert(plain.end(), id.begin(), id.end());
    auto ks = kdf_expand(g, shared, plain.size());
    f.c2.resize(plain.size());
    for (size_t i = 0; i < plain.size(); ++i) f.c2[i] = plain[i] ^ ks[i];
    return f;
}

PseudonymPlain decrypt_pseudonym(const Group& g, Scalar enc_sk, const Pseudonym& f) {
    G1 shared = g.g1_mul(enc_sk, f.c1);
    auto ks = kdf_expand(g, shared, f.c2.size());
    std::vector<uint8_t> plain(f.c2.size());
    for (size_t i = 0; i < plain.size(); ++i) plain[i] = f.c2[i] ^ ks[i];
    if (plain.size() < 4) throw Error(Errc::bad_pseudonym, "pseudonym: truncated payload");
    uint64_t len = (uint64_t(plain[0]) << 24) | (uint64_t(plain[1]) << 16) |
                   (uint64_t(plain[2]) << 8) | uint64_t(plain[3]);
    if (4 + len > plain.size())
        throw Error(Errc::bad_pseudonym, "pseudonym: bad length framing");
    PseudonymPlain out;
    out.report.assign(plain.begin() + 4, plain.begin() + 4 + len);
    out.id.assign(plain.begin() + 4 + len, plain.end());
    if (out.id.empty()) throw Error(Errc::bad_pseudonym, "pseudonym: empty identity");
    return out;
}

static Scalar hash_h2_request(const Group& g, Hashes& h, std::span<const uint8_t> report,
                              uint64_t ts, const Pseudonym& f, const G1& pk2p, const G1& pk3p) {
    return h.hash(HashDomain::h2, HashInput(g)
                                      .add_bytes(report)
                                      .add_u64(ts)
                                      .add_g1(f.c1)
                                      .add_bytes(f.c2)
                                      .add_g1(pk2p)
                                      .add_g1(pk3p));
}

static std::vector<uint8_t> xor_bytes(std::span<const uint8_t> a, std::span<const uint8_t> b) {
    std::vector<uint8_t> out(a.size());
    for (size_t i = 0; i < a.size(); ++i) out[i] = a[i] ^ b[i];
    return out;
}

ServiceRequest sign_report(const Group& g, Hashes& h, const clss::SystemParams& params,
                           const ObuKeys& keys, std::string_view id, const G1& enc_pk,
                           std::span<const uint8_t> report, uint64_t ts, Rng& rng) {
    ServiceRequest req;
    req.ts = ts;
    req.report.assign(report.begin(), report.end());
    req.f = make_pseudonym(g, enc_pk, report, id, rng);

    Scalar h0 = clss::hash_h0(g, h, id, keys.pk.pk1);
    Scalar h1 = clss::hash_h1(g, h, id, keys.pk.pk2);
    G1 base = g.g1_add(g.params().P, g.g1_mul(keys.sk.x, params.ppub1));

    for (int attempt = 0; attempt < 256; ++attempt) {
        Scalar t = random_scalar(rng, g);
        Scalar th0 = g.scalar_mul(t, h0);
        Scalar th1 = g.scalar_mul(t, h1);
        req.pk1p = g.g2_exp(keys.pk.pk1, th0);
        req.pk2p = g.g1_mul(t, keys.pk.pk2);
        req.pk3p = g.g1_mul(t, keys.pk.pk3);
        req.ppub1p = g.g1_mul(t, params.ppub1);
        Scalar h2 = hash_h2_request(g, h, report, ts, req.f, req.pk2p, req.pk3p);
        Scalar denom = g.scalar_add(g.scalar_mul(keys.sk.x, keys.sk.partial.s_id),
                                    g.scalar_mul(h0, h2));
        if (denom.v == 0) continue; // resample t; h2 shifts with the randomized keys
        auto h2enc = g.encode_scalar(h2);
        req.r1 = xor_bytes(g.encode_scalar(th0), h2enc);
        req.r2 = xor_bytes(g.encode_scalar(th1), h2enc);
        Scalar k = g.scalar_inv(g.scalar_mul(g.scalar_mul(t, t), denom));
        req.sigma = g.g1_mul(k, base);
        return req;
    }
    throw Error(Errc::degenerate_challenge, "sign_report: no usable randomizer after 256 attempts");
}

VerifyOutcome rsu_verify_request(const Group& g, Hashes& h, const clss::SystemParams& params,
                                 const ServiceRequest& req, uint64_t now, uint64_t delta) {
    uint64_t age = now >= req.ts ? now - req.ts : req.ts - now;
    if (age > delta) return VerifyOutcome{Verdict::replay, {}, {}};

    size_t w = g.scalar_width();
    if (req.r1.size() != w || req.r2.size() != w)
        return VerifyOutcome{Verdict::bad_signature, {}, {}};

    Scalar h2 = hash_h2_request(g, h, req.report, req.ts, req.f, req.pk2p, req.pk3p);
    auto h2enc = g.encode_scalar(h2);
    uint64_t q = g.params().q;
    uint64_t v0 = 0, v1 = 0;
    for (size_t i = 0; i < w; ++i) {
        v0 = (v0 << 8) | uint64_t(req.r1[i] ^ h2enc[i]);
        v1 = (v1 << 8) | uint64_t(req.r2[i] ^ h2enc[i]);
    }
    // unmasked words must decode below q; a zero h0' cannot carry a signature
    if (v0 >= q || v1 >= q || v0 == 0) return VerifyOutcome{Verdict::bad_signature, {}, {}};
    Scalar h0p{v0}, h1p{v1};

    G1 x = g.g1_add(g.g1_mul(h0p, req.pk2p), g.g1_neg(g.g1_mul(h1p, req.ppub1p)));
    x = g.g1_add(x, g.g1_mul(g.scalar_mul(h0p, h2), req.pk3p));
    G2 lhs = g.g2_mul(g.g2_exp(params.ppub2, h0p), req.pk1p);
    G2 rhs = g.g2_exp(g.pair(req.sigma, x), h0p);
    if (lhs != rhs) return VerifyOutcome{Verdict::bad_signature, h0p, h1p};
    return VerifyOutcome{Verdict::accept, h0p, h1p};
}

static Scalar session_key(const Group& g, Hashes& h, Scalar h_ido, std::string_view rsu_id) {
    return h.hash(HashDomain::h4, HashInput(g).add_scalar(h_ido).add_str(rsu_id));
}

RespondOutcome rsu_respond(const Group& g, Hashes& h, const EpochArchive& epochs,
                           std::string_view region, const RevocationList& lsrb,
                           const ServiceRequest& req, std::string_view rsu_id) {
    const RegionalKeyEpoch* epoch = epochs.find(region, req.ts);
    if (!epoch) return RespondOutcome{Verdict::bad_pseudonym, {}, {}, 0};
    PseudonymPlain plain;
    try {
        plain = decrypt_pseudonym(g, epoch->enc_sk, req.f);
    } catch (const Error& e) {
        if (e.code() == Errc::bad_pseudonym)
            return RespondOutcome{Verdict::bad_pseudonym, {}, {}, epoch->index};
        throw;
    }
    if (plain.report != req.report)
        return RespondOutcome{Verdict::bad_pseudonym, {}, {}, epoch->index};
    if (lsrb.contains(plain.id))
        return RespondOutcome{Verdict::denied, {}, plain.id, epoch->index};
    Scalar h_ido = hash_h3(g, h, plain.id);
    Scalar key = session_key(g, h, h_ido, rsu_id);
    return RespondOutcome{Verdict::accept, mac_tag(g, key, h_ido), plain.id, epoch->index};
}

std::vector<uint8_t> response_mac(const Group& g, Hashes& h, std::string_view obu_id,
                                  std::string_view rsu_id) {
    Scalar h_ido = hash_h3(g, h, obu_id);
    Scalar key = session_key(g, h, h_ido, rsu_id);
    return mac_tag(g, key, h_ido);
}

bool obu_verify_rsu(const Group& g, Hashes& h, std::string_view obu_id, std::string_view rsu_id,
                    std::span<const uint8_t> mac) {
    auto expect = response_mac(g, h, obu_id, rsu_id);
    if (expect.size() != mac.size()) return false;
    uint8_t diff = 0;
    for (size_t i = 0; i < mac.size(); ++i) diff |= uint8_t(expect[i] ^ mac[i]);
    return diff == 0;
}

TrackResult track_vehicle(TccState& tcc, const Group& g, const ServiceRequest& req,
                          std::string_view evidence_region, std::string_view evidence_note) {
    const RegionalKeyEpoch* epoch = tcc.archive.find(evidence_region, req.ts);
    if (!epoch)
        throw Error(Errc::untraceable_epoch,
                    "track: no epoch for region " + std::string(evidence_region) + " at t=" +
                        std::to_string(req.ts));
    PseudonymPlain plain = decrypt_pseudonym(g, epoch->enc_sk, req.f);
    if (plain.report != req.report)
        throw Error(Errc::bad_pseudonym, "track: pseudonym does not bind the disputed report");
    tcc.lsrb.add(plain.id, evidence_note);
    return TrackResult{plain.id, epoch->index, tcc.lsrb.version};
}

} // namespace iovauth::protocol
