#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "iovauth/clss.hpp"

// Anonymous mutual authentication between on-board units and road-side
// units: registration, regional epoch keys, pseudonyms, randomized report
// signing, revocation and identity tracking.
namespace iovauth::protocol {

struct RsuPrivateKey {
    G1 d_idr; // (H3(ID_R) + s)^(-1) * P
    bool operator==(const RsuPrivateKey&) const = default;
};

struct RegionalKeyEpoch {
    std::string region;
    uint64_t index = 0;
    uint64_t valid_from = 0; // inclusive
    uint64_t valid_to = 0;   // exclusive
    G1 enc_pk;               // enc_sk * P
    Scalar enc_sk;
};

struct Pseudonym {
    G1 c1;                   // ephemeral point u*P
    std::vector<uint8_t> c2; // (len(r) || r || id) xor keystream
    bool operator==(const Pseudonym&) const = default;
};

struct ServiceRequest {
    uint64_t ts = 0;
    Pseudonym f;
    G1 sigma;
    std::vector<uint8_t> report;
    std::vector<uint8_t> r1; // enc(t*h0) xor enc(h2), scalar width
    std::vector<uint8_t> r2; // enc(t*h1) xor enc(h2), scalar width
    G2 pk1p;                 // PK1^(t*h0)
    G1 pk2p;                 // t*PK2
    G1 pk3p;                 // t*PK3
    G1 ppub1p;               // t*Ppub1
    bool operator==(const ServiceRequest&) const = default;
};

struct LsluEntry {
    std::string id;
    G2 pk1;
    uint64_t registered_at = 0;
};

struct LegitUserList {
    uint64_t version = 0;
    std::vector<LsluEntry> entries;
    bool contains(std::string_view id) const;
};

struct LsrbEntry {
    std::string id;
    std::string evidence;
};

struct RevocationList {
    uint64_t version = 0;
    std::vector<LsrbEntry> entries;
    bool contains(std::string_view id) const;
    void add(std::string_view id, std::string_view evidence); // bumps version
};

// (region, epoch) -> key pair map; windows per region are disjoint and
// contiguous, enforced on insert.
class EpochArchive {
public:
    void add(RegionalKeyEpoch e);
    const RegionalKeyEpoch* find(std::string_view region, uint64_t t) const;
    const RegionalKeyEpoch* find_index(std::string_view region, uint64_t index) const;
    uint64_t count(std::string_view region) const;
    std::optional<uint64_t> last_end(std::string_view region) const;
    std::span<const RegionalKeyEpoch> all() const { return epochs_; }

private:
    std::vector<RegionalKeyEpoch> epochs_;
};

struct TccState {
    clss::MasterKey master;
    clss::SystemParams params;
    LegitUserList lslu;
    RevocationList lsrb;
    EpochArchive archive;
};

struct ObuKeys {
    clss::FullPrivateKey sk;
    clss::PublicKey pk;
};

enum class Verdict { accept, replay, bad_signature, bad_pseudonym, denied };
const char* verdict_name(Verdict v);

TccState tcc_init(const Group& g, Rng& rng);

// Throws already_registered / revoked; appends (id, pk1, now) to Ls_lu.
clss::PartialPrivateKey register_obu(TccState& tcc, const Group& g, Hashes& h,
                                     std::string_view id, const G2& pk1, uint64_t now, Rng& rng);

struct RsuRegistration {
    RsuPrivateKey key;
    RevocationList lsrb; // current snapshot handed to the RSU
};
// D_IDR = (H3(ID_R) + s)^(-1) * P; throws degenerate_identity when
// H3(ID_R) + s = 0 mod q (the check equation pins H3(ID_R), so there is
// no way to substitute a resampled hash).
RsuRegistration register_rsu(TccState& tcc, const Group& g, Hashes& h, std::string_view id);

// pair(D_IDR, H3(ID_R)*P + Ppub1) == g
bool verify_rsu_key(const Group& g, Hashes& h, const clss::SystemParams& params,
                    std::string_view id, const RsuPrivateKey& key);

RegionalKeyEpoch issue_regional_epoch(TccState& tcc, const Group& g, std::string_view region,
                                      uint64_t valid_from, uint64_t valid_to, Rng& rng);

// Hashed ElGamal over G1: C1 = u*P, C2 = (len(r) || r || id) xor KDF(u*enc_pk).
Pseudonym make_pseudonym(const Group& g, const G1& enc_pk, std::span<const uint8_t> report,
                         std::string_view id, Rng& rng);

struct PseudonymPlain {
    std::vector<uint8_t> report;
    std::string id;
};
// Throws bad_pseudonym on framing failure.
PseudonymPlain decrypt_pseudonym(const Group& g, Scalar enc_sk, const Pseudonym& f);

// Randomized anonymous report signature: fresh t in [1, q), randomized key
// fields, masked challenge recovery words r1/r2, and
// sigma = t^(-2) * (x*s_ID + h0*h2)^(-1) * (P + x*Ppub1).
// Resamples t when the inverted scalar degenerates to zero.
ServiceRequest sign_report(const Group& g, Hashes& h, const clss::SystemParams& params,
                           const ObuKeys& keys, std::string_view id, const G1& enc_pk,
                           std::span<const uint8_t> report, uint64_t ts, Rng& rng);

struct VerifyOutcome {
    Verdict verdict = Verdict::bad_signature;
    Scalar th0; // recovered t*h0
    Scalar th1; // recovered t*h1
};
// Freshness |now - T| <= delta, then
// Ppub2^(h0') * PK1' == pair(sigma, h0'*PK2' - h1'*Ppub1' + h0'*h2*PK3')^(h0').
VerifyOutcome rsu_verify_request(const Group& g, Hashes& h, const clss::SystemParams& params,
                                 const ServiceRequest& req, uint64_t now, uint64_t delta);

struct RespondOutcome {
    Verdict verdict = Verdict::bad_pseudonym;
    std::vector<uint8_t> mac; // present when verdict == accept
    std::string obu_id;       // identity recovered by the RSU
    uint64_t epoch_index = 0; // epoch whose key decrypted the pseudonym
};
// Decrypts the pseudonym with the epoch covering req.ts, binds the
// recovered report to the request, checks revocation and answers with
// mac = MAC_key(H3(ID_o)), key = H4(H3(ID_o), ID_R).
RespondOutcome rsu_respond(const Group& g, Hashes& h, const EpochArchive& epochs,
                           std::string_view region, const RevocationList& lsrb,
                           const ServiceRequest& req, std::string_view rsu_id);

std::vector<uint8_t> response_mac(const Group& g, Hashes& h, std::string_view obu_id,
                                  std::string_view rsu_id);
bool obu_verify_rsu(const Group& g, Hashes& h, std::string_view obu_id, std::string_view rsu_id,
                    std::span<const uint8_t> mac);

struct TrackResult {
    std::string obu_id;
    uint64_t epoch_index = 0;
    uint64_t lsrb_version = 0;
};
// Region evidence -> epoch from T -> archived enc_sk -> decrypt -> reveal,
// revoke and bump the list version. Throws untraceable_epoch / bad_pseudonym.
TrackResult track_vehicle(TccState& tcc, const Group& g, const ServiceRequest& req,
                          std::string_view evidence_region, std::string_view evidence_note);

} // namespace iovauth::protocol
