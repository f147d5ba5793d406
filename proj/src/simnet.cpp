#include "iovauth/simnet.hpp"

#include <algorithm>
#include <fstream>
#include <queue>
#include <sstream>

#include <json.hpp>

namespace iovauth::simnet {

using protocol::Verdict;

static std::optional<Verdict> verdict_from_name(std::string_view name) {
    for (Verdict v : {Verdict::accept, Verdict::replay, Verdict::bad_signature,
                      Verdict::bad_pseudonym, Verdict::denied})
        if (name == protocol::verdict_name(v)) return v;
    return std::nullopt;
}

Scenario parse_scenario(std::string_view text) {
    Scenario s;
    std::istringstream in{std::string(text)};
    std::string line;
    size_t lineno = 0;
    auto fail = [&](const std::string& why) -> Error {
        return Error(Errc::parse_error, "scenario line " + std::to_string(lineno) + ": " + why);
    };
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string kw;
        ls >> kw;
        if (kw == "seed") {
            if (!(ls >> s.seed)) throw fail("seed expects an integer");
        } else if (kw == "params") {
            if (!(ls >> s.params)) throw fail("params expects TINY or MEDIUM");
        } else if (kw == "delta") {
            if (!(ls >> s.delta)) throw fail("delta expects an integer");
        } else if (kw == "epoch_length") {
            if (!(ls >> s.epoch_length)) throw fail("epoch_length expects an integer");
        } else if (kw == "hop_delay") {
            if (!(ls >> s.hop_delay)) throw fail("hop_delay expects an integer");
        } else if (kw == "region") {
            std::string r;
            if (!(ls >> r)) throw fail("region expects a name");
            s.regions.push_back(r);
        } else if (kw == "rsu") {
            Scenario::RsuDecl d;
            if (!(ls >> d.id >> d.region)) throw fail("rsu expects 'id region'");
            s.rsus.push_back(d);
        } else if (kw == "obu") {
            Scenario::ObuDecl d;
            if (!(ls >> d.id)) throw fail("obu expects an id");
            ls >> d.region; // optional starting region
            s.obus.push_back(d);
        } else if (kw == "at") {
            Action a;
            std::string kind;
            if (!(ls >> a.time >> kind)) throw fail("at expects 'time action ...'");
            std::vector<std::string> rest;
            std::string tok;
            while (ls >> tok) rest.push_back(tok);
            if (rest.size() >= 2 && rest[rest.size() - 2] == "expect") {
                auto v = verdict_from_name(rest.back());
                if (!v) throw fail("unknown verdict " + rest.back());
                a.expect = v;
                rest.resize(rest.size() - 2);
            }
            auto want = [&](size_t n, const char* usage) {
                if (rest.size() != n) throw fail(std::string("usage: ") + usage);
            };
            if (kind == "report") {
                a.kind = Action::Kind::report;
                want(3, "at T report OBU RSU TEXT");
                a.obu = rest[0]; a.rsu = rest[1]; a.text = rest[2];
            } else if (kind == "move") {
                a.kind = Action::Kind::move;
                want(2, "at T move OBU REGION");
                a.obu = rest[0]; a.region = rest[1];
            } else if (kind == "replay") {
                a.kind = Action::Kind::replay;
                want(1, "at T replay N");
                try {
                    a.seq = std::stoull(rest[0]);
                } catch (const std::exception&) {
                    throw fail("replay expects a report number");
                }
            } else if (kind == "flag") {
                a.kind = Action::Kind::flag;
                want(1, "at T flag OBU");
                a.obu = rest[0];
            } else if (kind == "tamper") {
                a.kind = Action::Kind::tamper;
                want(4, "at T tamper OBU RSU FIELD TEXT");
                a.obu = rest[0]; a.rsu = rest[1]; a.field = rest[2]; a.text = rest[3];
            } else if (kind == "forge") {
                a.kind = Action::Kind::forge;
                want(1, "at T forge RSU");
                a.rsu = rest[0];
            } else if (kind == "cross_epoch") {
                a.kind = Action::Kind::cross_epoch;
                want(3, "at T cross_epoch OBU RSU TEXT");
                a.obu = rest[0]; a.rsu = rest[1]; a.text = rest[2];
            } else {
                throw fail("unknown action " + kind);
            }
            s.actions.push_back(std::move(a));
        } else {
            throw fail("unknown directive " + kw);
        }
    }
    return s;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::io_error, "cannot open scenario " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_scenario(ss.str());
}

void validate_scenario(const Scenario& s) {
    auto fail = [](const std::string& why) -> Error { return Error(Errc::invalid_params, "scenario: " + why); };
    if (s.params != "TINY" && s.params != "MEDIUM") throw fail("params must be TINY or MEDIUM");
    if (s.regions.empty()) throw fail("no regions declared");
    if (s.epoch_length == 0) throw fail("epoch_length must be positive");
    auto has_region = [&](std::string_view r) {
        return std::find(s.regions.begin(), s.regions.end(), r) != s.regions.end();
    };
    auto region_served = [&](std::string_view r) {
        return std::any_of(s.rsus.begin(), s.rsus.end(), [&](const auto& d) { return d.region == r; });
    };
    auto has_rsu = [&](std::string_view id) {
        return std::any_of(s.rsus.begin(), s.rsus.end(), [&](const auto& d) { return d.id == id; });
    };
    auto has_obu = [&](std::string_view id) {
        return std::any_of(s.obus.begin(), s.obus.end(), [&](const auto& d) { return d.id == id; });
    };
    for (size_t i = 0; i + 1 < s.regions.size(); ++i)
        for (size_t j = i + 1; j < s.regions.size(); ++j)
            if (s.regions[i] == s.regions[j]) throw fail("duplicate region " + s.regions[i]);
    for (const auto& d : s.rsus) {
        if (!has_region(d.region)) throw fail("rsu " + d.id + " references unknown region " + d.region);
        if (has_obu(d.id)) throw fail("id used for both rsu and obu: " + d.id);
    }
    for (const auto& d : s.obus)
        if (!d.region.empty() && !has_region(d.region))
            throw fail("obu " + d.id + " references unknown region " + d.region);
    uint64_t reports = 0;
    std::vector<std::string> reporters;
    for (const auto& a : s.actions) {
        switch (a.kind) {
        case Action::Kind::report:
            if (!has_obu(a.obu)) throw fail("report from unknown obu " + a.obu);
            if (!has_rsu(a.rsu)) throw fail("report to unknown rsu " + a.rsu);
            ++reports;
            reporters.push_back(a.obu);
            break;
        case Action::Kind::move:
            if (!has_obu(a.obu)) throw fail("move of unknown obu " + a.obu);
            if (!has_region(a.region)) throw fail("move to unknown region " + a.region);
            if (!region_served(a.region)) throw fail("region " + a.region + " has no rsu");
            break;
        case Action::Kind::replay:
            if (a.seq == 0 || a.seq > reports)
                throw fail("replay references report " + std::to_string(a.seq) +
                           " which does not exist yet");
            break;
        case Action::Kind::flag:
            if (!has_obu(a.obu)) throw fail("flag of unknown obu " + a.obu);
            if (std::find(reporters.begin(), reporters.end(), a.obu) == reporters.end())
                throw fail("flag of " + a.obu + " before any of its reports");
            break;
        case Action::Kind::tamper:
            if (!has_obu(a.obu)) throw fail("tamper with unknown obu " + a.obu);
            if (!has_rsu(a.rsu)) throw fail("tamper to unknown rsu " + a.rsu);
            break;
        case Action::Kind::forge:
            if (!has_rsu(a.rsu)) throw fail("forge to unknown rsu " + a.rsu);
            break;
        case Action::Kind::cross_epoch:
            if (!has_obu(a.obu)) throw fail("cross_epoch with unknown obu " + a.obu);
            if (!has_rsu(a.rsu)) throw fail("cross_epoch to unknown rsu " + a.rsu);
            if (a.time < s.epoch_length)
                throw fail("cross_epoch needs time >= epoch_length so a stale epoch exists");
            break;
        }
    }
    for (const auto& d : s.obus) {
        std::string start = d.region.empty() ? s.regions.front() : d.region;
        if (!region_served(start)) throw fail("starting region " + start + " has no rsu");
    }
}

Scenario inject_adversary(Scenario s, Tactic tactic) {
    uint64_t max_time = 0;
    uint64_t reports = 0;
    uint64_t last_report_time = 0;
    const Action* last_report = nullptr;
    for (const auto& a : s.actions) {
        max_time = std::max(max_time, a.time);
        if (a.kind == Action::Kind::report) {
            ++reports;
            last_report_time = a.time;
            last_report = &a;
        }
    }
    if (!last_report)
        throw Error(Errc::invalid_params, "inject_adversary: scenario has no report to attack");
    Action a;
    switch (tactic) {
    case Tactic::replay:
        a.kind = Action::Kind::replay;
        a.seq = reports;
        a.time = last_report_time + s.delta + 1;
        a.expect = Verdict::replay;
        break;
    case Tactic::tamper_field:
        a.kind = Action::Kind::tamper;
        a.time = max_time + 1;
        a.obu = last_report->obu;
        a.rsu = last_report->rsu;
        a.field = "sigma";
        a.text = "tampered";
        a.expect = Verdict::bad_signature;
        break;
    case Tactic::forge_without_key:
        a.kind = Action::Kind::forge;
        a.time = max_time + 1;
        a.rsu = last_report->rsu;
        a.expect = Verdict::bad_signature;
        break;
    case Tactic::cross_epoch_pseudonym:
        a.kind = Action::Kind::cross_epoch;
        a.time = std::max(max_time + 1, s.epoch_length);
        a.obu = last_report->obu;
        a.rsu = last_report->rsu;
        a.text = "stale";
        a.expect = Verdict::bad_pseudonym;
        break;
    }
    s.actions.push_back(std::move(a));
    return s;
}

// ---- execution ----

namespace {

struct SimObu {
    std::string id;
    std::string region;
    protocol::ObuKeys keys;
};

struct SimRsu {
    std::string id;
    std::string region;
    protocol::RsuPrivateKey key;
    protocol::RevocationList lsrb;
    protocol::EpochArchive epochs;
};

struct Event {
    uint64_t time = 0;
    uint64_t order = 0; // FIFO among equal times
    enum class Kind { req_arrive, mac_arrive, track_arrive, lsrb_sync } kind;
    // req_arrive
    uint64_t seq = 0;
    std::string obu, rsu;
    protocol::ServiceRequest req;
    bool adversarial = false;
    std::optional<Verdict> expect;
    // mac_arrive
    std::vector<uint8_t> mac;
    // track_arrive / lsrb_sync
    std::string flagged;
    std::string evidence_region;
    protocol::ServiceRequest evidence_req;
    uint64_t evidence_seq = 0;
    protocol::RevocationList lsrb;
};

struct EventAfter {
    bool operator()(const Event& a, const Event& b) const {
        if (a.time != b.time) return a.time > b.time;
        return a.order > b.order;
    }
};

class Sim {
public:
    explicit Sim(const Scenario& s)
        : scn_(s), group_(s.params == "TINY" ? ToyGroup::tiny() : ToyGroup::medium()),
          hashes_(group_), rng_(s.seed) {}

    Transcript run();

private:
    void log(uint64_t t, const std::string& msg) {
        out_.lines.push_back("[t=" + std::to_string(t) + "] " + msg);
    }

    void push(Event e) {
        e.order = next_order_++;
        queue_.push(std::move(e));
    }

    void init();
    void schedule_actions();
    void handle_req(const Event& e);
    void handle_mac(const Event& e);
    void handle_track(const Event& e);
    void handle_sync(const Event& e);

    protocol::ServiceRequest build_report(const SimObu& obu, const SimRsu& rsu, uint64_t t,
                                          std::string_view text, bool stale_epoch);
    protocol::ServiceRequest build_forgery(uint64_t t);
    void tamper(protocol::ServiceRequest& req, const std::string& field);
    void record_verdict(const Event& e, Verdict v);

    const Scenario& scn_;
    ToyGroup group_;
    Sha256Hashes hashes_;
    Rng rng_;
    protocol::TccState tcc_;
    std::map<std::string, SimObu> obus_;
    std::map<std::string, SimRsu> rsus_;
    std::priority_queue<Event, std::vector<Event>, EventAfter> queue_;
    uint64_t next_order_ = 0;
    uint64_t next_seq_ = 1;
    // emitted honest reports by 1-based index: (request, target rsu, obu)
    struct SentReport {
        protocol::ServiceRequest req;
        std::string rsu;
        std::string obu;
        std::string region;
    };
    std::vector<SentReport> sent_;
    std::map<std::string, uint64_t> last_report_of_; // obu -> index into sent_
    Transcript out_;
};

void Sim::init() {
    tcc_ = protocol::tcc_init(group_, rng_);
    log(0, "TCC init params=" + scn_.params + " delta=" + std::to_string(scn_.delta) +
               " epoch_len=" + std::to_string(scn_.epoch_length));

    uint64_t horizon = 0;
    for (const auto& a : scn_.actions) horizon = std::max(horizon, a.time);
    horizon += scn_.delta + 2 * scn_.hop_delay + 1;
    for (const auto& region : scn_.regions) {
        for (uint64_t from = 0; from < horizon; from += scn_.epoch_length) {
            auto e = protocol::issue_regional_epoch(tcc_, group_, region, from,
                                                    from + scn_.epoch_length, rng_);
            log(0, "TCC epoch region=" + region + " index=" + std::to_string(e.index) +
                       " window=[" + std::to_string(e.valid_from) + "," +
                       std::to_string(e.valid_to) + ")");
        }
    }

    for (const auto& d : scn_.rsus) {
        auto reg = protocol::register_rsu(tcc_, group_, hashes_, d.id);
        if (!protocol::verify_rsu_key(group_, hashes_, tcc_.params, d.id, reg.key))
            throw Error(Errc::invalid_params, "rsu key check failed for " + d.id);
        SimRsu rsu{d.id, d.region, reg.key, reg.lsrb, {}};
        for (const auto& e : tcc_.archive.all())
            if (e.region == d.region) rsu.epochs.add(e);
        rsus_.emplace(d.id, std::move(rsu));
        log(0, "RSU " + d.id + " registered region=" + d.region +
                   " lsrb_v=" + std::to_string(reg.lsrb.version));
    }

    for (const auto& d : scn_.obus) {
        auto sv = clss::set_secret_value(group_, rng_);
        auto ppk = protocol::register_obu(tcc_, group_, hashes_, d.id, sv.pk1, 0, rng_);
        if (!clss::verify_partial_key(group_, hashes_, tcc_.params, d.id, sv.pk1, ppk))
            throw Error(Errc::invalid_params, "partial key check failed for " + d.id);
        auto kp = clss::assemble_keys(group_, sv.x, sv.pk1, ppk);
        SimObu obu{d.id, d.region.empty() ? scn_.regions.front() : d.region,
                   protocol::ObuKeys{kp.sk, kp.pk}};
        obus_.emplace(d.id, std::move(obu));
        log(0, "OBU " + d.id + " registered region=" +
                   (d.region.empty() ? scn_.regions.front() : d.region));
    }
}

std::string hex_of(std::span<const uint8_t> bytes) {
    static const char* digits = "0123456789abcdef";
    std::string out;
    for (uint8_t b : bytes) {
        out.push_back(digits[b >> 4]);
        out.push_back(digits[b & 0xf]);
    }
    return out;
}

const char* tactic_label(Action::Kind k) {
    switch (k) {
    case Action::Kind::replay: return "replay";
    case Action::Kind::tamper: return "tamper";
    case Action::Kind::forge: return "forge";
    case Action::Kind::cross_epoch: return "cross_epoch";
    default: return "?";
    }
}

protocol::ServiceRequest Sim::build_report(const SimObu& obu, const SimRsu& rsu, uint64_t t,
                                           std::string_view text, bool stale_epoch) {
    // the serving RSU beacons (region, epoch, enc_pk, id); a stale sender
    // reuses the previous window's key
    uint64_t key_time = stale_epoch ? t - scn_.epoch_length : t;
    const auto* epoch = rsu.epochs.find(rsu.region, key_time);
    if (!epoch)
        throw Error(Errc::untraceable_epoch, "no epoch for region " + rsu.region);
    std::span<const uint8_t> report{reinterpret_cast<const uint8_t*>(text.data()), text.size()};
    return protocol::sign_report(group_, hashes_, tcc_.params, obu.keys, obu.id, epoch->enc_pk,
                                 report, t, rng_);
}

protocol::ServiceRequest Sim::build_forgery(uint64_t t) {
    protocol::ServiceRequest req;
    req.ts = t;
    req.f.c1 = group_.g1_mul(random_scalar(rng_, group_), group_.params().P);
    req.f.c2.resize(16);
    rng_.fill(req.f.c2);
    req.report = {'f', 'a', 'k', 'e'};
    req.sigma = group_.g1_mul(random_scalar(rng_, group_), group_.params().P);
    req.pk1p = group_.g2_exp(group_.params().g, random_scalar(rng_, group_));
    req.pk2p = group_.g1_mul(random_scalar(rng_, group_), group_.params().P);
    req.pk3p = group_.g1_mul(random_scalar(rng_, group_), group_.params().P);
    req.ppub1p = group_.g1_mul(random_scalar(rng_, group_), group_.params().P);
    // consistent masked words: XOR out the true h2 so the verifier recovers
    // attacker-chosen nonzero scalars
    Scalar h2 = hashes_.hash(HashDomain::h2, HashInput(group_)
                                                 .add_bytes(req.report)
                                                 .add_u64(req.ts)
                                                 .add_g1(req.f.c1)
                                                 .add_bytes(req.f.c2)
                                                 .add_g1(req.pk2p)
                                                 .add_g1(req.pk3p));
    auto h2enc = group_.encode_scalar(h2);
    auto mask = [&](Scalar v) {
        auto enc = group_.encode_scalar(v);
        for (size_t i = 0; i < enc.size(); ++i) enc[i] ^= h2enc[i];
        return enc;
    };
    req.r1 = mask(random_scalar(rng_, group_));
    req.r2 = mask(random_scalar(rng_, group_));
    return req;
}

void Sim::tamper(protocol::ServiceRequest& req, const std::string& field) {
    if (field == "sigma") req.sigma = group_.g1_add(req.sigma, group_.params().P);
    else if (field == "report") req.report.push_back(0x58);
    else if (field == "r1") req.r1.back() ^= 0x01;
    else if (field == "r2") req.r2.back() ^= 0x01;
    else if (field == "ts") req.ts += 1;
    else if (field == "c1") req.f.c1 = group_.g1_add(req.f.c1, group_.params().P);
    else if (field == "c2") req.f.c2.back() ^= 0x01;
    else if (field == "pk1p") req.pk1p = group_.g2_mul(req.pk1p, group_.params().g);
    else if (field == "pk2p") req.pk2p = group_.g1_add(req.pk2p, group_.params().P);
    else if (field == "pk3p") req.pk3p = group_.g1_add(req.pk3p, group_.params().P);
    else if (field == "ppub1p") req.ppub1p = group_.g1_add(req.ppub1p, group_.params().P);
    else throw Error(Errc::invalid_params, "tamper: unknown field " + field);
}

void Sim::schedule_actions() {
    for (const auto& a : scn_.actions) {
        switch (a.kind) {
        case Action::Kind::move: {
            auto& obu = obus_.at(a.obu);
            obu.region = a.region;
            log(a.time, "OBU " + a.obu + " move region=" + a.region);
            break;
        }
        case Action::Kind::report:
        case Action::Kind::tamper:
        case Action::Kind::cross_epoch: {
            auto& obu = obus_.at(a.obu);
            auto& rsu = rsus_.at(a.rsu);
            auto req = build_report(obu, rsu, a.time, a.text,
                                    a.kind == Action::Kind::cross_epoch);
            if (a.kind == Action::Kind::tamper) tamper(req, a.field);
            Event e;
            e.time = a.time + scn_.hop_delay;
            e.kind = Event::Kind::req_arrive;
            e.seq = next_seq_++;
            e.obu = a.obu;
            e.rsu = a.rsu;
            e.req = req;
            e.adversarial = a.kind != Action::Kind::report;
            e.expect = a.expect;
            if (a.kind == Action::Kind::report) {
                sent_.push_back({req, a.rsu, a.obu, rsu.region});
                last_report_of_[a.obu] = sent_.size() - 1;
                log(a.time, "OBU " + a.obu + " -> RSU " + a.rsu + " req#" +
                                std::to_string(e.seq) + " T=" + std::to_string(a.time) +
                                " sigma=" + hex_of(group_.encode_g1(req.sigma)));
            } else {
                log(a.time, std::string("adversary ") + tactic_label(a.kind) + " via " + a.obu +
                                " -> RSU " + a.rsu + " req#" + std::to_string(e.seq) +
                                " sigma=" + hex_of(group_.encode_g1(req.sigma)));
            }
            push(std::move(e));
            break;
        }
        case Action::Kind::replay: {
            const auto& orig = sent_.at(a.seq - 1);
            Event e;
            e.time = a.time + scn_.hop_delay;
            e.kind = Event::Kind::req_arrive;
            e.seq = next_seq_++;
            e.obu = orig.obu;
            e.rsu = orig.rsu;
            e.req = orig.req;
            e.adversarial = true;
            e.expect = a.expect;
            log(a.time, "adversary replay report#" + std::to_string(a.seq) + " -> RSU " +
                            orig.rsu + " req#" + std::to_string(e.seq));
            push(std::move(e));
            break;
        }
        case Action::Kind::forge: {
            Event e;
            e.time = a.time + scn_.hop_delay;
            e.kind = Event::Kind::req_arrive;
            e.seq = next_seq_++;
            e.rsu = a.rsu;
            e.req = build_forgery(a.time);
            e.adversarial = true;
            e.expect = a.expect;
            log(a.time, "adversary forge -> RSU " + a.rsu + " req#" + std::to_string(e.seq));
            push(std::move(e));
            break;
        }
        case Action::Kind::flag: {
            auto it = last_report_of_.find(a.obu);
            if (it == last_report_of_.end())
                throw Error(Errc::invalid_params, "flag before any report of " + a.obu);
            const auto& evidence = sent_[it->second];
            log(a.time, "TBA confirms malice of " + a.obu + " evidence=report#" +
                            std::to_string(it->second + 1));
            Event e;
            e.time = a.time + scn_.hop_delay;
            e.kind = Event::Kind::track_arrive;
            e.flagged = a.obu;
            e.evidence_region = evidence.region;
            e.evidence_req = evidence.req;
            e.evidence_seq = it->second + 1;
            push(std::move(e));
            break;
        }
        }
    }
}

void Sim::record_verdict(const Event& e, Verdict v) {
    Transcript::ReqOutcome oc;
    oc.seq = e.seq;
    oc.obu = e.obu;
    oc.rsu = e.rsu;
    oc.verdict = v;
    oc.adversarial = e.adversarial;
    out_.requests.push_back(oc);
    ++out_.verdict_counts[protocol::verdict_name(v)];
    if (e.expect) {
        ++out_.expectations_checked;
        bool match = *e.expect == v;
        if (match) ++out_.expectations_matched;
        log(e.time, "req#" + std::to_string(e.seq) + " expectation=" +
                        protocol::verdict_name(*e.expect) +
                        (match ? " result=match" : " result=MISMATCH"));
    }
}

void Sim::handle_req(const Event& e) {
    auto& rsu = rsus_.at(e.rsu);
    auto vr = protocol::rsu_verify_request(group_, hashes_, tcc_.params, e.req, e.time, scn_.delta);
    if (vr.verdict != Verdict::accept) {
        log(e.time, "RSU " + e.rsu + " req#" + std::to_string(e.seq) +
                        " verdict=" + protocol::verdict_name(vr.verdict));
        record_verdict(e, vr.verdict);
        return;
    }
    auto rr = protocol::rsu_respond(group_, hashes_, rsu.epochs, rsu.region, rsu.lsrb, e.req, e.rsu);
    log(e.time, "RSU " + e.rsu + " req#" + std::to_string(e.seq) +
                    " verdict=" + protocol::verdict_name(rr.verdict) +
                    (rr.verdict == Verdict::accept || rr.verdict == Verdict::denied
                         ? " epoch=" + std::to_string(rr.epoch_index)
                         : ""));
    record_verdict(e, rr.verdict);
    if (rr.verdict != Verdict::accept) return;
    Event m;
    m.time = e.time + scn_.hop_delay;
    m.kind = Event::Kind::mac_arrive;
    m.seq = e.seq;
    m.obu = e.obu;
    m.rsu = e.rsu;
    m.mac = rr.mac;
    log(e.time, "RSU " + e.rsu + " -> OBU " + e.obu + " mac req#" + std::to_string(e.seq));
    push(std::move(m));
}

void Sim::handle_mac(const Event& e) {
    bool ok = protocol::obu_verify_rsu(group_, hashes_, e.obu, e.rsu, e.mac);
    if (ok) ++out_.mutual_auth_ok;
    for (auto& r : out_.requests)
        if (r.seq == e.seq) r.mutual_auth = ok;
    log(e.time, "OBU " + e.obu + " req#" + std::to_string(e.seq) + " mutual_auth=" +
                    (ok ? "ok" : "FAIL"));
}

void Sim::handle_track(const Event& e) {
    try {
        auto res = protocol::track_vehicle(tcc_, group_, e.evidence_req, e.evidence_region,
                                           "report#" + std::to_string(e.evidence_seq));
        out_.tracked.push_back(res.obu_id);
        log(e.time, "TCC track report#" + std::to_string(e.evidence_seq) + " region=" +
                        e.evidence_region + " epoch=" + std::to_string(res.epoch_index) +
                        " id=" + res.obu_id + " lsrb_v=" + std::to_string(res.lsrb_version));
        for (auto& [id, rsu] : rsus_) {
            Event s;
            s.time = e.time + scn_.hop_delay;
            s.kind = Event::Kind::lsrb_sync;
            s.rsu = id;
            s.lsrb = tcc_.lsrb;
            push(std::move(s));
        }
    } catch (const Error& err) {
        log(e.time, "TCC track report#" + std::to_string(e.evidence_seq) +
                        " failed=" + errc_name(err.code()));
    }
}

void Sim::handle_sync(const Event& e) {
    auto& rsu = rsus_.at(e.rsu);
    rsu.lsrb = e.lsrb;
    log(e.time, "TCC -> RSU " + e.rsu + " lsrb sync v=" + std::to_string(e.lsrb.version));
}

Transcript Sim::run() {
    init();
    schedule_actions();
    while (!queue_.empty()) {
        Event e = queue_.top();
        queue_.pop();
        switch (e.kind) {
        case Event::Kind::req_arrive: handle_req(e); break;
        case Event::Kind::mac_arrive: handle_mac(e); break;
        case Event::Kind::track_arrive: handle_track(e); break;
        case Event::Kind::lsrb_sync: handle_sync(e); break;
        }
    }
    // keep the log in logical-time order; scheduling wrote send lines eagerly
    std::stable_sort(out_.lines.begin(), out_.lines.end(), [](const auto& a, const auto& b) {
        auto t = [](const std::string& s) {
            return std::stoull(s.substr(s.find("t=") + 2));
        };
        return t(a) < t(b);
    });
    return out_;
}

} // namespace

Transcript run_scenario(const Scenario& s) {
    validate_scenario(s);
    Sim sim(s);
    return sim.run();
}

std::string Transcript::text() const {
    std::string out;
    for (const auto& l : lines) {
        out += l;
        out += '\n';
    }
    return out;
}

std::string Transcript::summary_json() const {
    nlohmann::json j;
    j["requests"] = requests.size();
    nlohmann::json v = nlohmann::json::object();
    for (const char* name : {"Accept", "Replay", "BadSignature", "BadPseudonym", "Denied"}) {
        auto it = verdict_counts.find(name);
        v[name] = it == verdict_counts.end() ? 0 : it->second;
    }
    j["verdicts"] = v;
    j["mutual_auth_ok"] = mutual_auth_ok;
    j["tracked"] = tracked;
    j["expectations"] = {{"checked", expectations_checked}, {"matched", expectations_matched}};
    return j.dump(2) + "\n";
}

} // namespace iovauth::simnet
