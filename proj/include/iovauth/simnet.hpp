#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "iovauth/protocol.hpp"

// Deterministic discrete-event simulation of the road scenario: OBU, RSU,
// TCC and TBA entities exchanging protocol messages over a lossless
// channel with a logical clock.
namespace iovauth::simnet {

struct Action {
    enum class Kind { report, move, replay, flag, tamper, forge, cross_epoch };
    uint64_t time = 0;
    Kind kind = Kind::report;
    std::string obu;
    std::string rsu;
    std::string region; // move target
    std::string text;   // report payload
    std::string field;  // tamper target field
    uint64_t seq = 0;   // replay: 1-based report index
    std::optional<protocol::Verdict> expect;
};

struct Scenario {
    uint64_t seed = 1;
    std::string params = "TINY"; // TINY | MEDIUM
    uint64_t delta = 300;
    uint64_t epoch_length = 1000;
    uint64_t hop_delay = 0;
    std::vector<std::string> regions;
    struct RsuDecl {
        std::string id;
        std::string region;
    };
    std::vector<RsuDecl> rsus;
    struct ObuDecl {
        std::string id;
        std::string region; // starting region; defaults to the first declared
    };
    std::vector<ObuDecl> obus;
    std::vector<Action> actions;
};

enum class Tactic { replay, tamper_field, forge_without_key, cross_epoch_pseudonym };

Scenario parse_scenario(std::string_view text);
Scenario load_scenario(const std::string& path);
void validate_scenario(const Scenario& s); // throws parse_error / invalid_params

// Appends one adversarial action with its expected verdict recorded.
Scenario inject_adversary(Scenario s, Tactic tactic);

struct Transcript {
    struct ReqOutcome {
        uint64_t seq = 0; // request number in emission order
        std::string obu;  // empty for forged requests
        std::string rsu;
        protocol::Verdict verdict = protocol::Verdict::bad_signature;
        bool mutual_auth = false;
        bool adversarial = false;
    };

    std::vector<std::string> lines;
    std::vector<ReqOutcome> requests;
    std::vector<std::string> tracked; // identities recovered by tracking, in order
    std::map<std::string, uint64_t> verdict_counts;
    uint64_t mutual_auth_ok = 0;
    uint64_t expectations_checked = 0;
    uint64_t expectations_matched = 0;

    std::string text() const;         // line-oriented log
    std::string summary_json() const; // machine-readable counts per verdict
};

Transcript run_scenario(const Scenario& s);

} // namespace iovauth::simnet
