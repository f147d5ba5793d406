#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "iovauth/protocol.hpp"

// Plain-file persistence: labeled text records with hex-encoded canonical
// element bytes. Writes are atomic (write-then-rename).
namespace iovauth::store {

void write_file_atomic(const std::string& path, std::string_view content);
std::string read_file(const std::string& path); // throws io_error naming the file

std::string to_hex(std::span<const uint8_t> bytes);
// Throws parse_error with the byte offset of the first bad digit.
std::vector<uint8_t> from_hex(std::string_view hex);

struct ParamsFile {
    uint64_t q = 0, p = 0, g0 = 0;
    std::string backend = "toy";
    G1 ppub1;
    G2 ppub2;
};

void save_params(const std::string& path, const Group& g, const clss::SystemParams& params);
// Reconstructs the group and validates pair(Ppub1, P) == Ppub2.
struct LoadedSystem {
    ToyGroup group;
    clss::SystemParams params;
};
LoadedSystem load_params(const std::string& path);

void save_master(const std::string& path, const Group& g, const clss::MasterKey& master);
clss::MasterKey load_master(const std::string& path, const Group& g);

void save_obu_keys(const std::string& path, const Group& g, std::string_view id,
                   const protocol::ObuKeys& keys);
struct LoadedObu {
    std::string id;
    protocol::ObuKeys keys;
};
LoadedObu load_obu_keys(const std::string& path, const Group& g);

void save_rsu_key(const std::string& path, const Group& g, std::string_view id,
                  const protocol::RsuPrivateKey& key);
struct LoadedRsu {
    std::string id;
    protocol::RsuPrivateKey key;
};
LoadedRsu load_rsu_key(const std::string& path, const Group& g);

void save_lslu(const std::string& path, const Group& g, const protocol::LegitUserList& list);
protocol::LegitUserList load_lslu(const std::string& path, const Group& g);

void save_lsrb(const std::string& path, const protocol::RevocationList& list);
protocol::RevocationList load_lsrb(const std::string& path);

void save_epochs(const std::string& path, const Group& g, const protocol::EpochArchive& archive);
protocol::EpochArchive load_epochs(const std::string& path, const Group& g);

void save_signature(const std::string& path, const Group& g, const G1& sigma);
G1 load_signature(const std::string& path, const Group& g);

} // namespace iovauth::store
