#include "iovauth/store.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace iovauth::store {

void write_file_atomic(const std::string& path, std::string_view content) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(Errc::io_error, "cannot write " + tmp);
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw Error(Errc::io_error, "short write to " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw Error(Errc::io_error, "cannot rename " + tmp + " to " + path);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::io_error, "missing file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string to_hex(std::span<const uint8_t> bytes) {
    static const char* digits = "0123456789abcdef";
    std::string out;
    out.reserve(bytes.size() * 2);
    for (uint8_t b : bytes) {
        out.push_back(digits[b >> 4]);
        out.push_back(digits[b & 0xf]);
    }
    return out;
}

static int hex_nibble(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

std::vector<uint8_t> from_hex(std::string_view hex) {
    if (hex.size() % 2 != 0)
        throw Error(Errc::parse_error, "hex: odd length " + std::to_string(hex.size()));
    std::vector<uint8_t> out(hex.size() / 2);
    for (size_t i = 0; i < hex.size(); ++i) {
        int n = hex_nibble(hex[i]);
        if (n < 0)
            throw Error(Errc::parse_error, "hex: bad digit at byte offset " + std::to_string(i));
        if (i % 2 == 0)
            out[i / 2] = static_cast<uint8_t>(n << 4);
        else
            out[i / 2] |= static_cast<uint8_t>(n);
    }
    return out;
}

// ---- labeled records: one "key value" pair per line ----

namespace {

using Record = std::map<std::string, std::string, std::less<>>;

Record parse_record(const std::string& text, const std::string& path) {
    Record rec;
    std::istringstream in(text);
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        auto sp = line.find(' ');
        if (sp == std::string::npos)
            throw Error(Errc::parse_error, path + ":" + std::to_string(lineno) + ": expected 'key value'");
        rec[line.substr(0, sp)] = line.substr(sp + 1);
    }
    return rec;
}

const std::string& need(const Record& rec, std::string_view key, const std::string& path) {
    auto it = rec.find(key);
    if (it == rec.end())
        throw Error(Errc::parse_error, path + ": missing field '" + std::string(key) + "'");
    return it->second;
}

uint64_t need_u64(const Record& rec, std::string_view key, const std::string& path) {
    const std::string& s = need(rec, key, path);
    try {
        size_t used = 0;
        uint64_t v = std::stoull(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw Error(Errc::parse_error, path + ": field '" + std::string(key) + "' is not an integer");
    }
}

Scalar need_scalar(const Record& rec, std::string_view key, const std::string& path, const Group& g) {
    return g.decode_scalar(from_hex(need(rec, key, path)));
}

G1 need_g1(const Record& rec, std::string_view key, const std::string& path, const Group& g) {
    return g.decode_g1(from_hex(need(rec, key, path)));
}

G2 need_g2(const Record& rec, std::string_view key, const std::string& path, const Group& g) {
    return g.decode_g2(from_hex(need(rec, key, path)));
}

std::string id_hex(std::string_view id) {
    return to_hex({reinterpret_cast<const uint8_t*>(id.data()), id.size()});
}

std::string id_from_hex(std::string_view hex) {
    auto bytes = from_hex(hex);
    return std::string(bytes.begin(), bytes.end());
}

} // namespace

void save_params(const std::string& path, const Group& g, const clss::SystemParams& params) {
    std::ostringstream out;
    const auto& gp = params.group;
    out << "backend " << (gp.backend == BackendId::toy ? "toy" : "production") << "\n";
    out << "q " << gp.q << "\n";
    out << "p " << gp.p << "\n";
    out << "g0 " << gp.g0 << "\n";
    out << "ppub1 " << to_hex(g.encode_g1(params.ppub1)) << "\n";
    out << "ppub2 " << to_hex(g.encode_g2(params.ppub2)) << "\n";
    write_file_atomic(path, out.str());
}

LoadedSystem load_params(const std::string& path) {
    auto rec = parse_record(read_file(path), path);
    if (need(rec, "backend", path) != "toy")
        throw Error(Errc::invalid_params, path + ": only the toy backend is built in");
    ToyGroup group = toy_setup(need_u64(rec, "q", path), need_u64(rec, "p", path),
                               need_u64(rec, "g0", path));
    clss::SystemParams params;
    params.group = group.params();
    params.ppub1 = need_g1(rec, "ppub1", path, group);
    params.ppub2 = need_g2(rec, "ppub2", path, group);
    if (group.pair(params.ppub1, group.params().P) != params.ppub2)
        throw Error(Errc::invalid_params, path + ": pair(Ppub1, P) != Ppub2");
    return LoadedSystem{group, params};
}

void save_master(const std::string& path, const Group& g, const clss::MasterKey& master) {
    write_file_atomic(path, "s " + to_hex(g.encode_scalar(master.s)) + "\n");
}

clss::MasterKey load_master(const std::string& path, const Group& g) {
    auto rec = parse_record(read_file(path), path);
    return clss::MasterKey{need_scalar(rec, "s", path, g)};
}

void save_obu_keys(const std::string& path, const Group& g, std::string_view id,
                   const protocol::ObuKeys& keys) {
    std::ostringstream out;
    out << "id_hex " << id_hex(id) << "\n";
    out << "x " << to_hex(g.encode_scalar(keys.sk.x)) << "\n";
    out << "r_id " << to_hex(g.encode_g1(keys.sk.partial.r_id)) << "\n";
    out << "s_id " << to_hex(g.encode_scalar(keys.sk.partial.s_id)) << "\n";
    out << "pk1 " << to_hex(g.encode_g2(keys.pk.pk1)) << "\n";
    out << "pk2 " << to_hex(g.encode_g1(keys.pk.pk2)) << "\n";
    out << "pk3 " << to_hex(g.encode_g1(keys.pk.pk3)) << "\n";
    write_file_atomic(path, out.str());
}

LoadedObu load_obu_keys(const std::string& path, const Group& g) {
    auto rec = parse_record(read_file(path), path);
    LoadedObu out;
    out.id = id_from_hex(need(rec, "id_hex", path));
    out.keys.sk.x = need_scalar(rec, "x", path, g);
    out.keys.sk.partial.r_id = need_g1(rec, "r_id", path, g);
    out.keys.sk.partial.s_id = need_scalar(rec, "s_id", path, g);
    out.keys.pk.pk1 = need_g2(rec, "pk1", path, g);
    out.keys.pk.pk2 = need_g1(rec, "pk2", path, g);
    out.keys.pk.pk3 = need_g1(rec, "pk3", path, g);
    return out;
}

void save_rsu_key(const std::string& path, const Group& g, std::string_view id,
                  const protocol::RsuPrivateKey& key) {
    std::ostringstream out;
    out << "id_hex " << id_hex(id) << "\n";
    out << "d_idr " << to_hex(g.encode_g1(key.d_idr)) << "\n";
    write_file_atomic(path, out.str());
}

LoadedRsu load_rsu_key(const std::string& path, const Group& g) {
    auto rec = parse_record(read_file(path), path);
    return LoadedRsu{id_from_hex(need(rec, "id_hex", path)),
                     protocol::RsuPrivateKey{need_g1(rec, "d_idr", path, g)}};
}

// list files: "version N" then one "entry ..." line per element

void save_lslu(const std::string& path, const Group& g, const protocol::LegitUserList& list) {
    std::ostringstream out;
    out << "version " << list.version << "\n";
    for (const auto& e : list.entries)
        out << "entry " << id_hex(e.id) << " " << to_hex(g.encode_g2(e.pk1)) << " "
            << e.registered_at << "\n";
    write_file_atomic(path, out.str());
}

protocol::LegitUserList load_lslu(const std::string& path, const Group& g) {
    protocol::LegitUserList list;
    std::istringstream in(read_file(path));
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string kind;
        ls >> kind;
        if (kind == "version") {
            ls >> list.version;
        } else if (kind == "entry") {
            std::string id, pk1;
            uint64_t at = 0;
            if (!(ls >> id >> pk1 >> at))
                throw Error(Errc::parse_error, path + ":" + std::to_string(lineno) + ": bad entry");
            list.entries.push_back(
                {id_from_hex(id), g.decode_g2(from_hex(pk1)), at});
        } else {
            throw Error(Errc::parse_error, path + ":" + std::to_string(lineno) + ": unknown record");
        }
    }
    return list;
}

void save_lsrb(const std::string& path, const protocol::RevocationList& list) {
    std::ostringstream out;
    out << "version " << list.version << "\n";
    for (const auto& e : list.entries)
        out << "entry " << id_hex(e.id) << " " << e.evidence << "\n";
    write_file_atomic(path, out.str());
}

protocol::RevocationList load_lsrb(const std::string& path) {
    protocol::RevocationList list;
    std::istringstream in(read_file(path));
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string kind;
        ls >> kind;
        if (kind == "version") {
            ls >> list.version;
        } else if (kind == "entry") {
            std::string id;
            if (!(ls >> id))
                throw Error(Errc::parse_error, path + ":" + std::to_string(lineno) + ": bad entry");
            std::string evidence;
            std::getline(ls, evidence);
            if (!evidence.empty() && evidence[0] == ' ') evidence.erase(0, 1);
            list.entries.push_back({id_from_hex(id), evidence});
        } else {
            throw Error(Errc::parse_error, path + ":" + std::to_string(lineno) + ": unknown record");
        }
    }
    return list;
}

void save_epochs(const std::string& path, const Group& g, const protocol::EpochArchive& archive) {
    std::ostringstream out;
    for (const auto& e : archive.all())
        out << "epoch " << e.region << " " << e.index << " " << e.valid_from << " " << e.valid_to
            << " " << to_hex(g.encode_g1(e.enc_pk)) << " " << to_hex(g.encode_scalar(e.enc_sk))
            << "\n";
    write_file_atomic(path, out.str());
}

protocol::EpochArchive load_epochs(const std::string& path, const Group& g) {
    protocol::EpochArchive archive;
    std::istringstream in(read_file(path));
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string kind;
        ls >> kind;
        if (kind != "epoch")
            throw Error(Errc::parse_error, path + ":" + std::to_string(lineno) + ": unknown record");
        protocol::RegionalKeyEpoch e;
        std::string pk, sk;
        if (!(ls >> e.region >> e.index >> e.valid_from >> e.valid_to >> pk >> sk))
            throw Error(Errc::parse_error, path + ":" + std::to_string(lineno) + ": bad epoch");
        e.enc_pk = g.decode_g1(from_hex(pk));
        e.enc_sk = g.decode_scalar(from_hex(sk));
        archive.add(std::move(e));
    }
    return archive;
}

void save_signature(const std::string& path, const Group& g, const G1& sigma) {
    write_file_atomic(path, to_hex(g.encode_g1(sigma)) + "\n");
}

G1 load_signature(const std::string& path, const Group& g) {
    std::string text = read_file(path);
    while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) text.pop_back();
    return g.decode_g1(from_hex(text));
}

} // namespace iovauth::store
