#include "iovauth/hashes.hpp"

#include <fstream>
#include <sstream>

#include <openssl/sha.h>

namespace iovauth {

// item tags inside hash inputs
static constexpr uint8_t kTagScalar = 0x01;
static constexpr uint8_t kTagG1 = 0x02;
static constexpr uint8_t kTagG2 = 0x03;
static constexpr uint8_t kTagBytes = 0x04;
static constexpr uint8_t kTagU64 = 0x05;

static constexpr uint8_t kKdfTag = 0x10;
static constexpr uint8_t kMacTag = 0x11;

static void append_be32(std::vector<uint8_t>& buf, uint32_t v) {
    buf.push_back(static_cast<uint8_t>(v >> 24));
    buf.push_back(static_cast<uint8_t>(v >> 16));
    buf.push_back(static_cast<uint8_t>(v >> 8));
    buf.push_back(static_cast<uint8_t>(v));
}

static void append_be64(std::vector<uint8_t>& buf, uint64_t v) {
    for (int i = 7; i >= 0; --i) buf.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

HashInput& HashInput::add_bytes(std::span<const uint8_t> b) {
    buf_.push_back(kTagBytes);
    append_be32(buf_, static_cast<uint32_t>(b.size()));
    buf_.insert(buf_.end(), b.begin(), b.end());
    return *this;
}

HashInput& HashInput::add_str(std::string_view s) {
    return add_bytes({reinterpret_cast<const uint8_t*>(s.data()), s.size()});
}

HashInput& HashInput::add_u64(uint64_t v) {
    buf_.push_back(kTagU64);
    append_be64(buf_, v);
    return *this;
}

HashInput& HashInput::add_scalar(Scalar k) {
    buf_.push_back(kTagScalar);
    auto enc = g_->encode_scalar(k);
    buf_.insert(buf_.end(), enc.begin(), enc.end());
    return *this;
}

HashInput& HashInput::add_g1(const G1& a) {
    buf_.push_back(kTagG1);
    auto enc = g_->encode_g1(a);
    buf_.insert(buf_.end(), enc.begin(), enc.end());
    return *this;
}

HashInput& HashInput::add_g2(const G2& a) {
    buf_.push_back(kTagG2);
    auto enc = g_->encode_g2(a);
    buf_.insert(buf_.end(), enc.begin(), enc.end());
    return *this;
}

std::array<uint8_t, 32> sha256(std::span<const uint8_t> data) {
    std::array<uint8_t, 32> out{};
    SHA256(data.data(), data.size(), out.data());
    return out;
}

static uint64_t digest_mod(const std::array<uint8_t, 32>& d, uint64_t m) {
    uint64_t v = 0;
    for (uint8_t b : d) v = (mulmod_u64(v, 256, m) + b) % m;
    return v;
}

uint64_t digest_to_nonzero_residue(uint8_t tag, std::span<const uint8_t> data, uint64_t m) {
    std::vector<uint8_t> buf;
    buf.reserve(data.size() + 2);
    buf.push_back(tag);
    buf.insert(buf.end(), data.begin(), data.end());
    uint64_t v = digest_mod(sha256(buf), m);
    uint8_t counter = 0;
    while (v == 0) {
        buf.push_back(counter++);
        v = digest_mod(sha256(buf), m);
        buf.pop_back();
    }
    return v;
}

Scalar Sha256Hashes::hash(HashDomain d, const HashInput& in) {
    return Scalar{digest_to_nonzero_residue(static_cast<uint8_t>(d), in.bytes(), q_)};
}

void ScriptedHashes::preload(HashDomain d, uint64_t value) {
    if (value == 0 || value >= q_)
        throw Error(Errc::invalid_params, "scripted hash value out of [1, q)");
    fifo_[static_cast<size_t>(d)].push_back(value);
}

void ScriptedHashes::preload_n(HashDomain d, uint64_t value, size_t n) {
    for (size_t i = 0; i < n; ++i) preload(d, value);
}

Scalar ScriptedHashes::hash(HashDomain d, const HashInput&) {
    auto& fifo = fifo_[static_cast<size_t>(d)];
    if (fifo.empty()) throw Error(Errc::script_exhausted, "scripted hash oracle exhausted");
    uint64_t v = fifo.front();
    fifo.pop_front();
    return Scalar{v};
}

ScriptedHashes ScriptedHashes::from_text(const Group& g, std::string_view text) {
    ScriptedHashes h(g);
    std::istringstream in{std::string(text)};
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string tag;
        uint64_t value;
        if (!(ls >> tag >> value))
            throw Error(Errc::parse_error, "hash script line " + std::to_string(lineno) + ": expected 'tag value'");
        if (tag.size() != 2 || tag[0] != 'H' || tag[1] < '0' || tag[1] > '4')
            throw Error(Errc::parse_error, "hash script line " + std::to_string(lineno) + ": unknown tag " + tag);
        h.preload(static_cast<HashDomain>(tag[1] - '0'), value);
    }
    return h;
}

ScriptedHashes ScriptedHashes::from_file(const Group& g, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::io_error, "cannot open hash script " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return from_text(g, ss.str());
}

std::vector<uint8_t> kdf_expand(const Group& g, const G1& shared, size_t len) {
    std::vector<uint8_t> out;
    out.reserve(len);
    auto point = g.encode_g1(shared);
    uint32_t counter = 0;
    while (out.size() < len) {
        std::vector<uint8_t> block;
        block.push_back(kKdfTag);
        block.insert(block.end(), point.begin(), point.end());
        append_be32(block, counter++);
        auto d = sha256(block);
        size_t take = std::min(d.size(), len - out.size());
        out.insert(out.end(), d.begin(), d.begin() + take);
    }
    return out;
}

std::vector<uint8_t> mac_tag(const Group& g, Scalar key, Scalar msg) {
    std::vector<uint8_t> buf;
    buf.push_back(kMacTag);
    auto k = g.encode_scalar(key);
    auto m = g.encode_scalar(msg);
    buf.insert(buf.end(), k.begin(), k.end());
    buf.insert(buf.end(), m.begin(), m.end());
    auto d = sha256(buf);
    return {d.begin(), d.end()};
}

} // namespace iovauth
