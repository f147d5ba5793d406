#include "iovauth/wire.hpp"

namespace iovauth::wire {

static constexpr uint8_t kTagG1 = 0x02;
static constexpr uint8_t kTagG2 = 0x03;
static constexpr uint8_t kTagBytes = 0x04;
static constexpr uint8_t kTagTimestamp = 0x05;

static void put_field(std::vector<uint8_t>& out, uint8_t tag, std::span<const uint8_t> payload) {
    out.push_back(tag);
    uint32_t n = static_cast<uint32_t>(payload.size());
    out.push_back(static_cast<uint8_t>(n >> 24));
    out.push_back(static_cast<uint8_t>(n >> 16));
    out.push_back(static_cast<uint8_t>(n >> 8));
    out.push_back(static_cast<uint8_t>(n));
    out.insert(out.end(), payload.begin(), payload.end());
}

std::vector<uint8_t> encode_request(const Group& g, const protocol::ServiceRequest& req) {
    std::vector<uint8_t> out;
    std::vector<uint8_t> ts(8);
    for (int i = 0; i < 8; ++i) ts[7 - i] = static_cast<uint8_t>(req.ts >> (8 * i));
    put_field(out, kTagTimestamp, ts);
    put_field(out, kTagG1, g.encode_g1(req.f.c1));
    put_field(out, kTagBytes, req.f.c2);
    put_field(out, kTagG1, g.encode_g1(req.sigma));
    put_field(out, kTagBytes, req.report);
    put_field(out, kTagBytes, req.r1);
    put_field(out, kTagBytes, req.r2);
    put_field(out, kTagG2, g.encode_g2(req.pk1p));
    put_field(out, kTagG1, g.encode_g1(req.pk2p));
    put_field(out, kTagG1, g.encode_g1(req.pk3p));
    put_field(out, kTagG1, g.encode_g1(req.ppub1p));
    return out;
}

namespace {

class Reader {
public:
    explicit Reader(std::span<const uint8_t> in) : in_(in) {}

    std::span<const uint8_t> field(uint8_t want_tag) {
        if (pos_ >= in_.size()) fail("unexpected end of request");
        uint8_t tag = in_[pos_];
        if (tag != want_tag) fail("unexpected field tag");
        if (in_.size() - pos_ < 5) fail("truncated field header");
        uint64_t n = (uint64_t(in_[pos_ + 1]) << 24) | (uint64_t(in_[pos_ + 2]) << 16) |
                     (uint64_t(in_[pos_ + 3]) << 8) | uint64_t(in_[pos_ + 4]);
        pos_ += 5;
        if (in_.size() - pos_ < n) fail("field payload exceeds message");
        auto out = in_.subspan(pos_, n);
        pos_ += n;
        return out;
    }

    void finish() const {
        if (pos_ != in_.size())
            throw Error(Errc::parse_error,
                        "request: trailing bytes at offset " + std::to_string(pos_));
    }

private:
    [[noreturn]] void fail(const char* why) const {
        throw Error(Errc::parse_error,
                    "request: " + std::string(why) + " at offset " + std::to_string(pos_));
    }

    std::span<const uint8_t> in_;
    size_t pos_ = 0;
};

} // namespace

protocol::ServiceRequest decode_request(const Group& g, std::span<const uint8_t> in) {
    Reader rd(in);
    protocol::ServiceRequest req;
    auto ts = rd.field(kTagTimestamp);
    if (ts.size() != 8) throw Error(Errc::parse_error, "request: timestamp must be 8 bytes");
    req.ts = 0;
    for (uint8_t b : ts) req.ts = (req.ts << 8) | b;
    req.f.c1 = g.decode_g1(rd.field(kTagG1));
    auto c2 = rd.field(kTagBytes);
    req.f.c2.assign(c2.begin(), c2.end());
    req.sigma = g.decode_g1(rd.field(kTagG1));
    auto r = rd.field(kTagBytes);
    req.report.assign(r.begin(), r.end());
    auto r1 = rd.field(kTagBytes);
    req.r1.assign(r1.begin(), r1.end());
    auto r2 = rd.field(kTagBytes);
    req.r2.assign(r2.begin(), r2.end());
    req.pk1p = g.decode_g2(rd.field(kTagG2));
    req.pk2p = g.decode_g1(rd.field(kTagG1));
    req.pk3p = g.decode_g1(rd.field(kTagG1));
    req.ppub1p = g.decode_g1(rd.field(kTagG1));
    rd.finish();
    return req;
}

} // namespace iovauth::wire
