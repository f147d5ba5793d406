#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "iovauth/protocol.hpp"

// Binary service-request format: type-tagged, length-prefixed fields in
// the order (T, f.C1, f.C2, sigma, r, r1, r2, PK1', PK2', PK3', Ppub1').
namespace iovauth::wire {

std::vector<uint8_t> encode_request(const Group& g, const protocol::ServiceRequest& req);

// Throws parse_error (framing, offsets reported) or invalid_element
// (well-framed but not a group member).
protocol::ServiceRequest decode_request(const Group& g, std::span<const uint8_t> in);

} // namespace iovauth::wire
