#pragma once

#include <stdexcept>
#include <string>

namespace iovauth {

enum class Errc {
    invalid_params,
    invalid_element,
    non_invertible,
    degenerate_challenge,
    degenerate_identity,
    already_registered,
    revoked,
    overlapping_epoch,
    untraceable_epoch,
    bad_pseudonym,
    script_exhausted,
    parse_error,
    io_error,
};

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    Errc code() const { return code_; }

private:
    Errc code_;
};

const char* errc_name(Errc code);

} // namespace iovauth
