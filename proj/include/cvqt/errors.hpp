#pragma once

#include <stdexcept>
#include <string>

namespace cvqt {

enum class Errc {
    wrong_shape,
    not_symmetric,
    not_bona_fide,
    dimension_mismatch,
    index_out_of_range,
    negative_discriminant,
    degenerate_block,
    numerical_failure,
    negative_squeezing,
    invalid_cm,
    invalid_input,
    g_out_of_range,
    grid_too_small,
    negative_probability,
};

const char* errc_name(Errc code);

/// Domain error carrying a machine-readable code alongside the message.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    Errc code() const { return code_; }
    const char* code_name() const { return errc_name(code_); }

private:
    Errc code_;
};

}  // namespace cvqt
