#pragma once

#include <complex>
#include <cstddef>
#include <string>

#include "cvqt/symplectic.hpp"

namespace cvqt {

/// Two-mode squeezed vacuum with squeezing factor r >= 0.
GaussianState tmsv(double r);

/// Two-mode squeezed thermal state; n_a = n_b = 1/2 recovers the pure TMSV.
GaussianState thermal_tmsv(double r, double n_a, double n_b);

/// N-mode squeezed vacuum: mode 0 squeezed in momentum, the rest in
/// position, then fed through the N-splitter cascade.
GaussianState nmsv(std::size_t n_modes, double r);

/// Three-mode state squeezing only mode 0 before the 3-splitter.
GaussianState cheap_three_mode(double r);

enum class InputKind { coherent, squeezed };

/// Single-mode pure Gaussian input state.  alpha sets the displacement
/// (x + i p)/sqrt(2); (r, phi) the squeezing for InputKind::squeezed.
GaussianState input_state(InputKind kind, std::complex<double> alpha = {0.0, 0.0},
                          double r = 0.0, double phi = 0.0);

enum class ChannelKind { tmsv, thermal_tmsv, nmsv, cheap_three_mode, custom };

struct ChannelSpec {
    ChannelKind kind = ChannelKind::tmsv;
    double r = 0.0;
    double n_a = 0.5;
    double n_b = 0.5;
    std::size_t n_modes = 2;
};

GaussianState build_channel(const ChannelSpec& spec);

ChannelKind channel_kind_from_string(const std::string& name);

}  // namespace cvqt
