#pragma once

#include <cstdint>
#include <random>

#include "cvqt/symplectic.hpp"

namespace cvqt {

using Rng = std::mt19937_64;

/// Random symplectic built from interleaved single-mode rotations,
/// squeezers and nearest-neighbour beam splitters.
SymplecticMatrix random_symplectic(std::size_t n_modes, Rng& rng, double r_max = 0.8);

/// Random bona fide CM: thermal spectrum in [1/2, nu_max] conjugated by a
/// random symplectic.
CovarianceMatrix random_cm(std::size_t n_modes, Rng& rng, double nu_max = 1.6,
                           double r_max = 0.8);

/// Random Gaussian state with bounded displacement.
GaussianState random_state(std::size_t n_modes, Rng& rng, double nu_max = 1.6,
                           double r_max = 0.8, double d_max = 1.0);

}  // namespace cvqt
