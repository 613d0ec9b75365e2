#pragma once

#include <array>
#include <optional>
#include <string>

#include "cvqt/symplectic.hpp"

namespace cvqt {

/// Noise matrix Gamma = 2 V_in + Z A Z + B - Z C - C^T Z^T of the
/// teleportation channel; symmetric positive definite with det >= 1.
struct GammaMatrix {
    Mat m;  // 2x2

    double determinant() const { return det2(m); }
};

GammaMatrix gamma_matrix(const Mat& v_in, const TwoModeBlocks& channel_blocks);

/// Bob's compensating displacement, in the half-displacement
/// parameterization d_ch = 2 (d1, d2, d3, d4)^T: returns
/// (d1 - d3, -d2 - d4) from the plain quadrature displacement.
std::array<double, 2> optimal_delta(const Vec& d_channel);

enum class FidelityMethod { closed_form, oracle };

struct FidelityReport {
    double fidelity;
    GammaMatrix gamma;
    std::array<double, 2> delta;
    FidelityMethod method;
};

/// Teleportation fidelity of a pure single-mode Gaussian input through a
/// two-mode Gaussian channel.  With delta omitted the optimal compensation
/// is used and F = 1/sqrt(det Gamma); otherwise the quadratic penalty
/// exp(-h^T Gamma^-1 h) multiplies it.
FidelityReport fidelity(const Mat& v_in, const GaussianState& channel,
                        std::optional<std::array<double, 2>> delta = std::nullopt);

/// Coherent-state fidelity from standard-form invariants (a, b, c, c').
double coherent_fidelity_standard_form(double a, double b, double c, double c_prime);

struct LocalSqueezeOptimum {
    double kappa;
    double f_max;
    double nu_tilde_minus;  // reported alongside; see README on conventions
};

/// Maximizes the coherent-input fidelity over the local two-sided squeeze
/// S = diag(e^k, e^-k, e^k, e^-k) applied to the channel.
LocalSqueezeOptimum local_squeeze_optimize(const GaussianState& channel);

}  // namespace cvqt
