#include "cvqt/teleport.hpp"

#include <cmath>

#include "cvqt/entanglement.hpp"
#include "cvqt/opt.hpp"

namespace cvqt {

GammaMatrix gamma_matrix(const Mat& v_in, const TwoModeBlocks& blocks) {
    if (v_in.rows() != 2 || v_in.cols() != 2)
        throw Error(Errc::invalid_input, "input CM must be 2x2");
    const Mat z = z_reflection();
    Mat g = 2.0 * v_in + z * blocks.a * z + blocks.b - z * blocks.c -
            blocks.c.transposed() * z;
    // symmetrize away rounding
    const double off = 0.5 * (g(0, 1) + g(1, 0));
    g(0, 1) = g(1, 0) = off;
    if (det2(g) < 1.0 - 1e-9)
        throw Error(Errc::invalid_input, "Gamma determinant below 1: unphysical inputs");
    return GammaMatrix{g};
}

std::array<double, 2> optimal_delta(const Vec& d_channel) {
    if (d_channel.size() != 4)
        throw Error(Errc::dimension_mismatch, "channel displacement must have length 4");
    const double d1 = 0.5 * d_channel[0];
    const double d2 = 0.5 * d_channel[1];
    const double d3 = 0.5 * d_channel[2];
    const double d4 = 0.5 * d_channel[3];
    return {d1 - d3 + 0.0, -d2 - d4 + 0.0};  // + 0.0 folds away negative zero
}

FidelityReport fidelity(const Mat& v_in, const GaussianState& channel,
                        std::optional<std::array<double, 2>> delta) {
    if (channel.n_modes() != 2)
        throw Error(Errc::invalid_cm, "teleportation channel must have two modes");
    GammaMatrix gamma = gamma_matrix(v_in, TwoModeBlocks::from_cm(channel.cm));

    const std::array<double, 2> d_opt = optimal_delta(channel.displacement);
    const std::array<double, 2> d_used = delta.value_or(d_opt);

    const double d1 = 0.5 * channel.displacement[0];
    const double d2 = 0.5 * channel.displacement[1];
    const double d3 = 0.5 * channel.displacement[2];
    const double d4 = 0.5 * channel.displacement[3];
    const Vec h{-d_used[0] + d1 - d3, -d_used[1] - d2 - d4};

    const double q = dot(h, inv2(gamma.m) * h);
    const double f = std::exp(-q) / std::sqrt(gamma.determinant());
    return FidelityReport{f, gamma, d_used, FidelityMethod::closed_form};
}

double coherent_fidelity_standard_form(double a, double b, double c, double c_prime) {
    const double var_xm = a + b - 2.0 * c;
    const double var_pp = a + b + 2.0 * c_prime;
    if (var_xm <= 0.0 || var_pp <= 0.0)
        throw Error(Errc::invalid_cm, "standard-form invariants give non-positive variances");
    return 1.0 / std::sqrt((1.0 + var_xm) * (1.0 + var_pp));
}

LocalSqueezeOptimum local_squeeze_optimize(const GaussianState& channel) {
    if (channel.n_modes() != 2)
        throw Error(Errc::invalid_cm, "local squeeze optimization needs a two-mode channel");
    const Mat coherent_in = 0.5 * Mat::identity(2);

    auto f_of_kappa = [&](double kappa) {
        Vec s{std::exp(kappa), std::exp(-kappa), std::exp(kappa), std::exp(-kappa)};
        Mat sv = Mat::diag(s) * channel.cm.matrix() * Mat::diag(s);
        TwoModeBlocks blocks = TwoModeBlocks::from_matrix(sv);
        return 1.0 / std::sqrt(gamma_matrix(coherent_in, blocks).determinant());
    };

    auto [kappa, f_max] = golden_max(f_of_kappa, -6.0, 6.0, 1e-10);
    return LocalSqueezeOptimum{kappa, f_max, pt_min_symplectic_eigenvalue(channel.cm)};
}

}  // namespace cvqt
