#pragma once

#include <array>
#include <optional>

#include "cvqt/symplectic.hpp"

namespace cvqt {

/// Three-mode CM split into 2x2 blocks,
///   V = [[A, F, E], [F^T, B, D], [E^T, D^T, C]],
/// for modes (a, b, c) = (sender, receiver, assistant).
struct ThreeModeBlocks {
    Mat a, b, c;  // diagonal blocks, symmetric
    Mat f;        // a-b correlations
    Mat e;        // a-c correlations
    Mat d;        // b-c correlations
    Vec d_a, d_b, d_c;  // 2-vector displacements

    static ThreeModeBlocks from_state(const GaussianState& state);
    Mat reassemble() const;
    Vec displacement() const;

    Mat v_traced() const;  // two-mode CM of (a, b)
    Vec d_traced() const;
};

/// Pure squeezed projector parameters; xi lives on the extended
/// half-line [0, +inf] with the boundaries meaning homodyne detection.
struct SqueezedProjectorSpec {
    double xi = 1.0;
    double phi = 0.0;
    Vec alpha{0.0, 0.0};  // measurement displacement d0

    bool boundary() const;
};

/// CM of the squeezed projector, Eq-form (xi/2) th th^T + (1/(2 xi)) th_perp th_perp^T.
Mat squeezed_projector_cm(double xi, double phi);

/// Two-mode channel left after the assistant's measurement.  The CM does
/// not depend on the measurement displacement; only the drift does.
struct ConditionalChannel {
    GaussianState state;
    std::optional<double> probability;  // set for pure, finite-xi specs
};

/// Non-assisted fidelity through the (a, b) reduction of the network.
double traced_fidelity(const ThreeModeBlocks& net, const Mat& v_in);

struct MMatrix {
    Mat m;     // real symmetric positive definite
    double g;  // normalization factor, > 1/2
};

/// Conditioning matrix for a general Gaussian measurement CM v0 against the
/// assistant block c_block.
MMatrix m_matrix(const Mat& c_block, const Mat& v0);

/// Exact homodyne limits of the conditioning matrix (xi -> 0 or +inf).
Mat m_matrix_homodyne(const Mat& c_block, double phi, bool xi_infinite);

ConditionalChannel condition_on_measurement(const ThreeModeBlocks& net,
                                            const SqueezedProjectorSpec& spec);
ConditionalChannel condition_on_measurement(const ThreeModeBlocks& net, const Mat& v0,
                                            const Vec& d0);

/// F^(0) through Gamma^(0) = Gamma^tr - Sigma^T M Sigma.
double conditional_fidelity(const ThreeModeBlocks& net, const Mat& v_in,
                            const SqueezedProjectorSpec& spec);

/// Precomputed quantities for the measurement optimization.
struct OptimizerVectors {
    double det_gamma_tr;
    Mat c_block;      // 2x2
    Mat u_mat;        // U = Sigma J Gamma^tr J^T Sigma^T
    double u_x, u_y;  // u = (det C + 1/4, (det Sigma)^2 - Tr(J C J^T U))

    std::array<double, 2> k(double phi) const;  // (th^T U th, th^T C th)
    double gamma(double phi) const;
    double omega(double phi) const;
    bool p(double phi) const;  // gamma(phi) < 0 and gamma(phi - pi/2) < 0
};

OptimizerVectors optimizer_vectors(const ThreeModeBlocks& net, const Mat& v_in);

/// Best squeezing factor at fixed phase: the interior stationary point when
/// p(phi) holds, otherwise the better of the two homodyne boundaries.
double optimal_xi(double phi, const OptimizerVectors& vectors);

/// F(xi, phi) evaluated through the u/k vector form; accepts xi in [0, +inf].
double fidelity_from_vectors(const OptimizerVectors& vectors, double xi, double phi);

enum class OptimizerBranch { interior, boundary_homodyne };

struct OptimizerResult {
    double xi_star;  // may be 0 or +inf on the homodyne branch
    double phi_star;
    double f_star;
    OptimizerBranch branch;
    double gamma_at_star;
    double omega_at_star;
    bool p_at_star;
};

struct OptimizerOptions {
    std::size_t phi_grid_points = 720;
};

OptimizerResult optimize_measurement(const ThreeModeBlocks& net, const Mat& v_in,
                                     const OptimizerOptions& options = {});

}  // namespace cvqt
