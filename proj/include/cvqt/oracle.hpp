#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cvqt/network.hpp"
#include "cvqt/symplectic.hpp"

namespace cvqt {

/// Uniform midpoint grid on [-L, L] per axis; point i sits at
/// -L + (i + 1/2) h so that the grid is symmetric about the origin.
struct PhaseGrid {
    double half_width = 6.0;
    std::size_t points_per_axis = 128;
    std::vector<std::string> axes;

    double spacing() const { return 2.0 * half_width / static_cast<double>(points_per_axis); }
    double coord(std::size_t i) const {
        return -half_width + (static_cast<double>(i) + 0.5) * spacing();
    }
};

/// Grid that covers all listed states out to sigma_mult marginal deviations.
PhaseGrid grid_for(const std::vector<const GaussianState*>& states,
                   std::size_t points_per_axis, double sigma_mult = 6.0);

/// Wigner function sampled on the grid; one or two modes.  True Wigner
/// functions built here are Gaussian mixtures; negative values only enter
/// through the explicit mixture-difference constructor.
struct NumericWigner {
    PhaseGrid grid;
    std::size_t n_modes = 1;
    std::vector<double> values;  // row-major over (x1, p1[, x2, p2])

    double integral() const;
};

NumericWigner wigner_of(const GaussianState& state, const PhaseGrid& grid);

/// (w_a - weight * w_b) / norm, pointwise on a shared grid.
NumericWigner wigner_mixture_difference(const NumericWigner& w_a, const NumericWigner& w_b,
                                        double weight, double norm);

/// Teleportation kernel reduced to the difference variable: K0 on the
/// (2n-1)^2 lattice of grid-point differences, built by direct quadrature.
struct KernelTable {
    double spacing;
    std::size_t n;            // channel grid points per axis
    std::vector<double> k0;   // (2n-1) x (2n-1), row-major over (sx, sp)

    double integral() const;
    std::array<double, 2> mean() const;
};

KernelTable kernel_table(const NumericWigner& channel, double norm_tol = 1e-3);

/// Grid-quadrature teleportation fidelity for a pure Gaussian input with CM
/// v_in.  delta uses the same parameterization as teleport::optimal_delta;
/// omitted delta means the compensation that centres the kernel.
double kernel_fidelity(const KernelTable& table, const Mat& v_in,
                       std::optional<std::array<double, 2>> delta = std::nullopt);
double kernel_fidelity(const NumericWigner& channel, const Mat& v_in,
                       std::optional<std::array<double, 2>> delta = std::nullopt);

struct McEstimate {
    double fidelity;
    double std_error;
    std::size_t n_samples;
};

/// Samples the Bell measurement outcomes of the full protocol and averages
/// the per-outcome output fidelity.  Deterministic for a fixed seed.
McEstimate montecarlo_protocol(const GaussianState& channel, const GaussianState& input,
                               std::size_t n_samples, std::uint64_t rng_seed);

struct NonGaussianBranchResult {
    double f1;          // non-Gaussian conditional fidelity (grid accuracy)
    double f_assisted;  // P0 F0 + P1 F1
    double p0;
    double f0;          // Gaussian conditional fidelity (closed form)
    double f_tr;        // non-assisted fidelity (closed form)
};

/// Builds W1 = (W_tr - P0 W0) / P1 on the grid and maximizes its kernel
/// fidelity over a displacement grid with one refinement level.
NonGaussianBranchResult non_gaussian_branch_fidelity(const ThreeModeBlocks& net,
                                                     const SqueezedProjectorSpec& spec,
                                                     const Mat& v_in,
                                                     const PhaseGrid& grid);

}  // namespace cvqt
