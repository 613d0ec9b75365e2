#include "cvqt/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "cvqt/teleport.hpp"

namespace cvqt {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;
// exp(-0.5 * 140) ~ 4e-31: far below any quadrature tolerance here.
constexpr double kExpCutoff = 140.0;

void check_normalized(double integral, double tol, const char* what) {
    if (std::abs(integral - 1.0) > tol)
        throw Error(Errc::grid_too_small,
                    std::string(what) + " integrates to " + std::to_string(integral) +
                        "; enlarge the grid or raise the resolution");
}

}  // namespace

PhaseGrid grid_for(const std::vector<const GaussianState*>& states,
                   std::size_t points_per_axis, double sigma_mult) {
    double half_width = 0.0;
    std::size_t max_modes = 1;
    for (const GaussianState* s : states) {
        max_modes = std::max(max_modes, s->n_modes());
        for (std::size_t i = 0; i < s->cm.dim(); ++i) {
            const double reach =
                sigma_mult * std::sqrt(s->cm(i, i)) + std::abs(s->displacement[i]);
            half_width = std::max(half_width, reach);
        }
    }
    PhaseGrid grid;
    grid.half_width = half_width;
    grid.points_per_axis = points_per_axis;
    for (std::size_t m = 1; m <= max_modes; ++m) {
        grid.axes.push_back("x" + std::to_string(m));
        grid.axes.push_back("p" + std::to_string(m));
    }
    return grid;
}

double NumericWigner::integral() const {
    const double h = grid.spacing();
    double cell = 1.0;
    for (std::size_t k = 0; k < 2 * n_modes; ++k) cell *= h;
    double s = 0.0;
    for (double v : values) s += v;
    return s * cell;
}

namespace {

NumericWigner wigner_one_mode(const GaussianState& state, const PhaseGrid& grid) {
    const std::size_t n = grid.points_per_axis;
    const Mat omega = inverse(state.cm.matrix());
    const double norm = 1.0 / (kTwoPi * std::sqrt(det(state.cm.matrix())));

    NumericWigner w{grid, 1, std::vector<double>(n * n, 0.0)};
    std::vector<double> cx(n), cp(n);
    for (std::size_t i = 0; i < n; ++i) {
        cx[i] = grid.coord(i) - state.displacement[0];
        cp[i] = grid.coord(i) - state.displacement[1];
    }
    for (std::size_t i = 0; i < n; ++i) {
        const double qx = omega(0, 0) * cx[i] * cx[i];
        const double lx = 2.0 * omega(0, 1) * cx[i];
        for (std::size_t j = 0; j < n; ++j) {
            const double q = qx + lx * cp[j] + omega(1, 1) * cp[j] * cp[j];
            w.values[i * n + j] = q < kExpCutoff ? norm * std::exp(-0.5 * q) : 0.0;
        }
    }
    check_normalized(w.integral(), 1e-4, "one-mode Wigner function");
    return w;
}

NumericWigner wigner_two_mode(const GaussianState& state, const PhaseGrid& grid) {
    const std::size_t n = grid.points_per_axis;
    const double h = grid.spacing();
    const Mat omega = inverse(state.cm.matrix());
    const double norm =
        1.0 / (kTwoPi * kTwoPi * std::sqrt(det(state.cm.matrix())));

    NumericWigner w{grid, 2, std::vector<double>(n * n * n * n, 0.0)};
    std::vector<double> t0(n), t1(n), t2(n), t3(n);
    for (std::size_t i = 0; i < n; ++i) {
        t0[i] = grid.coord(i) - state.displacement[0];
        t1[i] = grid.coord(i) - state.displacement[1];
        t2[i] = grid.coord(i) - state.displacement[2];
        t3[i] = grid.coord(i) - state.displacement[3];
    }

    double* out = w.values.data();
    for (std::size_t i = 0; i < n; ++i) {
        const double a0 = t0[i];
        for (std::size_t j = 0; j < n; ++j) {
            const double a1 = t1[j];
            const double q01 = omega(0, 0) * a0 * a0 + 2.0 * omega(0, 1) * a0 * a1 +
                               omega(1, 1) * a1 * a1;
            const double l2 = 2.0 * (omega(0, 2) * a0 + omega(1, 2) * a1);
            const double l3 = 2.0 * (omega(0, 3) * a0 + omega(1, 3) * a1);
            for (std::size_t k = 0; k < n; ++k) {
                const double a2 = t2[k];
                const double base =
                    q01 + omega(2, 2) * a2 * a2 + l2 * a2;
                const double lin = l3 + 2.0 * omega(2, 3) * a2;
                // quadratic in t3 scanned by second differences
                double q = base + lin * t3[0] + omega(3, 3) * t3[0] * t3[0];
                double dq = lin * h + omega(3, 3) * (2.0 * t3[0] * h + h * h);
                const double ddq = 2.0 * omega(3, 3) * h * h;
                double* row = out + ((i * n + j) * n + k) * n;
                for (std::size_t l = 0; l < n; ++l) {
                    row[l] = q < kExpCutoff ? norm * std::exp(-0.5 * q) : 0.0;
                    q += dq;
                    dq += ddq;
                }
            }
        }
    }
    check_normalized(w.integral(), 1e-4, "two-mode Wigner function");
    return w;
}

}  // namespace

NumericWigner wigner_of(const GaussianState& state, const PhaseGrid& grid) {
    if (grid.points_per_axis < 2)
        throw Error(Errc::grid_too_small, "grid needs at least two points per axis");
    switch (state.n_modes()) {
        case 1: return wigner_one_mode(state, grid);
        case 2: return wigner_two_mode(state, grid);
        default:
            throw Error(Errc::invalid_input, "gridded Wigner supports one or two modes");
    }
}

NumericWigner wigner_mixture_difference(const NumericWigner& w_a, const NumericWigner& w_b,
                                        double weight, double norm) {
    if (w_a.values.size() != w_b.values.size() || w_a.n_modes != w_b.n_modes ||
        w_a.grid.points_per_axis != w_b.grid.points_per_axis)
        throw Error(Errc::dimension_mismatch, "mixture difference needs matching grids");
    if (norm <= 0.0) throw Error(Errc::negative_probability, "non-positive mixture norm");
    NumericWigner out{w_a.grid, w_a.n_modes, std::vector<double>(w_a.values.size())};
    for (std::size_t i = 0; i < out.values.size(); ++i)
        out.values[i] = (w_a.values[i] - weight * w_b.values[i]) / norm;
    return out;
}

double KernelTable::integral() const {
    double s = 0.0;
    for (double v : k0) s += v;
    return s * spacing * spacing;
}

std::array<double, 2> KernelTable::mean() const {
    const std::size_t m = 2 * n - 1;
    double sx = 0.0, sp = 0.0, tot = 0.0;
    for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = 0; b < m; ++b) {
            const double v = k0[a * m + b];
            tot += v;
            sx += v * (static_cast<double>(a) - static_cast<double>(n - 1)) * spacing;
            sp += v * (static_cast<double>(b) - static_cast<double>(n - 1)) * spacing;
        }
    if (tot == 0.0) throw Error(Errc::grid_too_small, "empty kernel table");
    return {sx / tot, sp / tot};
}

KernelTable kernel_table(const NumericWigner& channel, double norm_tol) {
    if (channel.n_modes != 2)
        throw Error(Errc::invalid_input, "kernel needs a two-mode channel Wigner");
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(channel.grid.points_per_axis);
    const double h = channel.grid.spacing();
    const std::ptrdiff_t m = 2 * n - 1;

    KernelTable table{h, channel.grid.points_per_axis,
                      std::vector<double>(static_cast<std::size_t>(m * m), 0.0)};

    // K0(s) = h^2 sum_v W(v, Z v + s); with the reflection-symmetric grid
    // every sample lands on a lattice difference, so no interpolation occurs.
    const double* w = channel.values.data();
    double* k0 = table.k0.data();
    for (std::ptrdiff_t i = 0; i < n; ++i) {          // v_x index
        for (std::ptrdiff_t j = 0; j < n; ++j) {      // v_p index
            const std::ptrdiff_t jr = n - 1 - j;      // index of -v_p
            for (std::ptrdiff_t k = 0; k < n; ++k) {  // w_x index
                const double* row = w + ((i * n + j) * n + k) * n;
                // s_x = (k - i) h, s_p = (l - jr) h
                double* krow = k0 + (k - i + (n - 1)) * m + (n - 1) - jr;
                for (std::ptrdiff_t l = 0; l < n; ++l) krow[l] += row[l];
            }
        }
    }
    for (double& v : table.k0) v *= h * h;
    check_normalized(table.integral(), norm_tol, "teleportation kernel");
    return table;
}

double kernel_fidelity(const KernelTable& table, const Mat& v_in,
                       std::optional<std::array<double, 2>> delta) {
    if (v_in.rows() != 2 || v_in.cols() != 2)
        throw Error(Errc::invalid_input, "input CM must be 2x2");

    // Quadrature shift applied by the receiver; the half-displacement
    // parameterization matches teleport::optimal_delta.
    std::array<double, 2> shift{};
    if (delta) {
        shift = {2.0 * (*delta)[0], 2.0 * (*delta)[1]};
    } else {
        const std::array<double, 2> mu = table.mean();
        shift = {-mu[0], -mu[1]};
    }

    const Mat two_v_in = 2.0 * v_in;
    const Mat prec = inv2(two_v_in);
    const double g_norm = 1.0 / (kTwoPi * std::sqrt(det2(two_v_in)));

    const std::size_t m = 2 * table.n - 1;
    const double h = table.spacing;
    double f = 0.0;
    for (std::size_t a = 0; a < m; ++a) {
        const double sx =
            (static_cast<double>(a) - static_cast<double>(table.n - 1)) * h + shift[0];
        for (std::size_t b = 0; b < m; ++b) {
            const double v = table.k0[a * m + b];
            if (v == 0.0) continue;
            const double sp =
                (static_cast<double>(b) - static_cast<double>(table.n - 1)) * h + shift[1];
            const double q = prec(0, 0) * sx * sx + 2.0 * prec(0, 1) * sx * sp +
                             prec(1, 1) * sp * sp;
            if (q < kExpCutoff) f += v * g_norm * std::exp(-0.5 * q);
        }
    }
    return kTwoPi * f * h * h;
}

double kernel_fidelity(const NumericWigner& channel, const Mat& v_in,
                       std::optional<std::array<double, 2>> delta) {
    return kernel_fidelity(kernel_table(channel), v_in, delta);
}

namespace {

class GaussianSampler {
public:
    explicit GaussianSampler(std::uint64_t seed) : rng_(seed) {}

    // Box-Muller; independent of libstdc++'s normal_distribution state.
    double next() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = 0.0;
        do {
            u1 = uniform();
        } while (u1 <= 0.0);
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(kTwoPi * u2);
        have_spare_ = true;
        return r * std::cos(kTwoPi * u2);
    }

private:
    double uniform() {
        return (static_cast<double>(rng_() >> 11) + 0.5) * 0x1.0p-53;
    }

    std::mt19937_64 rng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace

McEstimate montecarlo_protocol(const GaussianState& channel, const GaussianState& input,
                               std::size_t n_samples, std::uint64_t rng_seed) {
    if (channel.n_modes() != 2 || input.n_modes() != 1)
        throw Error(Errc::invalid_input, "protocol needs a two-mode channel and one-mode input");
    if (n_samples < 1000)
        throw Error(Errc::invalid_input, "need at least 1000 samples");

    // Joint moments over (in, a, b) with the Bell variables
    // m = ((x_a - x_in)/sqrt2, (p_a + p_in)/sqrt2).
    Mat vj(6, 6);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) vj(i, j) = input.cm(i, j);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) vj(i + 2, j + 2) = channel.cm(i, j);
    Vec mu{input.displacement[0], input.displacement[1],
           channel.displacement[0], channel.displacement[1],
           channel.displacement[2], channel.displacement[3]};

    const double is2 = 1.0 / std::sqrt(2.0);
    Mat rows(2, 6);
    rows(0, 0) = -is2;
    rows(0, 2) = is2;
    rows(1, 1) = is2;
    rows(1, 3) = is2;

    Mat sigma_m = rows * vj * rows.transposed();
    Vec mu_m = rows * mu;

    Mat cross(2, 2);  // Cov(b quadratures, m)
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < 6; ++k) s += vj(4 + i, k) * rows(j, k);
            cross(i, j) = s;
        }

    const Mat sigma_m_inv = inv2(sigma_m);
    const Mat gain = cross * sigma_m_inv;
    Mat v_cond(2, 2);
    {
        Mat corr = gain * cross.transposed();
        for (std::size_t i = 0; i < 2; ++i)
            for (std::size_t j = 0; j < 2; ++j) v_cond(i, j) = channel.cm(2 + i, 2 + j) - corr(i, j);
    }

    // Cholesky factor of the 2x2 outcome covariance.
    const double l00 = std::sqrt(sigma_m(0, 0));
    const double l10 = sigma_m(1, 0) / l00;
    const double l11 = std::sqrt(std::max(sigma_m(1, 1) - l10 * l10, 0.0));

    // Per-outcome overlap pieces (input is pure).
    Mat v_sum = input.cm.matrix() + v_cond;
    const Mat prec = inv2(v_sum);
    const double norm = 1.0 / std::sqrt(det2(v_sum));

    // Exact compensation of the channel drift (the optimal receiver shift).
    const double mu_kx = channel.displacement[2] - channel.displacement[0];
    const double mu_kp = channel.displacement[3] + channel.displacement[1];

    GaussianSampler gauss(rng_seed);
    double sum = 0.0, sum_sq = 0.0;
    for (std::size_t s = 0; s < n_samples; ++s) {
        const double z0 = gauss.next();
        const double z1 = gauss.next();
        const double m0 = mu_m[0] + l00 * z0;
        const double m1 = mu_m[1] + l10 * z0 + l11 * z1;

        const double r0 = m0 - mu_m[0];
        const double r1 = m1 - mu_m[1];
        double out_x = mu[4] + gain(0, 0) * r0 + gain(0, 1) * r1;
        double out_p = mu[5] + gain(1, 0) * r0 + gain(1, 1) * r1;
        // receiver displacement: Bell compensation plus channel drift removal
        out_x += -std::sqrt(2.0) * m0 - mu_kx;
        out_p += std::sqrt(2.0) * m1 - mu_kp;

        const double dx = out_x - input.displacement[0];
        const double dp = out_p - input.displacement[1];
        const double q = prec(0, 0) * dx * dx + 2.0 * prec(0, 1) * dx * dp +
                         prec(1, 1) * dp * dp;
        const double f = norm * std::exp(-0.5 * q);
        sum += f;
        sum_sq += f * f;
    }

    const double nd = static_cast<double>(n_samples);
    const double mean = sum / nd;
    const double var = std::max((sum_sq - nd * mean * mean) / (nd - 1.0), 0.0);
    return McEstimate{mean, std::sqrt(var / nd), n_samples};
}

NonGaussianBranchResult non_gaussian_branch_fidelity(const ThreeModeBlocks& net,
                                                     const SqueezedProjectorSpec& spec,
                                                     const Mat& v_in,
                                                     const PhaseGrid& grid) {
    if (spec.boundary())
        throw Error(Errc::invalid_input,
                    "dichotomic branch needs a normalizable (finite-xi) projector");
    ConditionalChannel cond = condition_on_measurement(net, spec);
    if (!cond.probability)
        throw Error(Errc::invalid_input, "measurement spec has no defined probability");
    const double p0 = *cond.probability;
    const double p1 = 1.0 - p0;
    if (p1 <= 1e-12)
        throw Error(Errc::negative_probability, "non-Gaussian branch has no weight");

    GaussianState traced(net.d_traced(), CovarianceMatrix::validated(net.v_traced()));

    NumericWigner w_tr = wigner_of(traced, grid);
    NumericWigner w0 = wigner_of(cond.state, grid);
    NumericWigner w1 = wigner_mixture_difference(w_tr, w0, p0, p1);
    if (std::abs(w1.integral() - 1.0) > 1e-2)
        throw Error(Errc::grid_too_small, "non-Gaussian Wigner poorly normalized");

    KernelTable k1 = kernel_table(w1, 1e-2);

    // Displacement search: 21x21 grid around the Gaussian-branch optimum,
    // then one shrunken refinement pass.
    const std::array<double, 2> center0 = optimal_delta(cond.state.displacement);
    const std::array<double, 2> center_tr = optimal_delta(traced.displacement);
    double span = 1.0 + std::max(std::abs(center_tr[0] - center0[0]),
                                 std::abs(center_tr[1] - center0[1]));

    std::array<double, 2> center = center0;
    double best_f = -1.0;
    std::array<double, 2> best_delta = center0;
    for (int pass = 0; pass < 2; ++pass) {
        for (int ix = -10; ix <= 10; ++ix) {
            for (int ip = -10; ip <= 10; ++ip) {
                const std::array<double, 2> d{center[0] + span * ix / 10.0,
                                              center[1] + span * ip / 10.0};
                const double f = kernel_fidelity(k1, v_in, d);
                if (f > best_f) {
                    best_f = f;
                    best_delta = d;
                }
            }
        }
        center = best_delta;
        span *= 0.2;
    }

    NonGaussianBranchResult out;
    out.f1 = best_f;
    out.p0 = p0;
    out.f0 = conditional_fidelity(net, v_in, spec);
    out.f_tr = traced_fidelity(net, v_in);
    out.f_assisted = p0 * out.f0 + p1 * out.f1;
    return out;
}

}  // namespace cvqt
