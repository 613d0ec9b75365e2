#include "cvqt/network.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "cvqt/opt.hpp"
#include "cvqt/teleport.hpp"

namespace cvqt {

namespace {

Mat block_of(const Mat& v, std::size_t bi, std::size_t bj) {
    Mat b(2, 2);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) b(i, j) = v(2 * bi + i, 2 * bj + j);
    return b;
}

Vec theta_vec(double phi) { return Vec{std::sin(phi), std::cos(phi)}; }

double quad_form2(const Vec& t, const Mat& m) {
    return t[0] * (m(0, 0) * t[0] + m(0, 1) * t[1]) +
           t[1] * (m(1, 0) * t[0] + m(1, 1) * t[1]);
}

}  // namespace

ThreeModeBlocks ThreeModeBlocks::from_state(const GaussianState& state) {
    if (state.n_modes() != 3)
        throw Error(Errc::wrong_shape, "network blocks need a three-mode state");
    const Mat& v = state.cm.matrix();
    ThreeModeBlocks out;
    out.a = block_of(v, 0, 0);
    out.b = block_of(v, 1, 1);
    out.c = block_of(v, 2, 2);
    out.f = block_of(v, 0, 1);
    out.e = block_of(v, 0, 2);
    out.d = block_of(v, 1, 2);
    out.d_a = {state.displacement[0], state.displacement[1]};
    out.d_b = {state.displacement[2], state.displacement[3]};
    out.d_c = {state.displacement[4], state.displacement[5]};
    return out;
}

Mat ThreeModeBlocks::reassemble() const {
    Mat v(6, 6);
    auto put = [&](const Mat& blk, std::size_t bi, std::size_t bj) {
        for (std::size_t i = 0; i < 2; ++i)
            for (std::size_t j = 0; j < 2; ++j) {
                v(2 * bi + i, 2 * bj + j) = blk(i, j);
                v(2 * bj + j, 2 * bi + i) = blk(i, j);
            }
    };
    put(a, 0, 0);
    put(b, 1, 1);
    put(c, 2, 2);
    put(f, 0, 1);
    put(e, 0, 2);
    put(d, 1, 2);
    return v;
}

Vec ThreeModeBlocks::displacement() const {
    return Vec{d_a[0], d_a[1], d_b[0], d_b[1], d_c[0], d_c[1]};
}

Mat ThreeModeBlocks::v_traced() const {
    Mat v(4, 4);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) {
            v(i, j) = a(i, j);
            v(i + 2, j + 2) = b(i, j);
            v(i, j + 2) = f(i, j);
            v(j + 2, i) = f(i, j);
        }
    return v;
}

Vec ThreeModeBlocks::d_traced() const { return Vec{d_a[0], d_a[1], d_b[0], d_b[1]}; }

bool SqueezedProjectorSpec::boundary() const {
    return xi == 0.0 || std::isinf(xi);
}

Mat squeezed_projector_cm(double xi, double phi) {
    if (!(xi > 0.0) || std::isinf(xi))
        throw Error(Errc::invalid_input, "squeezed projector CM needs finite xi > 0");
    const double s = std::sin(phi), c = std::cos(phi);
    Mat v0(2, 2);
    v0(0, 0) = 0.5 * (xi * s * s + c * c / xi);
    v0(1, 1) = 0.5 * (xi * c * c + s * s / xi);
    v0(0, 1) = v0(1, 0) = 0.5 * (xi - 1.0 / xi) * s * c;
    return v0;
}

double traced_fidelity(const ThreeModeBlocks& net, const Mat& v_in) {
    TwoModeBlocks blocks{net.a, net.b, net.f};
    return 1.0 / std::sqrt(gamma_matrix(v_in, blocks).determinant());
}

MMatrix m_matrix(const Mat& c_block, const Mat& v0) {
    const double det_v0 = det2(v0);
    const double det_c = det2(c_block);
    const Mat j = Mat(2, 2, {0.0, 1.0, -1.0, 0.0});
    const Mat jcjt = j * c_block * j.transposed();
    const double half_term = det_v0 + 0.25;
    const double g = 4.0 * det_v0 * det_c + 2.0 * half_term * trace(v0 * jcjt) +
                     half_term * half_term;
    if (!(g > 0.5))
        throw Error(Errc::g_out_of_range, "conditioning factor g <= 1/2: invalid inputs");
    Mat core = 2.0 * half_term * v0 + 4.0 * det_v0 * c_block;
    Mat m = j * core * j.transposed();
    m *= 1.0 / g;
    // symmetric positive definite by construction; guard against bad inputs
    const double off = 0.5 * (m(0, 1) + m(1, 0));
    m(0, 1) = m(1, 0) = off;
    if (m(0, 0) <= 0.0 || det2(m) <= 0.0)
        throw Error(Errc::g_out_of_range, "conditioning matrix not positive definite");
    return MMatrix{m, g};
}

Mat m_matrix_homodyne(const Mat& c_block, double phi, bool xi_infinite) {
    // As xi grows the projector collapses onto the quadrature along
    // th_perp; the limit of (C + V0)^-1 is the rank-one conditioning on it.
    const Vec th = theta_vec(phi);
    const Vec dir = xi_infinite ? Vec{th[1], -th[0]} : th;
    const double w = quad_form2(dir, c_block);
    if (w <= 0.0) throw Error(Errc::invalid_cm, "degenerate assistant block");
    Mat m(2, 2);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) m(i, j) = dir[i] * dir[j] / w;
    return m;
}

namespace {

ConditionalChannel condition_impl(const ThreeModeBlocks& net, const Mat& m,
                                  const Vec& d0, std::optional<double> probability) {
    const Mat eme = net.e * m * net.e.transposed();
    const Mat emd = net.e * m * net.d.transposed();
    const Mat dmd = net.d * m * net.d.transposed();

    Mat v0(4, 4);
    const Mat v_tr = net.v_traced();
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) {
            v0(i, j) = v_tr(i, j) - eme(i, j);
            v0(i + 2, j + 2) = v_tr(i + 2, j + 2) - dmd(i, j);
            v0(i, j + 2) = v_tr(i, j + 2) - emd(i, j);
            v0(j + 2, i) = v0(i, j + 2);
        }

    Vec shift{d0[0] - net.d_c[0], d0[1] - net.d_c[1]};
    Vec drift_a = net.e * (m * shift);
    Vec drift_b = net.d * (m * shift);
    Vec d_cond{net.d_a[0] + drift_a[0], net.d_a[1] + drift_a[1],
               net.d_b[0] + drift_b[0], net.d_b[1] + drift_b[1]};

    CovarianceMatrix cm = [&] {
        try {
            return CovarianceMatrix::validated(v0);
        } catch (const Error& err) {
            throw Error(Errc::not_bona_fide,
                        std::string("conditional CM failed validation: ") + err.what());
        }
    }();
    return ConditionalChannel{GaussianState(std::move(d_cond), std::move(cm)),
                              probability};
}

double measurement_probability(const ThreeModeBlocks& net, const Mat& v0, const Vec& d0) {
    // Overlap of the reduced assistant state with the projector state.
    Mat sum = net.c + v0;
    Vec delta{net.d_c[0] - d0[0], net.d_c[1] - d0[1]};
    const Vec y = inv2(sum) * delta;
    return std::exp(-0.5 * dot(delta, y)) / std::sqrt(det2(sum));
}

}  // namespace

ConditionalChannel condition_on_measurement(const ThreeModeBlocks& net,
                                            const SqueezedProjectorSpec& spec) {
    if (spec.alpha.size() != 2)
        throw Error(Errc::dimension_mismatch, "measurement displacement must be 2D");
    if (spec.boundary()) {
        Mat m = m_matrix_homodyne(net.c, spec.phi, std::isinf(spec.xi));
        return condition_impl(net, m, spec.alpha, std::nullopt);
    }
    const Mat v0 = squeezed_projector_cm(spec.xi, spec.phi);
    MMatrix mm = m_matrix(net.c, v0);
    const double p0 = measurement_probability(net, v0, spec.alpha);
    return condition_impl(net, mm.m, spec.alpha, p0);
}

ConditionalChannel condition_on_measurement(const ThreeModeBlocks& net, const Mat& v0,
                                            const Vec& d0) {
    if (v0.rows() != 2 || v0.cols() != 2)
        throw Error(Errc::wrong_shape, "measurement CM must be 2x2");
    if (d0.size() != 2)
        throw Error(Errc::dimension_mismatch, "measurement displacement must be 2D");
    validate_cm(v0);
    MMatrix mm = m_matrix(net.c, v0);
    // The dichotomic success probability is only defined for pure projectors.
    std::optional<double> p0;
    if (std::abs(det2(v0) - 0.25) <= 1e-9) p0 = measurement_probability(net, v0, d0);
    return condition_impl(net, mm.m, d0, p0);
}

namespace {

Mat sigma_matrix(const ThreeModeBlocks& net) {
    const Mat z = z_reflection();
    return net.e.transposed() * z - net.d.transposed();
}

}  // namespace

double conditional_fidelity(const ThreeModeBlocks& net, const Mat& v_in,
                            const SqueezedProjectorSpec& spec) {
    TwoModeBlocks tr_blocks{net.a, net.b, net.f};
    const Mat gamma_tr = gamma_matrix(v_in, tr_blocks).m;
    const Mat sigma = sigma_matrix(net);
    Mat m = spec.boundary() ? m_matrix_homodyne(net.c, spec.phi, std::isinf(spec.xi))
                            : m_matrix(net.c, squeezed_projector_cm(spec.xi, spec.phi)).m;
    Mat gamma0 = gamma_tr - sigma.transposed() * m * sigma;
    const double d = det2(gamma0);
    if (d <= 0.0) throw Error(Errc::invalid_cm, "conditional Gamma not positive definite");
    return 1.0 / std::sqrt(d);
}

std::array<double, 2> OptimizerVectors::k(double phi) const {
    const Vec th = theta_vec(phi);
    return {quad_form2(th, u_mat), quad_form2(th, c_block)};
}

double OptimizerVectors::gamma(double phi) const {
    const std::array<double, 2> kv = k(phi);
    return u_x * kv[0] + u_y * kv[1];
}

double OptimizerVectors::omega(double phi) const {
    const std::array<double, 2> kp = k(phi);
    const std::array<double, 2> km = k(phi - M_PI / 2.0);
    return 0.5 * (kp[0] * km[1] - kp[1] * km[0]);
}

bool OptimizerVectors::p(double phi) const {
    return gamma(phi) < 0.0 && gamma(phi - M_PI / 2.0) < 0.0;
}

OptimizerVectors optimizer_vectors(const ThreeModeBlocks& net, const Mat& v_in) {
    TwoModeBlocks tr_blocks{net.a, net.b, net.f};
    const Mat gamma_tr = gamma_matrix(v_in, tr_blocks).m;
    const Mat sigma = sigma_matrix(net);
    const Mat j = Mat(2, 2, {0.0, 1.0, -1.0, 0.0});

    OptimizerVectors v;
    v.det_gamma_tr = det2(gamma_tr);
    v.c_block = net.c;
    v.u_mat = sigma * j * gamma_tr * j.transposed() * sigma.transposed();
    v.u_x = det2(net.c) + 0.25;
    v.u_y = det2(sigma) * det2(sigma) -
            trace(j * net.c * j.transposed() * v.u_mat);
    return v;
}

double fidelity_from_vectors(const OptimizerVectors& v, double xi, double phi) {
    const std::array<double, 2> kp = v.k(phi);
    const std::array<double, 2> km = v.k(phi - M_PI / 2.0);
    double ratio;
    if (xi == 0.0) {
        ratio = kp[0] / kp[1];
    } else if (std::isinf(xi)) {
        ratio = km[0] / km[1];
    } else {
        const double num = -v.u_y + 0.5 * xi * km[0] + 0.5 / xi * kp[0];
        const double den = v.u_x + 0.5 * xi * km[1] + 0.5 / xi * kp[1];
        ratio = num / den;
    }
    const double det_g0 = v.det_gamma_tr - ratio;
    if (det_g0 <= 0.0)
        throw Error(Errc::numerical_failure, "non-positive conditional determinant");
    return 1.0 / std::sqrt(det_g0);
}

double optimal_xi(double phi, const OptimizerVectors& v) {
    if (v.p(phi)) {
        const double g = v.gamma(phi);
        const double gm = v.gamma(phi - M_PI / 2.0);
        const double w = v.omega(phi);
        const double xi = (w - std::sqrt(w * w + gm * g)) / gm;
        if (xi > 0.0 && std::isfinite(xi)) return xi;
    }
    const double f0 = fidelity_from_vectors(v, 0.0, phi);
    const double finf = fidelity_from_vectors(v, std::numeric_limits<double>::infinity(), phi);
    return f0 >= finf ? 0.0 : std::numeric_limits<double>::infinity();
}

namespace {

struct PhiCandidate {
    double phi;
    double xi;
    double f;
};

PhiCandidate evaluate_phi(const OptimizerVectors& v, double phi) {
    const double xi = optimal_xi(phi, v);
    return PhiCandidate{phi, xi, fidelity_from_vectors(v, xi, phi)};
}

// Deterministic preference: higher fidelity, then smaller phi, then finite xi.
bool better(const PhiCandidate& a, const PhiCandidate& b) {
    if (a.f != b.f) return a.f > b.f;
    if (a.phi != b.phi) return a.phi < b.phi;
    return std::isfinite(a.xi) && !std::isfinite(b.xi);
}

}  // namespace

OptimizerResult optimize_measurement(const ThreeModeBlocks& net, const Mat& v_in,
                                     const OptimizerOptions& options) {
    const OptimizerVectors v = optimizer_vectors(net, v_in);
    const double f_tr = 1.0 / std::sqrt(v.det_gamma_tr);

    std::vector<double> phis;
    const std::size_t n = std::max<std::size_t>(options.phi_grid_points, 8);
    phis.reserve(n + 16);
    for (std::size_t i = 0; i < n; ++i)
        phis.push_back(M_PI * static_cast<double>(i) / static_cast<double>(n));

    // Stationary phases of the boundary branch, tau = U J C J^T.
    {
        const Mat j = Mat(2, 2, {0.0, 1.0, -1.0, 0.0});
        const Mat tau = v.u_mat * j * v.c_block * j.transposed();
        const double d11 = tau(0, 0) - tau(1, 1);
        const double s12 = tau(0, 1) + tau(1, 0);
        const double den = d11 * d11 + s12 * s12;
        if (den > 0.0) {
            const double disc = d11 * d11 + 4.0 * tau(0, 1) * tau(1, 0);
            if (disc >= 0.0) {
                const double root = std::sqrt(disc);
                for (double sign : {1.0, -1.0}) {
                    const double cos2phi =
                        (tau(0, 1) * tau(0, 1) - tau(1, 0) * tau(1, 0) + sign * d11 * root) / den;
                    if (cos2phi < -1.0 || cos2phi > 1.0) continue;
                    const double half = 0.5 * std::acos(cos2phi);
                    phis.push_back(half);
                    phis.push_back(M_PI - half);
                }
            }
        }
    }

    PhiCandidate best = evaluate_phi(v, phis.front());
    bool prev_p = v.p(phis.front());
    const double grid_step = M_PI / static_cast<double>(n);
    for (std::size_t i = 1; i < phis.size(); ++i) {
        PhiCandidate cand = evaluate_phi(v, phis[i]);
        if (better(cand, best)) best = cand;
        // add the border between p-regions as an extra candidate
        if (i < n) {
            const bool cur_p = v.p(phis[i]);
            if (cur_p != prev_p) {
                double lo = phis[i - 1], hi = phis[i];
                for (int it = 0; it < 60; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    if (v.p(mid) == prev_p)
                        lo = mid;
                    else
                        hi = mid;
                }
                for (double border : {lo, hi}) {
                    PhiCandidate bc = evaluate_phi(v, border);
                    if (better(bc, best)) best = bc;
                }
            }
            prev_p = cur_p;
        }
    }

    // Local refinement around the best grid phase.
    {
        const double lo = best.phi - grid_step;
        const double hi = best.phi + grid_step;
        auto f_tilde = [&](double phi) { return evaluate_phi(v, phi).f; };
        auto [phi_ref, f_ref] = golden_max(f_tilde, lo, hi, 1e-12);
        PhiCandidate refined = evaluate_phi(v, phi_ref);
        // keep phases inside [0, pi); F-tilde has period pi
        if (refined.phi < 0.0) refined.phi += M_PI;
        if (refined.phi >= M_PI) refined.phi -= M_PI;
        refined = evaluate_phi(v, refined.phi);
        (void)f_ref;
        if (better(refined, best)) best = refined;
    }

    OptimizerResult out;
    out.phi_star = best.phi;
    out.xi_star = best.xi;
    out.f_star = std::max(best.f, f_tr);
    out.branch = (std::isfinite(best.xi) && best.xi > 0.0) ? OptimizerBranch::interior
                                                           : OptimizerBranch::boundary_homodyne;
    out.gamma_at_star = v.gamma(best.phi);
    out.omega_at_star = v.omega(best.phi);
    out.p_at_star = v.p(best.phi);
    return out;
}

}  // namespace cvqt
