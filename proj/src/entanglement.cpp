#include "cvqt/entanglement.hpp"

#include <algorithm>
#include <cmath>

namespace cvqt {

namespace {

void require_two_modes(const CovarianceMatrix& cm) {
    if (cm.n_modes() != 2)
        throw Error(Errc::invalid_cm, "entanglement tests need a two-mode CM");
}

}  // namespace

double pt_min_symplectic_eigenvalue(const CovarianceMatrix& cm) {
    require_two_modes(cm);
    TwoModeBlocks blocks = TwoModeBlocks::from_cm(cm);
    const double delta_pt = det2(blocks.a) + det2(blocks.b) - 2.0 * det2(blocks.c);
    const double det_v = det(cm.matrix());
    double disc = delta_pt * delta_pt - 4.0 * det_v;
    if (disc < 0.0) {
        if (disc < -1e-9 * std::max(1.0, delta_pt * delta_pt))
            throw Error(Errc::invalid_cm, "PT discriminant negative");
        disc = 0.0;
    }
    const double lo = 0.5 * (delta_pt - std::sqrt(disc));
    return std::sqrt(std::max(lo, 0.0));
}

double log_negativity(const CovarianceMatrix& cm) {
    const double nu = pt_min_symplectic_eigenvalue(cm);
    return std::max(0.0, -std::log(2.0 * nu));
}

std::optional<DuanWitness> duan_test(const CovarianceMatrix& cm) {
    require_two_modes(cm);
    const Mat& v = cm.matrix();

    // Var L(q) + Var M(q) - q^2 - q^-2 with t = q^2 and sign s = sgn(q):
    //   f(t, s) = alpha t + beta / t + 2 s c0
    const double alpha = v(0, 0) + v(1, 1) - 1.0;
    const double beta = v(2, 2) + v(3, 3) - 1.0;
    const double c0 = v(0, 2) - v(1, 3);

    const double t_min = 1e-6, t_max = 1e6;
    double best_f = 0.0;
    double best_q = 1.0;
    bool found = false;

    auto consider = [&](double t, double s) {
        const double f = alpha * t + beta / t + 2.0 * s * c0;
        if (!found || f < best_f) {
            best_f = f;
            best_q = s * std::sqrt(t);
            found = true;
        }
    };

    for (double s : {1.0, -1.0}) {
        consider(t_min, s);
        consider(t_max, s);
        if (alpha > 0.0 && beta > 0.0)
            consider(std::clamp(std::sqrt(beta / alpha), t_min, t_max), s);
        // log-grid refinement over the clipped search domain
        for (int k = 0; k <= 240; ++k)
            consider(std::pow(10.0, -6.0 + 12.0 * k / 240.0), s);
    }

    if (best_f >= -1e-12) return std::nullopt;

    const double q = best_q;
    const double t = q * q;
    const double s = q >= 0.0 ? 1.0 : -1.0;
    const double var_l = t * v(0, 0) + v(2, 2) / t + 2.0 * s * v(0, 2);
    const double var_m = t * v(1, 1) + v(3, 3) / t - 2.0 * s * v(1, 3);
    return DuanWitness{q, var_l + var_m, t + 1.0 / t};
}

std::optional<double> epr_aleph(const CovarianceMatrix& cm) {
    require_two_modes(cm);
    const Mat& v = cm.matrix();
    const double var_xm = v(0, 0) + v(2, 2) - 2.0 * v(0, 2);
    const double var_pp = v(1, 1) + v(3, 3) + 2.0 * v(1, 3);
    if (std::abs(var_xm - var_pp) > 1e-9) return std::nullopt;
    return 0.5 * (var_xm + var_pp);
}

EntanglementReport entanglement_report(const CovarianceMatrix& cm) {
    EntanglementReport r{};
    r.nu_tilde_minus = pt_min_symplectic_eigenvalue(cm);
    r.log_negativity = std::max(0.0, -std::log(2.0 * r.nu_tilde_minus));
    r.ppt_separable = r.nu_tilde_minus >= 0.5;
    r.duan_witness = duan_test(cm);
    r.aleph = epr_aleph(cm);
    return r;
}

}  // namespace cvqt
