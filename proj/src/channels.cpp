#include "cvqt/channels.hpp"

#include <cmath>

namespace cvqt {

GaussianState tmsv(double r) {
    if (r < 0.0) throw Error(Errc::negative_squeezing, "tmsv needs r >= 0");
    const double ch = 0.5 * std::cosh(2.0 * r);
    const double sh = 0.5 * std::sinh(2.0 * r);
    Mat v(4, 4);
    v(0, 0) = v(1, 1) = v(2, 2) = v(3, 3) = ch;
    v(0, 2) = v(2, 0) = sh;
    v(1, 3) = v(3, 1) = -sh;
    return GaussianState(Vec(4, 0.0), CovarianceMatrix::trusted(v));
}

GaussianState thermal_tmsv(double r, double n_a, double n_b) {
    if (n_a <= 0.0 || n_b <= 0.0)
        throw Error(Errc::invalid_input, "thermal_tmsv needs n_a, n_b > 0");
    const double ep = std::exp(2.0 * r), em = std::exp(-2.0 * r);
    Mat v(4, 4);
    v(0, 0) = v(2, 2) = 0.5 * (n_a * ep + n_b * em);
    v(1, 1) = v(3, 3) = 0.5 * (n_a * em + n_b * ep);
    v(0, 2) = v(2, 0) = 0.5 * (n_a * ep - n_b * em);
    v(1, 3) = v(3, 1) = 0.5 * (n_a * em - n_b * ep);
    return GaussianState(Vec(4, 0.0), CovarianceMatrix::validated(v));
}

GaussianState nmsv(std::size_t n_modes, double r) {
    if (n_modes < 2) throw Error(Errc::invalid_input, "nmsv needs at least two modes");
    if (r < 0.0) throw Error(Errc::negative_squeezing, "nmsv needs r >= 0");
    GaussianState state = vacuum_state(n_modes);
    state = apply_symplectic(state, embed_single_mode(squeezer(r, M_PI / 2.0).matrix(), 0, n_modes));
    for (std::size_t k = 1; k < n_modes; ++k)
        state = apply_symplectic(state, embed_single_mode(squeezer(r, 0.0).matrix(), k, n_modes));
    return apply_symplectic(state, n_splitter(n_modes));
}

GaussianState cheap_three_mode(double r) {
    if (r < 0.0) throw Error(Errc::negative_squeezing, "cheap_three_mode needs r >= 0");
    GaussianState state = vacuum_state(3);
    state = apply_symplectic(state, embed_single_mode(squeezer(r, M_PI / 2.0).matrix(), 0, 3));
    return apply_symplectic(state, n_splitter(3));
}

GaussianState input_state(InputKind kind, std::complex<double> alpha, double r, double phi) {
    Vec d{M_SQRT2 * alpha.real(), M_SQRT2 * alpha.imag()};
    Mat v = Mat::identity(2);
    v *= 0.5;
    if (kind == InputKind::squeezed) {
        const Mat s = squeezer(r, phi).matrix();
        v = s * v * s.transposed();
    }
    return GaussianState(std::move(d), CovarianceMatrix::trusted(v));
}

GaussianState build_channel(const ChannelSpec& spec) {
    switch (spec.kind) {
        case ChannelKind::tmsv: return tmsv(spec.r);
        case ChannelKind::thermal_tmsv: return thermal_tmsv(spec.r, spec.n_a, spec.n_b);
        case ChannelKind::nmsv: return nmsv(spec.n_modes, spec.r);
        case ChannelKind::cheap_three_mode: return cheap_three_mode(spec.r);
        case ChannelKind::custom: break;
    }
    throw Error(Errc::invalid_input, "custom channels are built from state files");
}

ChannelKind channel_kind_from_string(const std::string& name) {
    if (name == "tmsv") return ChannelKind::tmsv;
    if (name == "thermal" || name == "thermal_tmsv") return ChannelKind::thermal_tmsv;
    if (name == "nmsv") return ChannelKind::nmsv;
    if (name == "cheap" || name == "cheap_three_mode") return ChannelKind::cheap_three_mode;
    throw Error(Errc::invalid_input, "unknown channel kind: " + name);
}

}  // namespace cvqt
