#include "cvqt/sampling.hpp"

#include <cmath>

namespace cvqt {

SymplecticMatrix random_symplectic(std::size_t n_modes, Rng& rng, double r_max) {
    std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
    std::uniform_real_distribution<double> squeeze(-r_max, r_max);

    Mat m = Mat::identity(2 * n_modes);
    const int layers = n_modes == 1 ? 1 : 2;
    for (int layer = 0; layer < layers; ++layer) {
        for (std::size_t k = 0; k < n_modes; ++k) {
            const Mat local = rotation2(angle(rng)) * squeezer(squeeze(rng), 0.0).matrix() *
                              rotation2(angle(rng));
            m = embed_single_mode(local, k, n_modes).matrix() * m;
        }
        for (std::size_t k = 0; k + 1 < n_modes; ++k)
            m = beam_splitter(angle(rng), k, k + 1, n_modes).matrix() * m;
    }
    return SymplecticMatrix(std::move(m));
}

CovarianceMatrix random_cm(std::size_t n_modes, Rng& rng, double nu_max, double r_max) {
    std::uniform_real_distribution<double> nu(0.5, nu_max);
    Vec spectrum(2 * n_modes);
    for (std::size_t k = 0; k < n_modes; ++k) {
        const double v = nu(rng);
        spectrum[2 * k] = v;
        spectrum[2 * k + 1] = v;
    }
    const Mat s = random_symplectic(n_modes, rng, r_max).matrix();
    return CovarianceMatrix::validated(s * Mat::diag(spectrum) * s.transposed());
}

GaussianState random_state(std::size_t n_modes, Rng& rng, double nu_max, double r_max,
                           double d_max) {
    CovarianceMatrix cm = random_cm(n_modes, rng, nu_max, r_max);
    std::uniform_real_distribution<double> disp(-d_max, d_max);
    Vec d(2 * n_modes);
    for (double& x : d) x = disp(rng);
    return GaussianState(std::move(d), std::move(cm));
}

}  // namespace cvqt
