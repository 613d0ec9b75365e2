#include "cvqt/symplectic.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cvqt {

Mat symplectic_form(std::size_t n_modes) {
    Mat j(2 * n_modes, 2 * n_modes);
    for (std::size_t k = 0; k < n_modes; ++k) {
        j(2 * k, 2 * k + 1) = 1.0;
        j(2 * k + 1, 2 * k) = -1.0;
    }
    return j;
}

Mat z_reflection() { return Mat(2, 2, {1.0, 0.0, 0.0, -1.0}); }

std::vector<double> williamson_eigenvalues(const Mat& v) {
    // The spectrum of J V consists of +/- i nu_k.  V^{1/2} J V^{1/2} is
    // real antisymmetric and similar to J V, so the nu_k are recovered from
    // the symmetric eigenproblem of -(V^{1/2} J V^{1/2})^2.
    const std::size_t dim = v.rows();
    const std::size_t n = dim / 2;
    const Mat s = sym_sqrt(v);
    const Mat k = s * symplectic_form(n) * s;
    const Mat w = k.transposed() * k;
    SymEigen e = jacobi_eigen(w);
    std::vector<double> nu(n);
    for (std::size_t m = 0; m < n; ++m) {
        const double lam = 0.5 * (std::max(e.values[2 * m], 0.0) +
                                  std::max(e.values[2 * m + 1], 0.0));
        nu[m] = std::sqrt(lam);
    }
    return nu;
}

std::vector<double> williamson_eigenvalues(const CovarianceMatrix& cm) {
    return williamson_eigenvalues(cm.matrix());
}

CovarianceMatrix CovarianceMatrix::validated(const Mat& m, const Tolerances& tol) {
    if (m.rows() != m.cols() || m.rows() == 0 || m.rows() % 2 != 0)
        throw Error(Errc::wrong_shape, "covariance matrix must be square with even dimension");

    const double scale = std::max(1.0, max_abs(m));
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = i + 1; j < m.cols(); ++j)
            if (std::abs(m(i, j) - m(j, i)) > tol.symmetry * scale)
                throw Error(Errc::not_symmetric, "covariance matrix is not symmetric");

    Mat sym = m;
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            sym(i, j) = 0.5 * (m(i, j) + m(j, i));

    SymEigen e = jacobi_eigen(sym);
    if (e.values.front() <= 0.0)
        throw Error(Errc::not_bona_fide, "covariance matrix is not positive definite");

    const std::vector<double> nu = williamson_eigenvalues(sym);
    for (double nu_k : nu) {
        if (nu_k < 0.5 - tol.invariant) {
            std::ostringstream msg;
            msg << "uncertainty bound violated: symplectic eigenvalue " << nu_k << " < 1/2";
            throw Error(Errc::not_bona_fide, msg.str());
        }
    }
    return CovarianceMatrix(std::move(sym), m.rows() / 2);
}

CovarianceMatrix CovarianceMatrix::trusted(const Mat& m) {
    if (m.rows() != m.cols() || m.rows() == 0 || m.rows() % 2 != 0)
        throw Error(Errc::wrong_shape, "covariance matrix must be square with even dimension");
    Mat sym = m;
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            sym(i, j) = 0.5 * (m(i, j) + m(j, i));
    return CovarianceMatrix(std::move(sym), m.rows() / 2);
}

GaussianState::GaussianState(Vec d, CovarianceMatrix c) : displacement(std::move(d)), cm(std::move(c)) {
    if (displacement.size() != cm.dim())
        throw Error(Errc::dimension_mismatch, "displacement length must be 2 * n_modes");
}

GaussianState vacuum_state(std::size_t n_modes) {
    Mat v = Mat::identity(2 * n_modes);
    v *= 0.5;
    return GaussianState(Vec(2 * n_modes, 0.0), CovarianceMatrix::trusted(v));
}

SymplecticMatrix::SymplecticMatrix(Mat m, const Tolerances& tol) : m_(std::move(m)) {
    if (m_.rows() != m_.cols() || m_.rows() % 2 != 0)
        throw Error(Errc::wrong_shape, "symplectic matrix must be square with even dimension");
    const Mat j = symplectic_form(m_.rows() / 2);
    if (max_abs_diff(m_ * j * m_.transposed(), j) > tol.symplectic)
        throw Error(Errc::invalid_input, "matrix does not preserve the symplectic form");
}

TwoModeBlocks TwoModeBlocks::from_matrix(const Mat& v) {
    if (v.rows() != 4 || v.cols() != 4)
        throw Error(Errc::wrong_shape, "two-mode block form needs a 4x4 matrix");
    TwoModeBlocks blocks{Mat(2, 2), Mat(2, 2), Mat(2, 2)};
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) {
            blocks.a(i, j) = v(i, j);
            blocks.b(i, j) = v(i + 2, j + 2);
            blocks.c(i, j) = v(i, j + 2);
        }
    return blocks;
}

TwoModeBlocks TwoModeBlocks::from_cm(const CovarianceMatrix& cm) {
    if (cm.n_modes() != 2)
        throw Error(Errc::wrong_shape, "two-mode block form needs a two-mode CM");
    return from_matrix(cm.matrix());
}

Mat TwoModeBlocks::reassemble() const {
    Mat v(4, 4);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) {
            v(i, j) = a(i, j);
            v(i + 2, j + 2) = b(i, j);
            v(i, j + 2) = c(i, j);
            v(j + 2, i) = c(i, j);
        }
    return v;
}

std::pair<double, double> two_mode_symplectic_eigenvalues(const TwoModeBlocks& blocks) {
    const double det_a = det2(blocks.a);
    const double det_b = det2(blocks.b);
    const double det_c = det2(blocks.c);
    const double delta = det_a + det_b + 2.0 * det_c;
    const double det_v = det(blocks.reassemble());
    double disc = delta * delta - 4.0 * det_v;
    if (disc < 0.0) {
        if (disc < -1e-9 * std::max(1.0, delta * delta))
            throw Error(Errc::negative_discriminant,
                        "negative discriminant: blocks do not come from a valid CM");
        disc = 0.0;
    }
    const double root = std::sqrt(disc);
    const double lo = 0.5 * (delta - root);
    const double hi = 0.5 * (delta + root);
    if (lo < 0.0 && lo < -1e-12)
        throw Error(Errc::negative_discriminant, "negative symplectic eigenvalue squared");
    return {std::sqrt(std::max(lo, 0.0)), std::sqrt(hi)};
}

namespace {

// det-1 2x2 transform taking a symmetric positive block to sqrt(det) * I.
Mat isotropize_block(const Mat& block, double& out_scale) {
    const double d = det2(block);
    if (d <= 0.0)
        throw Error(Errc::degenerate_block, "mode block with non-positive determinant");
    SymEigen e = jacobi_eigen(block);
    const double s = std::sqrt(d);
    out_scale = s;
    // block = R diag(l1, l2) R^T; scale each principal axis to s.
    Mat scale = Mat(2, 2, {std::sqrt(s / e.values[0]), 0.0, 0.0, std::sqrt(s / e.values[1])});
    Mat r = e.vectors;  // columns are the principal axes
    if (det2(r) < 0.0) {  // keep the local block in SL(2, R)
        r(0, 1) = -r(0, 1);
        r(1, 1) = -r(1, 1);
    }
    return scale * r.transposed();
}

}  // namespace

StandardFormI standard_form_I(const CovarianceMatrix& cm) {
    return standard_form_I(cm.matrix());
}

StandardFormI standard_form_I(const Mat& two_mode_cm) {
    TwoModeBlocks blocks = TwoModeBlocks::from_matrix(two_mode_cm);

    double a_val = 0.0, b_val = 0.0;
    Mat m1 = isotropize_block(blocks.a, a_val);
    Mat m2 = isotropize_block(blocks.b, b_val);

    // Residual per-mode rotations diagonalize the correlation block.
    Mat c_mid = m1 * blocks.c * m2.transposed();
    RotSvd2 svd = rot_svd2(c_mid);
    Mat g1 = svd.u.transposed();
    Mat g2 = svd.v.transposed();

    Mat l1 = g1 * m1;
    Mat l2 = g2 * m2;
    double c_val = svd.s1;
    double cp_val = svd.s2;

    // Tie-break: |c| >= |c'| and c >= 0.  s1 >= |s2| >= 0 already holds; a
    // negative-x reflection on both modes flips the sign of a column pair,
    // so c < 0 cannot occur with s1 >= 0.
    Mat local(4, 4);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) {
            local(i, j) = l1(i, j);
            local(i + 2, j + 2) = l2(i, j);
        }
    return StandardFormI{a_val, b_val, c_val, cp_val, SymplecticMatrix(local)};
}

GaussianState apply_symplectic(const GaussianState& state, const SymplecticMatrix& m) {
    if (m.matrix().rows() != state.cm.dim())
        throw Error(Errc::dimension_mismatch, "symplectic dimension does not match state");
    Mat v = m.matrix() * state.cm.matrix() * m.matrix().transposed();
    Vec d = m.matrix() * state.displacement;
    return GaussianState(std::move(d), CovarianceMatrix::trusted(v));
}

SymplecticMatrix beam_splitter(double theta, std::size_t i, std::size_t j,
                               std::size_t n_modes) {
    if (n_modes < 2) throw Error(Errc::index_out_of_range, "beam splitter needs >= 2 modes");
    if (i >= n_modes || j >= n_modes || i == j)
        throw Error(Errc::index_out_of_range, "invalid beam splitter mode indices");
    const double c = std::cos(theta), s = std::sin(theta);
    Mat m = Mat::identity(2 * n_modes);
    for (std::size_t q = 0; q < 2; ++q) {
        m(2 * i + q, 2 * i + q) = c;
        m(2 * i + q, 2 * j + q) = s;
        m(2 * j + q, 2 * i + q) = s;
        m(2 * j + q, 2 * j + q) = -c;
    }
    return SymplecticMatrix(std::move(m));
}

SymplecticMatrix squeezer(double r, double phi) {
    const Mat rot = rotation2(phi);
    const Mat d = Mat(2, 2, {std::exp(-r), 0.0, 0.0, std::exp(r)});
    return SymplecticMatrix(rot * d * rot.transposed());
}

SymplecticMatrix embed_single_mode(const Mat& block2, std::size_t mode, std::size_t n_modes) {
    if (mode >= n_modes) throw Error(Errc::index_out_of_range, "mode index out of range");
    if (block2.rows() != 2 || block2.cols() != 2)
        throw Error(Errc::wrong_shape, "single-mode block must be 2x2");
    Mat m = Mat::identity(2 * n_modes);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) m(2 * mode + i, 2 * mode + j) = block2(i, j);
    return SymplecticMatrix(std::move(m));
}

SymplecticMatrix n_splitter(std::size_t n_modes) {
    if (n_modes < 2) throw Error(Errc::index_out_of_range, "n_splitter needs >= 2 modes");
    // B_{N-1,N}(pi/4) ... B_{1,2}(acos(1/sqrt(N))), rightmost applied first.
    Mat m = Mat::identity(2 * n_modes);
    for (std::size_t k = 0; k + 1 < n_modes; ++k) {
        const double theta = std::acos(1.0 / std::sqrt(static_cast<double>(n_modes - k)));
        m = beam_splitter(theta, k, k + 1, n_modes).matrix() * m;
    }
    return SymplecticMatrix(std::move(m));
}

GaussianState partial_trace(const GaussianState& state,
                            const std::vector<std::size_t>& keep_modes) {
    const std::size_t n = state.n_modes();
    for (std::size_t m : keep_modes)
        if (m >= n) throw Error(Errc::index_out_of_range, "partial_trace mode out of range");
    const std::size_t nk = keep_modes.size();
    if (nk == 0) throw Error(Errc::index_out_of_range, "partial_trace needs at least one mode");

    Mat v(2 * nk, 2 * nk);
    Vec d(2 * nk, 0.0);
    for (std::size_t a = 0; a < nk; ++a) {
        for (std::size_t qa = 0; qa < 2; ++qa) {
            d[2 * a + qa] = state.displacement[2 * keep_modes[a] + qa];
            for (std::size_t b = 0; b < nk; ++b)
                for (std::size_t qb = 0; qb < 2; ++qb)
                    v(2 * a + qa, 2 * b + qb) =
                        state.cm(2 * keep_modes[a] + qa, 2 * keep_modes[b] + qb);
        }
    }
    return GaussianState(std::move(d), CovarianceMatrix::trusted(v));
}

Mat partial_transpose(const Mat& cm, const std::vector<std::size_t>& modes) {
    if (cm.rows() != cm.cols() || cm.rows() % 2 != 0)
        throw Error(Errc::wrong_shape, "partial_transpose needs a 2N x 2N matrix");
    const std::size_t n = cm.rows() / 2;
    Vec lambda(2 * n, 1.0);
    for (std::size_t m : modes) {
        if (m >= n) throw Error(Errc::index_out_of_range, "partial_transpose mode out of range");
        lambda[2 * m + 1] = -1.0;
    }
    Mat out = cm;
    for (std::size_t i = 0; i < 2 * n; ++i)
        for (std::size_t j = 0; j < 2 * n; ++j) out(i, j) *= lambda[i] * lambda[j];
    return out;
}

namespace {

double entropy_g(double x) {
    double h = (x + 0.5) * std::log(x + 0.5);
    const double m = x - 0.5;
    if (m > 0.0) h -= m * std::log(m);
    return h;
}

}  // namespace

double von_neumann_entropy(const CovarianceMatrix& cm) {
    double h = 0.0;
    for (double nu : williamson_eigenvalues(cm)) h += entropy_g(std::max(nu, 0.5));
    return h;
}

double overlap(const GaussianState& s1, const GaussianState& s2) {
    if (s1.n_modes() != s2.n_modes())
        throw Error(Errc::dimension_mismatch, "overlap needs equal mode counts");
    Mat sum = s1.cm.matrix() + s2.cm.matrix();
    Vec delta(s1.displacement.size());
    for (std::size_t i = 0; i < delta.size(); ++i)
        delta[i] = s1.displacement[i] - s2.displacement[i];
    const Vec y = inverse(sum) * delta;
    return std::exp(-0.5 * dot(delta, y)) / std::sqrt(det(sum));
}

double purity(const GaussianState& s) { return overlap(s, s); }

}  // namespace cvqt
