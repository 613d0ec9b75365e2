#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "cvqt/errors.hpp"
#include "cvqt/linalg.hpp"
#include "cvqt/tolerances.hpp"

namespace cvqt {

// Quadrature ordering is (x1, p1, ..., xN, pN) throughout, with vacuum
// variance 1/2 on every quadrature.

/// Symplectic form J^(N): block-diagonal copies of [[0, 1], [-1, 0]].
Mat symplectic_form(std::size_t n_modes);

/// 2x2 mirror reflection diag(1, -1) used by partial transposition.
Mat z_reflection();

/// Validated 2N x 2N covariance matrix of symmetrized second moments.
/// Construction enforces symmetry, positive definiteness and the
/// uncertainty bound nu_k >= 1/2 on every symplectic eigenvalue.
class CovarianceMatrix {
public:
    static CovarianceMatrix validated(const Mat& m,
                                      const Tolerances& tol = default_tolerances());

    /// Symmetrizes but skips the spectral checks.  Reserved for matrices
    /// whose physicality holds by construction (symplectic congruences of
    /// valid CMs, reference-state formulas); extreme squeezing can make the
    /// full check numerically impossible even for exact formulas.
    static CovarianceMatrix trusted(const Mat& m);

    std::size_t n_modes() const { return n_modes_; }
    std::size_t dim() const { return 2 * n_modes_; }
    const Mat& matrix() const { return m_; }
    double operator()(std::size_t i, std::size_t j) const { return m_(i, j); }

private:
    CovarianceMatrix(Mat m, std::size_t n_modes) : m_(std::move(m)), n_modes_(n_modes) {}

    Mat m_;
    std::size_t n_modes_ = 0;
};

/// validate_cm: factory alias matching the operation name.
inline CovarianceMatrix validate_cm(const Mat& m,
                                    const Tolerances& tol = default_tolerances()) {
    return CovarianceMatrix::validated(m, tol);
}

/// Gaussian state: displacement (first moments) plus covariance matrix.
struct GaussianState {
    GaussianState(Vec displacement, CovarianceMatrix cm);

    std::size_t n_modes() const { return cm.n_modes(); }

    Vec displacement;
    CovarianceMatrix cm;
};

GaussianState vacuum_state(std::size_t n_modes);

/// Real matrix satisfying M J M^T = J to within the symplectic tolerance.
class SymplecticMatrix {
public:
    explicit SymplecticMatrix(Mat m, const Tolerances& tol = default_tolerances());

    std::size_t n_modes() const { return m_.rows() / 2; }
    const Mat& matrix() const { return m_; }

private:
    Mat m_;
};

/// Two-mode CM in the block form [[A, C], [C^T, B]].
struct TwoModeBlocks {
    Mat a;  // 2x2 symmetric
    Mat b;  // 2x2 symmetric
    Mat c;  // 2x2

    static TwoModeBlocks from_cm(const CovarianceMatrix& cm);
    static TwoModeBlocks from_matrix(const Mat& v);
    Mat reassemble() const;
};

/// Local-symplectic normal form V^I(a, b, c, c') of a two-mode CM, together
/// with the block-diagonal transform that achieves it.
struct StandardFormI {
    double a;
    double b;
    double c;
    double c_prime;
    SymplecticMatrix local_transform;
};

/// Symplectic (Williamson) eigenvalues, ascending, one per mode.
std::vector<double> williamson_eigenvalues(const CovarianceMatrix& cm);
std::vector<double> williamson_eigenvalues(const Mat& symmetric_v);

/// Closed form for the two symplectic eigenvalues of a two-mode CM,
/// returned as (nu_minus, nu_plus).
std::pair<double, double> two_mode_symplectic_eigenvalues(const TwoModeBlocks& blocks);

StandardFormI standard_form_I(const CovarianceMatrix& cm);
StandardFormI standard_form_I(const Mat& two_mode_cm);

GaussianState apply_symplectic(const GaussianState& state, const SymplecticMatrix& m);

/// Lossless beam splitter mixing modes i and j at angle theta.
SymplecticMatrix beam_splitter(double theta, std::size_t i, std::size_t j,
                               std::size_t n_modes);

/// Single-mode squeezer; acting on vacuum it produces the squeezed CM
/// (1/2) R(phi) diag(exp(-2r), exp(2r)) R(phi)^T.
SymplecticMatrix squeezer(double r, double phi = 0.0);

/// Embed a one-mode symplectic block at the given mode of an N-mode identity.
SymplecticMatrix embed_single_mode(const Mat& block2, std::size_t mode,
                                   std::size_t n_modes);

/// Cascade of pairwise beam splitters distributing mode 0 evenly over all N.
SymplecticMatrix n_splitter(std::size_t n_modes);

GaussianState partial_trace(const GaussianState& state,
                            const std::vector<std::size_t>& keep_modes);

/// Mirror-reflects the momentum of each listed mode: Lambda V Lambda.
/// The result is a plain matrix; it need not be a physical CM.
Mat partial_transpose(const Mat& cm, const std::vector<std::size_t>& modes);

double von_neumann_entropy(const CovarianceMatrix& cm);

/// (2 pi)^N integral of the product of two Wigner functions; equals
/// Tr(rho1 rho2) and is 1 for identical pure states.
double overlap(const GaussianState& s1, const GaussianState& s2);

double purity(const GaussianState& s);

}  // namespace cvqt
