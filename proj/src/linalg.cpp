#include "cvqt/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cvqt/errors.hpp"
#include "cvqt/tolerances.hpp"

namespace cvqt {

const char* errc_name(Errc code) {
    switch (code) {
        case Errc::wrong_shape: return "WrongShape";
        case Errc::not_symmetric: return "NotSymmetric";
        case Errc::not_bona_fide: return "NotBonaFide";
        case Errc::dimension_mismatch: return "DimensionMismatch";
        case Errc::index_out_of_range: return "IndexOutOfRange";
        case Errc::negative_discriminant: return "NegativeDiscriminant";
        case Errc::degenerate_block: return "DegenerateBlock";
        case Errc::numerical_failure: return "NumericalFailure";
        case Errc::negative_squeezing: return "NegativeSqueezing";
        case Errc::invalid_cm: return "InvalidCM";
        case Errc::invalid_input: return "InvalidInput";
        case Errc::g_out_of_range: return "GOutOfRange";
        case Errc::grid_too_small: return "GridTooSmall";
        case Errc::negative_probability: return "NegativeProbability";
    }
    return "Unknown";
}

Tolerances& default_tolerances() {
    static Tolerances tol;
    return tol;
}

Mat::Mat(std::size_t rows, std::size_t cols, std::initializer_list<double> entries)
    : rows_(rows), cols_(cols), a_(entries) {
    if (a_.size() != rows * cols)
        throw Error(Errc::wrong_shape, "initializer size does not match matrix shape");
}

Mat Mat::identity(std::size_t n) {
    Mat m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Mat Mat::diag(const Vec& d) {
    Mat m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
}

Mat Mat::transposed() const {
    Mat t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

Mat& Mat::operator+=(const Mat& o) {
    if (!same_shape(o)) throw Error(Errc::dimension_mismatch, "matrix sum shape mismatch");
    for (std::size_t k = 0; k < a_.size(); ++k) a_[k] += o.a_[k];
    return *this;
}

Mat& Mat::operator-=(const Mat& o) {
    if (!same_shape(o)) throw Error(Errc::dimension_mismatch, "matrix difference shape mismatch");
    for (std::size_t k = 0; k < a_.size(); ++k) a_[k] -= o.a_[k];
    return *this;
}

Mat& Mat::operator*=(double s) {
    for (double& x : a_) x *= s;
    return *this;
}

Mat operator*(const Mat& a, const Mat& b) {
    if (a.cols() != b.rows()) throw Error(Errc::dimension_mismatch, "matrix product shape mismatch");
    Mat c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    }
    return c;
}

Vec operator*(const Mat& m, const Vec& v) {
    if (m.cols() != v.size()) throw Error(Errc::dimension_mismatch, "matrix-vector shape mismatch");
    Vec r(m.rows(), 0.0);
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) r[i] += m(i, j) * v[j];
    return r;
}

double trace(const Mat& m) {
    double t = 0.0;
    for (std::size_t i = 0; i < std::min(m.rows(), m.cols()); ++i) t += m(i, i);
    return t;
}

double max_abs(const Mat& m) {
    double r = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) r = std::max(r, std::abs(m(i, j)));
    return r;
}

double max_abs_diff(const Mat& a, const Mat& b) {
    if (!a.same_shape(b)) throw Error(Errc::dimension_mismatch, "max_abs_diff shape mismatch");
    double r = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) r = std::max(r, std::abs(a(i, j) - b(i, j)));
    return r;
}

double det(const Mat& m) {
    if (m.rows() != m.cols()) throw Error(Errc::wrong_shape, "determinant of non-square matrix");
    const std::size_t n = m.rows();
    if (n == 0) return 1.0;
    Mat lu = m;
    double d = 1.0;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(lu(r, col)) > std::abs(lu(piv, col))) piv = r;
        if (lu(piv, col) == 0.0) return 0.0;
        if (piv != col) {
            for (std::size_t j = 0; j < n; ++j) std::swap(lu(piv, j), lu(col, j));
            d = -d;
        }
        d *= lu(col, col);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = lu(r, col) / lu(col, col);
            for (std::size_t j = col; j < n; ++j) lu(r, j) -= f * lu(col, j);
        }
    }
    return d;
}

Mat inverse(const Mat& m) {
    if (m.rows() != m.cols()) throw Error(Errc::wrong_shape, "inverse of non-square matrix");
    const std::size_t n = m.rows();
    Mat a = m;
    Mat inv = Mat::identity(n);
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a(r, col)) > std::abs(a(piv, col))) piv = r;
        if (a(piv, col) == 0.0)
            throw Error(Errc::numerical_failure, "singular matrix in inverse()");
        if (piv != col)
            for (std::size_t j = 0; j < n; ++j) {
                std::swap(a(piv, j), a(col, j));
                std::swap(inv(piv, j), inv(col, j));
            }
        const double p = a(col, col);
        for (std::size_t j = 0; j < n; ++j) {
            a(col, j) /= p;
            inv(col, j) /= p;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            const double f = a(r, col);
            if (f == 0.0) continue;
            for (std::size_t j = 0; j < n; ++j) {
                a(r, j) -= f * a(col, j);
                inv(r, j) -= f * inv(col, j);
            }
        }
    }
    return inv;
}

SymEigen jacobi_eigen(const Mat& m, int max_sweeps) {
    if (m.rows() != m.cols()) throw Error(Errc::wrong_shape, "jacobi_eigen needs a square matrix");
    const std::size_t n = m.rows();
    Mat a = m;
    Mat v = Mat::identity(n);

    auto off_diag_norm = [&]() {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) s += a(i, j) * a(i, j);
        return s;
    };

    const double scale = std::max(max_abs(m), 1e-300);
    const double stop = (scale * 1e-15) * (scale * 1e-15) * static_cast<double>(n * n);

    int sweep = 0;
    while (off_diag_norm() > stop) {
        if (++sweep > max_sweeps)
            throw Error(Errc::numerical_failure, "jacobi_eigen did not converge");
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (std::abs(apq) <= scale * 1e-18) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });

    SymEigen out;
    out.values.resize(n);
    out.vectors = Mat(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        out.values[j] = a(order[j], order[j]);
        for (std::size_t i = 0; i < n; ++i) out.vectors(i, j) = v(i, order[j]);
    }
    return out;
}

Mat sym_sqrt(const Mat& m) {
    SymEigen e = jacobi_eigen(m);
    const std::size_t n = m.rows();
    Mat r(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        const double lam = e.values[k];
        if (lam < -1e-12 * std::max(1.0, max_abs(m)))
            throw Error(Errc::numerical_failure, "sym_sqrt of an indefinite matrix");
        const double s = std::sqrt(std::max(lam, 0.0));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) r(i, j) += s * e.vectors(i, k) * e.vectors(j, k);
    }
    return r;
}

double det2(const Mat& m) { return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0); }

Mat adj2(const Mat& m) {
    return Mat(2, 2, {m(1, 1), -m(0, 1), -m(1, 0), m(0, 0)});
}

Mat inv2(const Mat& m) {
    const double d = det2(m);
    if (d == 0.0) throw Error(Errc::numerical_failure, "singular 2x2 matrix");
    Mat a = adj2(m);
    a *= 1.0 / d;
    return a;
}

Mat rotation2(double angle) {
    const double c = std::cos(angle), s = std::sin(angle);
    return Mat(2, 2, {c, -s, s, c});
}

RotSvd2 rot_svd2(const Mat& m) {
    // Decompose into rotations and signed singular values; the classic
    // closed form via sums/differences of diagonal and antidiagonal parts.
    const double e = 0.5 * (m(0, 0) + m(1, 1));
    const double f = 0.5 * (m(0, 0) - m(1, 1));
    const double g = 0.5 * (m(1, 0) + m(0, 1));
    const double h = 0.5 * (m(1, 0) - m(0, 1));
    const double q = std::sqrt(e * e + h * h);
    const double r = std::sqrt(f * f + g * g);
    const double a1 = std::atan2(g, f);
    const double a2 = std::atan2(h, e);
    const double beta = 0.5 * (a1 - a2);
    const double gamma = 0.5 * (a1 + a2);

    RotSvd2 out;
    out.u = rotation2(gamma);
    out.v = rotation2(beta);
    out.s1 = q + r;
    out.s2 = q - r;
    return out;
}

double dot(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) throw Error(Errc::dimension_mismatch, "dot shape mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

}  // namespace cvqt
