#pragma once

#include <cstddef>
#include <initializer_list>
#include <utility>
#include <vector>

namespace cvqt {

using Vec = std::vector<double>;

/// Row-major dense matrix sized for phase-space work (2N x 2N, N <= 4 or so).
class Mat {
public:
    Mat() = default;
    Mat(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), a_(rows * cols, fill) {}
    Mat(std::size_t rows, std::size_t cols, std::initializer_list<double> entries);

    static Mat identity(std::size_t n);
    static Mat diag(const Vec& d);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

    const double* data() const { return a_.data(); }
    double* data() { return a_.data(); }

    Mat transposed() const;

    Mat& operator+=(const Mat& o);
    Mat& operator-=(const Mat& o);
    Mat& operator*=(double s);

    friend Mat operator+(Mat a, const Mat& b) { return a += b; }
    friend Mat operator-(Mat a, const Mat& b) { return a -= b; }
    friend Mat operator*(Mat a, double s) { return a *= s; }
    friend Mat operator*(double s, Mat a) { return a *= s; }
    friend Mat operator*(const Mat& a, const Mat& b);

    bool same_shape(const Mat& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> a_;
};

Vec operator*(const Mat& m, const Vec& v);

double trace(const Mat& m);
double max_abs(const Mat& m);
double max_abs_diff(const Mat& a, const Mat& b);

/// Determinant via partially pivoted LU.
double det(const Mat& m);

/// Inverse via Gauss-Jordan with partial pivoting.  Throws on singular input.
Mat inverse(const Mat& m);

struct SymEigen {
    Vec values;   // ascending
    Mat vectors;  // columns are eigenvectors, orthonormal
};

/// Cyclic Jacobi eigensolver for symmetric matrices.
SymEigen jacobi_eigen(const Mat& m, int max_sweeps = 100);

/// Symmetric positive semi-definite square root (via Jacobi).
Mat sym_sqrt(const Mat& m);

// 2x2 conveniences used heavily by the two-mode formulas.
double det2(const Mat& m);
Mat adj2(const Mat& m);
Mat inv2(const Mat& m);
Mat rotation2(double angle);

/// Rotation-factor SVD of a 2x2 matrix: m = u * diag(s1, s2) * v^T with
/// u, v proper rotations, s1 >= |s2|, and s1 * s2 = det(m).
struct RotSvd2 {
    Mat u;
    Mat v;
    double s1;
    double s2;
};
RotSvd2 rot_svd2(const Mat& m);

double dot(const Vec& a, const Vec& b);

}  // namespace cvqt
