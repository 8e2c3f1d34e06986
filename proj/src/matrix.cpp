#include "ufm/matrix.hpp"

#include <cassert>
#include <cmath>

#include "ufm/errors.hpp"

namespace ufm {

Matrix Matrix::transposed() const {
    Matrix T(cols_, rows_);
    for (int r = 0; r < rows_; ++r)
        for (int c = 0; c < cols_; ++c) T(c, r) = (*this)(r, c);
    return T;
}

double Matrix::frobenius_norm() const {
    double s = 0.0;
    for (double x : a_) s += x * x;
    return std::sqrt(s);
}

bool Matrix::all_finite() const {
    for (double x : a_)
        if (!std::isfinite(x)) return false;
    return true;
}

Matrix& Matrix::operator+=(const Matrix& other) {
    assert(rows_ == other.rows_ && cols_ == other.cols_);
    for (size_t i = 0; i < a_.size(); ++i) a_[i] += other.a_[i];
    return *this;
}

Matrix& Matrix::operator-=(const Matrix& other) {
    assert(rows_ == other.rows_ && cols_ == other.cols_);
    for (size_t i = 0; i < a_.size(); ++i) a_[i] -= other.a_[i];
    return *this;
}

Matrix& Matrix::operator*=(double s) {
    for (double& x : a_) x *= s;
    return *this;
}

Matrix operator*(const Matrix& A, const Matrix& B) {
    if (A.cols() != B.rows())
        throw ConfigError("matrix product shape mismatch: " + std::to_string(A.rows()) + "x" +
                          std::to_string(A.cols()) + " * " + std::to_string(B.rows()) + "x" +
                          std::to_string(B.cols()));
    Matrix C(A.rows(), B.cols());
    // i-k-j order keeps the inner loop contiguous for row-major storage.
    for (int i = 0; i < A.rows(); ++i) {
        for (int k = 0; k < A.cols(); ++k) {
            const double aik = A(i, k);
            if (aik == 0.0) continue;
            for (int j = 0; j < B.cols(); ++j) C(i, j) += aik * B(k, j);
        }
    }
    return C;
}

Matrix operator+(Matrix A, const Matrix& B) {
    A += B;
    return A;
}

Matrix operator-(Matrix A, const Matrix& B) {
    A -= B;
    return A;
}

Matrix operator*(double s, Matrix A) {
    A *= s;
    return A;
}

Matrix scale_columns(Matrix M, const std::vector<double>& w) {
    if (static_cast<size_t>(M.cols()) != w.size())
        throw ConfigError("column scaling expects one weight per column");
    for (int r = 0; r < M.rows(); ++r)
        for (int c = 0; c < M.cols(); ++c) M(r, c) *= w[c];
    return M;
}

Matrix scale_rows(Matrix M, const std::vector<double>& w) {
    if (static_cast<size_t>(M.rows()) != w.size())
        throw ConfigError("row scaling expects one weight per row");
    for (int r = 0; r < M.rows(); ++r)
        for (int c = 0; c < M.cols(); ++c) M(r, c) *= w[r];
    return M;
}

double max_abs(const Matrix& M) {
    double m = 0.0;
    for (int r = 0; r < M.rows(); ++r)
        for (int c = 0; c < M.cols(); ++c) m = std::max(m, std::fabs(M(r, c)));
    return m;
}

}  // namespace ufm
