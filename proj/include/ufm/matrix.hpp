#pragma once

#include <cstddef>
#include <vector>

namespace ufm {

// Dense row-major matrix of doubles. Everything in this project is
// desk-scale (k <= 32 classes, n <= 1e4 examples), so a plain contiguous
// buffer with unblocked loops is both fast enough and easy to audit.
class Matrix {
public:
    Matrix() = default;
    Matrix(int rows, int cols, double fill = 0.0)
        : rows_(rows), cols_(cols), a_(static_cast<size_t>(rows) * cols, fill) {}

    static Matrix identity(int n) {
        Matrix I(n, n);
        for (int i = 0; i < n; ++i) I(i, i) = 1.0;
        return I;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    bool empty() const { return a_.empty(); }

    double& operator()(int r, int c) { return a_[static_cast<size_t>(r) * cols_ + c]; }
    double operator()(int r, int c) const { return a_[static_cast<size_t>(r) * cols_ + c]; }

    double* data() { return a_.data(); }
    const double* data() const { return a_.data(); }

    Matrix transposed() const;
    double frobenius_norm() const;
    bool all_finite() const;

    Matrix& operator+=(const Matrix& other);
    Matrix& operator-=(const Matrix& other);
    Matrix& operator*=(double s);

    bool operator==(const Matrix& other) const {
        return rows_ == other.rows_ && cols_ == other.cols_ && a_ == other.a_;
    }

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> a_;
};

Matrix operator*(const Matrix& A, const Matrix& B);
Matrix operator+(Matrix A, const Matrix& B);
Matrix operator-(Matrix A, const Matrix& B);
Matrix operator*(double s, Matrix A);

// M * diag(w): scales column j of M by w[j].
Matrix scale_columns(Matrix M, const std::vector<double>& w);

// diag(w) * M: scales row i of M by w[i].
Matrix scale_rows(Matrix M, const std::vector<double>& w);

double max_abs(const Matrix& M);

}  // namespace ufm
