#include "ufm/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ufm/errors.hpp"

namespace ufm {

Matrix complement_basis(int m) {
    if (m < 2) throw ConfigError("complement_basis requires m >= 2");
    // Householder reflector H = I - 2 v v^T / |v|^2 with v = e_1 - 1/sqrt(m);
    // H e_1 = 1/sqrt(m), so columns 2..m are orthonormal and orthogonal to 1.
    // Expanding v gives exact entries: first row 1/sqrt(m), below it
    // delta_{i,j+1} - 1/(m - sqrt(m)).
    const double sm = std::sqrt(static_cast<double>(m));
    Matrix B(m, m - 1);
    for (int j = 0; j < m - 1; ++j) {
        B(0, j) = 1.0 / sm;
        for (int i = 1; i < m; ++i) B(i, j) = (i == j + 1 ? 1.0 : 0.0) - 1.0 / (m - sm);
    }
    return B;
}

SpectralFactors closed_form_factors(const StepConfig& cfg) {
    cfg.validate();
    if (cfg.n_min != 1)
        throw ConfigError(
            "closed-form factors require n_min == 1; use numeric_svd on the SEL matrix");

    const int k = cfg.k;
    const int h = k / 2;           // majority (= minority) class count
    const int m = k - 1;           // rank of Z
    const double R = cfg.R;
    const int Ri = static_cast<int>(std::llround(R));  // integral when n_min == 1
    const int n = cfg.total_examples();
    const Matrix F = complement_basis(h);  // h x (h-1)

    SpectralFactors f;

    f.sigma.assign(m, 1.0);
    for (int j = 0; j < h - 1; ++j) f.sigma[j] = std::sqrt(R);
    f.sigma[h - 1] = std::sqrt((R + 1.0) / 2.0);
    // remaining h-1 entries stay 1 (already nonincreasing since R >= 1)

    // Left factor: maj-maj modes live on majority coordinates, min-min modes
    // on minority coordinates, and the middle mode splits the two halves.
    f.U = Matrix(k, m);
    const double invsk = 1.0 / std::sqrt(static_cast<double>(k));
    for (int j = 0; j < h - 1; ++j)
        for (int i = 0; i < h; ++i) f.U(i, j) = F(i, j);
    for (int i = 0; i < h; ++i) {
        f.U(i, h - 1) = -invsk;
        f.U(h + i, h - 1) = invsk;
    }
    for (int j = 0; j < h - 1; ++j)
        for (int i = 0; i < h; ++i) f.U(h + i, h + j) = F(i, j);

    // Right factor: majority class c occupies columns [c*R, (c+1)*R),
    // minority class c occupies column h*R + c.
    f.V = Matrix(n, m);
    const int maj_cols = h * Ri;
    const double inv_sR = 1.0 / std::sqrt(R);
    const double mid = std::sqrt(2.0 / ((R + 1.0) * k));
    for (int j = 0; j < h - 1; ++j)
        for (int c = 0; c < h; ++c)
            for (int r = 0; r < Ri; ++r) f.V(c * Ri + r, j) = inv_sR * F(c, j);
    for (int col = 0; col < maj_cols; ++col) f.V(col, h - 1) = -mid;
    for (int col = maj_cols; col < n; ++col) f.V(col, h - 1) = mid;
    for (int j = 0; j < h - 1; ++j)
        for (int c = 0; c < h; ++c) f.V(maj_cols + c, h + j) = F(c, j);

    return f;
}

namespace {

// One-sided Jacobi on A (p x q, p >= q): orthogonalize columns pairwise,
// accumulating the rotations into V. Deterministic sweep order (i<j by index).
SvdResult jacobi_svd_tall(Matrix A) {
    const int p = A.rows();
    const int q = A.cols();
    Matrix V = Matrix::identity(q);

    auto col_dot = [&](const Matrix& M, int i, int j) {
        double s = 0.0;
        for (int r = 0; r < M.rows(); ++r) s += M(r, i) * M(r, j);
        return s;
    };

    const double tol = 1e-15;
    const int max_sweeps = 60;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        bool rotated = false;
        for (int i = 0; i < q - 1; ++i) {
            for (int j = i + 1; j < q; ++j) {
                const double alpha = col_dot(A, i, i);
                const double beta = col_dot(A, j, j);
                const double gamma = col_dot(A, i, j);
                if (std::fabs(gamma) <= tol * std::sqrt(alpha * beta)) continue;
                rotated = true;
                const double zeta = (beta - alpha) / (2.0 * gamma);
                const double t =
                    std::copysign(1.0, zeta) / (std::fabs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                for (int r = 0; r < p; ++r) {
                    const double ai = A(r, i), aj = A(r, j);
                    A(r, i) = c * ai - s * aj;
                    A(r, j) = s * ai + c * aj;
                }
                for (int r = 0; r < q; ++r) {
                    const double vi = V(r, i), vj = V(r, j);
                    V(r, i) = c * vi - s * vj;
                    V(r, j) = s * vi + c * vj;
                }
            }
        }
        if (!rotated) break;
    }

    // Column norms are the singular values; sort nonincreasing (stable so
    // degenerate levels keep a deterministic order) and truncate tiny ones.
    std::vector<double> norms(q);
    for (int j = 0; j < q; ++j) norms[j] = std::sqrt(col_dot(A, j, j));
    std::vector<int> order(q);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return norms[a] > norms[b]; });

    const double smax = norms.empty() ? 0.0 : norms[order[0]];
    const double cutoff = 1e-10 * smax;
    int rank = 0;
    for (int j = 0; j < q; ++j)
        if (norms[order[j]] > 0.0 && norms[order[j]] >= cutoff) ++rank;

    SvdResult out;
    out.rank = rank;
    out.sigma.resize(rank);
    out.U = Matrix(p, rank);
    out.V = Matrix(q, rank);
    for (int jj = 0; jj < rank; ++jj) {
        const int j = order[jj];
        const double s = norms[j];
        out.sigma[jj] = s;
        for (int r = 0; r < p; ++r) out.U(r, jj) = A(r, j) / s;
        for (int r = 0; r < q; ++r) out.V(r, jj) = V(r, j);
    }
    return out;
}

}  // namespace

SvdResult numeric_svd(const Matrix& M) {
    if (M.rows() < 1 || M.cols() < 1) throw ConfigError("numeric_svd requires a non-empty matrix");
    if (M.rows() > 4096 || M.cols() > 4096)
        throw ConfigError("numeric_svd supports matrices up to 4096 x 4096");
    if (!M.all_finite()) throw NumericalError("numeric_svd input has non-finite entries");

    if (M.rows() >= M.cols()) return jacobi_svd_tall(M);
    // Wide input: factor the transpose and swap the roles of U and V.
    SvdResult t = jacobi_svd_tall(M.transposed());
    std::swap(t.U, t.V);
    return t;
}

double verify_factorization(const SelMatrix& Z, const SpectralFactors& f) {
    const int k = Z.entries.rows();
    const int n = Z.entries.cols();
    const int m = static_cast<int>(f.sigma.size());
    if (f.U.rows() != k || f.U.cols() != m || f.V.rows() != n || f.V.cols() != m)
        throw ConfigError("verify_factorization: factor shapes do not match the SEL matrix");

    const Matrix recon = scale_columns(f.U, f.sigma) * f.V.transposed();
    const double denom = Z.entries.frobenius_norm();
    if (denom == 0.0) throw ConfigError("verify_factorization: zero SEL matrix");
    return (Z.entries - recon).frobenius_norm() / denom;
}

std::vector<double> step_sigma(int k, double R) {
    if (k < 4 || k % 2 != 0) throw ConfigError("k must be even and >= 4");
    if (!(R >= 1.0)) throw ConfigError("R must be >= 1");
    const int h = k / 2;
    std::vector<double> sigma(k - 1, 1.0);
    for (int j = 0; j < h - 1; ++j) sigma[j] = std::sqrt(R);
    sigma[h - 1] = std::sqrt((R + 1.0) / 2.0);
    return sigma;
}

}  // namespace ufm
