#pragma once

#include <vector>

#include "ufm/matrix.hpp"
#include "ufm/sel.hpp"

namespace ufm {

// SVD triple of the SEL matrix restricted to its rank (k-1):
// Z = U diag(sigma) V^T with U: k x (k-1), V: n x (k-1), sigma nonincreasing.
struct SpectralFactors {
    Matrix U;
    std::vector<double> sigma;
    Matrix V;
};

// Thin SVD of an arbitrary small dense matrix; singular values below
// 1e-10 * sigma_max are truncated and `rank` counts the survivors.
struct SvdResult {
    Matrix U;                   // p x rank
    std::vector<double> sigma;  // length rank, nonincreasing
    Matrix V;                   // q x rank
    int rank = 0;
};

// Deterministic m x (m-1) orthonormal basis of the subspace orthogonal to
// the all-ones vector: columns 2..m of the Householder reflector that maps
// e_1 to 1_m/sqrt(m). Closed-form entries, bit-identical across calls.
Matrix complement_basis(int m);

// Closed-form SVD of the SEL matrix of a STEP instance with n_min = 1:
//   sigma = (sqrt(R) x(k/2-1), sqrt((R+1)/2), 1 x(k/2-1))
//   U  = [F, -sqrt(1/k) 1, 0; 0, sqrt(1/k) 1, F]           (F = complement_basis(k/2))
//   V^T rows: sqrt(1/R) F^T (x) 1_R^T on majority columns   (maj-maj modes)
//             -/+ sqrt(2/((R+1)k)) constant blocks          (maj-min mode)
//             F^T on minority columns                       (min-min modes)
// Throws ConfigError for n_min != 1 (use numeric_svd on Z instead).
SpectralFactors closed_form_factors(const StepConfig& cfg);

// One-sided Jacobi (Hestenes) SVD with a fixed sweep order; deterministic,
// high relative accuracy at desk scale (p, q <= 4096).
SvdResult numeric_svd(const Matrix& M);

// Relative reconstruction residual ||Z - U diag(sigma) V^T||_F / ||Z||_F.
double verify_factorization(const SelMatrix& Z, const SpectralFactors& f);

// Spectrum of a STEP instance (n_min = 1) straight from the formula, without
// building Z; valid for any real R >= 1. Used for schedules and sweeps.
std::vector<double> step_sigma(int k, double R);

}  // namespace ufm
