#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "ufm/matrix.hpp"
#include "ufm/reweight.hpp"
#include "ufm/sel.hpp"
#include "ufm/spectral.hpp"

namespace ufm {

enum class InitKind { spectral, random };

// Initialization of the two-factor model (W: k x d, H: d x n).
//   spectral: W(0) = e^{-delta} U Rot^T, H(0) = e^{-delta} Rot V^T, where Rot
//             is a d x (k-1) partial-orthogonal matrix (default: identity
//             embedding of the first k-1 coordinates).
//   random:   i.i.d. Gaussian entries, rescaled so ||W(0)||_F and ||H(0)||_F
//             match the spectral initialization's norms (e^{-delta} sqrt(k-1)).
struct InitSpec {
    InitKind kind = InitKind::spectral;
    double delta = 8.0;      // log-scale of the initialization, > 0
    std::uint64_t seed = 1;  // random kind only
    Matrix rotation;         // spectral kind; empty selects the default embedding
};

struct ModelState {
    Matrix W;
    Matrix H;
    long step = 0;
    double time = 0.0;  // step * eta
};

// Closed-form per-mode learning times and their relative spread.
struct LearningSchedule {
    std::vector<double> times;  // T_i = 1/(sigma_i * lambda_i), rescaled units
    double window = 0.0;        // (T_max - T_min) / T_min
};

// Time series recorded by simulate(): per recorded step, the per-mode factors
// a_i = u_i^T L v_i / sigma_i, the singular values of the logits L = WH
// (zero-padded past the numerical rank so every record has k-1 entries — see
// numeric_svd truncation), and the weighted loss.
struct Trajectory {
    std::vector<long> sample_steps;
    std::vector<double> times;
    std::vector<std::vector<double>> mode_factors;
    std::vector<std::vector<double>> logit_singulars;
    std::vector<double> losses;
};

// How simulate() discretizes gradient flow. gd_step is always the plain
// explicit-Euler map; heun composes two of its gradient evaluations into an
// explicit-trapezoid step (second order, needed for tight theory tracking at
// the default step size).
enum class Integrator { euler, heun };

// Observer invoked at every recorded step (after recording) with the current
// parameters; used for confusion snapshots and subspace diagnostics.
using StepObserver = std::function<void(long step, const Matrix& W, const Matrix& H)>;

ModelState init_state(const StepConfig& cfg, const SpectralFactors& f, const InitSpec& spec);

// One explicit-Euler step of gradient descent on the weighted square loss,
// updating W and H simultaneously from the pre-step state:
//   W <- W + eta (Z - WH) Omega H^T,  H <- H + eta W^T (Z - WH) Omega.
ModelState gd_step(const ModelState& s, const SelMatrix& Z, const WeightSpec& w, double eta);

// Iterate gradient descent for `steps` steps (>= 0), recording every
// `record_every` steps (always including step 0). Throws NumericalError with
// the offending step on divergence (non-finite entries, or loss exceeding
// 10x its initial value).
Trajectory simulate(const StepConfig& cfg, const SelMatrix& Z, const SpectralFactors& f,
                    const WeightSpec& w, const InitSpec& init, double eta, long steps,
                    long record_every, Integrator method = Integrator::heun,
                    const StepObserver& observer = {});

// Projection-based mode factors (u_i^T L v_i) / sigma_i.
std::vector<double> mode_factors(const Matrix& L, const SpectralFactors& f);

// Closed-form mode factor a(t) = 1 / (1 + (sigma e^{2 delta} - 1) e^{-2 sigma lambda t});
// lambda = 1 is the unweighted case.
double theory_factor(double sigma, double lambda, double delta, double t);

// T_i = 1/(sigma_i lambda_i) and the window (T_max - T_min)/T_min.
LearningSchedule learning_schedule(const std::vector<double>& sigma,
                                   const std::vector<double>& lambda);

// delta -> infinity limit of the rescaled trajectory: 0 before T = 1/(sigma
// lambda), 1/(1+sigma) at T, 1 after.
double step_limit_factor(double sigma, double lambda, double t_rescaled);

// Weighted loss 0.5 * sum_j w_j ||z_j - (WH)_j||^2.
double weighted_loss(const Matrix& W, const Matrix& H, const SelMatrix& Z, const WeightSpec& w);

// Diagnostics for the spectral-init invariants: the off-diagonal Frobenius
// mass of U^T L V (modes stay decoupled) and the Frobenius mass of L outside
// span(U) x span(V) (training never leaves the label subspaces).
double diagonal_coupling_residual(const Matrix& L, const SpectralFactors& f);
double off_subspace_residual(const Matrix& L, const SpectralFactors& f);

}  // namespace ufm
