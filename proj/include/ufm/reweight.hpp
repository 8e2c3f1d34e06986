#pragma once

#include <vector>

#include "ufm/matrix.hpp"
#include "ufm/sel.hpp"

namespace ufm {

// Per-example weights: the diagonal of Omega in the weighted square loss
// 0.5 * ||(Z - WH) Omega^{1/2}||_F^2. Weights are constant within each class
// block and proportional to (class frequency)^(-gamma), normalized so that
// gamma = 0.5 on a STEP instance gives majority weight sqrt((R+1)/R) and
// minority weight sqrt(R+1).
struct WeightSpec {
    double gamma = 0.0;
    std::vector<double> per_example;  // length n, positive
};

// Diagonal of Lambda = V^T Omega V plus the Frobenius norm of what was
// discarded off the diagonal. For class-block-constant weights the
// off-diagonal part vanishes (every singular subspace of Z is Omega-invariant).
struct EffectiveWeights {
    std::vector<double> lambdas;  // length k-1, positive
    double off_diag_norm = 0.0;
};

// Frequency-based weights for a STEP instance. gamma in [0,1];
// scale multiplies every weight (only relative rates matter, so the
// normalization drops the common (k/2)^gamma factor).
WeightSpec step_weights(const StepConfig& cfg, double gamma, double scale = 1.0);

// Brute-force V^T diag(w) V; errors out if the off-diagonal residual exceeds
// 1e-8 (the weighting does not act mode-wise), otherwise returns the diagonal.
EffectiveWeights effective_weights(const Matrix& V, const WeightSpec& w);

// Effective weights of a STEP instance straight from the block formula
// (majority weight on maj-maj modes, (R*w_maj + w_min)/(R+1) on the middle
// mode, minority weight on min-min modes); valid for any real R >= 1.
std::vector<double> step_lambda(int k, double R, double gamma);

}  // namespace ufm
