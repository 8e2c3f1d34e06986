#include "ufm/reweight.hpp"

#include <cmath>

#include "ufm/errors.hpp"

namespace ufm {

namespace {

void check_gamma(double gamma) {
    if (!(gamma >= 0.0 && gamma <= 1.0)) throw ConfigError("gamma must be in [0,1]");
}

}  // namespace

WeightSpec step_weights(const StepConfig& cfg, double gamma, double scale) {
    cfg.validate();
    check_gamma(gamma);
    if (!(scale > 0.0)) throw ConfigError("weight scale must be positive");

    // Class frequency pi_c = n_c / n; weight = scale * (pi_c * k/2)^(-gamma).
    // On a STEP instance pi_maj * k/2 = R/(R+1) and pi_min * k/2 = 1/(R+1),
    // independent of n_min.
    const double R = cfg.R;
    const double w_maj = scale * std::pow((R + 1.0) / R, gamma);
    const double w_min = scale * std::pow(R + 1.0, gamma);

    WeightSpec w;
    w.gamma = gamma;
    w.per_example.reserve(cfg.total_examples());
    const int n_maj = cfg.majority_size();
    for (int c = 0; c < cfg.k / 2; ++c)
        for (int j = 0; j < n_maj; ++j) w.per_example.push_back(w_maj);
    for (int c = 0; c < cfg.k / 2; ++c)
        for (int j = 0; j < cfg.n_min; ++j) w.per_example.push_back(w_min);
    return w;
}

EffectiveWeights effective_weights(const Matrix& V, const WeightSpec& w) {
    const int n = V.rows();
    const int m = V.cols();
    if (static_cast<size_t>(n) != w.per_example.size())
        throw ConfigError("effective_weights: weight count must match the rows of V");
    for (double x : w.per_example)
        if (!(x > 0.0)) throw ConfigError("effective_weights: weights must be positive");

    const Matrix lam = V.transposed() * scale_rows(V, w.per_example);

    EffectiveWeights out;
    out.lambdas.resize(m);
    double off = 0.0;
    for (int i = 0; i < m; ++i) {
        out.lambdas[i] = lam(i, i);
        for (int j = 0; j < m; ++j)
            if (i != j) off += lam(i, j) * lam(i, j);
    }
    out.off_diag_norm = std::sqrt(off);
    if (out.off_diag_norm > 1e-8)
        throw ConfigError("weighting does not act mode-wise: off-diagonal residual " +
                          std::to_string(out.off_diag_norm) + " exceeds 1e-8");
    return out;
}

std::vector<double> step_lambda(int k, double R, double gamma) {
    if (k < 4 || k % 2 != 0) throw ConfigError("k must be even and >= 4");
    if (!(R >= 1.0)) throw ConfigError("R must be >= 1");
    check_gamma(gamma);

    const double w_maj = std::pow((R + 1.0) / R, gamma);
    const double w_min = std::pow(R + 1.0, gamma);
    const int h = k / 2;
    std::vector<double> lam(k - 1, w_min);
    for (int j = 0; j < h - 1; ++j) lam[j] = w_maj;
    lam[h - 1] = (R * w_maj + w_min) / (R + 1.0);
    return lam;
}

}  // namespace ufm
