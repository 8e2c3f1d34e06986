#include "ufm/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "ufm/errors.hpp"

namespace ufm {

namespace {

// Deterministic standard normals: mt19937_64 (bit-exact across platforms by
// the standard) + explicit Box-Muller, because std::normal_distribution's
// algorithm is implementation-defined and would break seed reproducibility.
class GaussianRng {
public:
    explicit GaussianRng(std::uint64_t seed) : gen_(seed) {}

    double operator()() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * M_PI * u2;
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

private:
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    std::mt19937_64 gen_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

Matrix default_rotation(int d, int m) {
    Matrix rot(d, m);
    for (int i = 0; i < m; ++i) rot(i, i) = 1.0;
    return rot;
}

void check_partial_orthogonal(const Matrix& rot) {
    const Matrix gram = rot.transposed() * rot;
    double err = 0.0;
    for (int i = 0; i < gram.rows(); ++i)
        for (int j = 0; j < gram.cols(); ++j)
            err = std::max(err, std::fabs(gram(i, j) - (i == j ? 1.0 : 0.0)));
    if (err > 1e-12)
        throw ConfigError("init rotation is not partial-orthogonal (Gram deviation " +
                          std::to_string(err) + ")");
}

void fill_gaussian(Matrix& M, GaussianRng& rng) {
    for (int r = 0; r < M.rows(); ++r)
        for (int c = 0; c < M.cols(); ++c) M(r, c) = rng();
}

void rescale_to_norm(Matrix& M, double target) {
    const double cur = M.frobenius_norm();
    if (cur == 0.0) throw NumericalError("random init drew an all-zero matrix");
    M *= target / cur;
}

struct Gradients {
    Matrix GW;
    Matrix GH;
};

// Gradient of 0.5 ||(Z - WH) Omega^{1/2}||_F^2 in the descent direction.
Gradients weighted_gradients(const Matrix& W, const Matrix& H, const SelMatrix& Z,
                             const WeightSpec& w) {
    const Matrix E = scale_columns(Z.entries - W * H, w.per_example);
    return {E * H.transposed(), W.transposed() * E};
}

}  // namespace

ModelState init_state(const StepConfig& cfg, const SpectralFactors& f, const InitSpec& spec) {
    cfg.validate();
    if (!(spec.delta > 0.0)) throw ConfigError("init delta must be positive");
    const int k = cfg.k;
    const int m = static_cast<int>(f.sigma.size());
    const int n = f.V.rows();
    if (f.U.rows() != k) throw ConfigError("init_state: factors do not match the instance");

    const double scale = std::exp(-spec.delta);
    ModelState s;
    s.step = 0;
    s.time = 0.0;

    if (spec.kind == InitKind::spectral) {
        Matrix rot = spec.rotation.empty() ? default_rotation(cfg.d, m) : spec.rotation;
        if (rot.rows() != cfg.d || rot.cols() != m)
            throw ConfigError("init rotation must be d x (k-1)");
        check_partial_orthogonal(rot);
        s.W = scale * (f.U * rot.transposed());
        s.H = scale * (rot * f.V.transposed());
    } else {
        // Norm-matched Gaussian: same Frobenius norms as the spectral init.
        GaussianRng rng(spec.seed);
        s.W = Matrix(k, cfg.d);
        s.H = Matrix(cfg.d, n);
        fill_gaussian(s.W, rng);
        fill_gaussian(s.H, rng);
        const double target = scale * std::sqrt(static_cast<double>(m));
        rescale_to_norm(s.W, target);
        rescale_to_norm(s.H, target);
    }
    return s;
}

ModelState gd_step(const ModelState& s, const SelMatrix& Z, const WeightSpec& w, double eta) {
    if (!(eta > 0.0)) throw ConfigError("eta must be positive");
    const Gradients g = weighted_gradients(s.W, s.H, Z, w);
    ModelState next;
    next.W = s.W + eta * g.GW;
    next.H = s.H + eta * g.GH;
    next.step = s.step + 1;
    next.time = s.time + eta;
    if (!next.W.all_finite() || !next.H.all_finite())
        throw NumericalError("non-finite parameters after gradient step", next.step);
    return next;
}

Trajectory simulate(const StepConfig& cfg, const SelMatrix& Z, const SpectralFactors& f,
                    const WeightSpec& w, const InitSpec& init, double eta, long steps,
                    long record_every, Integrator method, const StepObserver& observer) {
    if (steps < 0) throw ConfigError("steps must be >= 0");
    if (record_every < 1) throw ConfigError("record_every must be >= 1");
    if (!(eta > 0.0)) throw ConfigError("eta must be positive");

    ModelState s = init_state(cfg, f, init);
    const int m = static_cast<int>(f.sigma.size());

    Trajectory traj;
    const long records = steps / record_every + 1;
    traj.sample_steps.reserve(records);
    traj.times.reserve(records);
    traj.mode_factors.reserve(records);
    traj.logit_singulars.reserve(records);
    traj.losses.reserve(records);

    double initial_loss = 0.0;
    auto record = [&](const ModelState& state) {
        const Matrix L = state.W * state.H;
        traj.sample_steps.push_back(state.step);
        traj.times.push_back(state.time);
        traj.mode_factors.push_back(mode_factors(L, f));
        SvdResult svd = numeric_svd(L);
        svd.sigma.resize(m, 0.0);  // pad truncated modes with zeros
        traj.logit_singulars.push_back(std::move(svd.sigma));
        const double loss = weighted_loss(state.W, state.H, Z, w);
        traj.losses.push_back(loss);
        if (state.step == 0) initial_loss = loss;
        if (initial_loss > 0.0 && loss > 10.0 * initial_loss)
            throw NumericalError("loss diverged beyond 10x its initial value", state.step);
        if (observer) observer(state.step, state.W, state.H);
    };

    record(s);
    for (long step = 1; step <= steps; ++step) {
        if (method == Integrator::euler) {
            s = gd_step(s, Z, w, eta);
        } else {
            // Explicit trapezoid: average the gradient at the current state
            // and at the Euler-predicted state.
            const Gradients g1 = weighted_gradients(s.W, s.H, Z, w);
            const Matrix W1 = s.W + eta * g1.GW;
            const Matrix H1 = s.H + eta * g1.GH;
            const Gradients g2 = weighted_gradients(W1, H1, Z, w);
            s.W += (0.5 * eta) * (g1.GW + g2.GW);
            s.H += (0.5 * eta) * (g1.GH + g2.GH);
            s.step = step;
            s.time = step * eta;
            if (!s.W.all_finite() || !s.H.all_finite())
                throw NumericalError("non-finite parameters after gradient step", step);
        }
        if (step % record_every == 0) record(s);
    }
    return traj;
}

std::vector<double> mode_factors(const Matrix& L, const SpectralFactors& f) {
    const int m = static_cast<int>(f.sigma.size());
    if (L.rows() != f.U.rows() || L.cols() != f.V.rows())
        throw ConfigError("mode_factors: logits do not match the factor shapes");
    const Matrix LV = L * f.V;  // k x m
    std::vector<double> factors(m);
    for (int i = 0; i < m; ++i) {
        double dot = 0.0;
        for (int r = 0; r < L.rows(); ++r) dot += f.U(r, i) * LV(r, i);
        factors[i] = dot / f.sigma[i];
    }
    return factors;
}

double theory_factor(double sigma, double lambda, double delta, double t) {
    // 1 / (1 + (sigma e^{2 delta} - 1) e^{-2 sigma lambda t}); saturates to 1
    // for large t because the correction underflows to zero.
    const double coeff = sigma * std::exp(2.0 * delta) - 1.0;
    return 1.0 / (1.0 + coeff * std::exp(-2.0 * sigma * lambda * t));
}

LearningSchedule learning_schedule(const std::vector<double>& sigma,
                                   const std::vector<double>& lambda) {
    if (sigma.empty() || sigma.size() != lambda.size())
        throw ConfigError("learning_schedule requires equal-length positive inputs");
    LearningSchedule sched;
    sched.times.resize(sigma.size());
    for (size_t i = 0; i < sigma.size(); ++i) {
        if (!(sigma[i] > 0.0) || !(lambda[i] > 0.0))
            throw ConfigError("learning_schedule requires positive sigma and lambda");
        sched.times[i] = 1.0 / (sigma[i] * lambda[i]);
    }
    const auto [mn, mx] = std::minmax_element(sched.times.begin(), sched.times.end());
    sched.window = (*mx - *mn) / *mn;
    return sched;
}

double step_limit_factor(double sigma, double lambda, double t_rescaled) {
    if (!(sigma > 0.0) || !(lambda > 0.0))
        throw ConfigError("step_limit_factor requires positive sigma and lambda");
    const double T = 1.0 / (sigma * lambda);
    if (std::fabs(t_rescaled - T) <= 1e-12 * std::max(1.0, T)) return 1.0 / (1.0 + sigma);
    return t_rescaled > T ? 1.0 : 0.0;
}

double weighted_loss(const Matrix& W, const Matrix& H, const SelMatrix& Z, const WeightSpec& w) {
    const Matrix E = Z.entries - W * H;
    double loss = 0.0;
    for (int c = 0; c < E.cols(); ++c) {
        double col = 0.0;
        for (int r = 0; r < E.rows(); ++r) col += E(r, c) * E(r, c);
        loss += w.per_example[c] * col;
    }
    return 0.5 * loss;
}

double diagonal_coupling_residual(const Matrix& L, const SpectralFactors& f) {
    const Matrix M = f.U.transposed() * (L * f.V);
    double off = 0.0;
    for (int i = 0; i < M.rows(); ++i)
        for (int j = 0; j < M.cols(); ++j)
            if (i != j) off += M(i, j) * M(i, j);
    return std::sqrt(off);
}

double off_subspace_residual(const Matrix& L, const SpectralFactors& f) {
    const Matrix left = L - f.U * (f.U.transposed() * L);
    const Matrix right = L - (L * f.V) * f.V.transposed();
    return std::max(left.frobenius_norm(), right.frobenius_norm());
}

}  // namespace ufm
