#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ufm/dynamics.hpp"
#include "ufm/matrix.hpp"
#include "ufm/reweight.hpp"
#include "ufm/sel.hpp"
#include "ufm/spectral.hpp"

namespace ufm {

enum class WeightingMode { vanilla, reweighted };

// A fully described run. eta <= 0 or steps <= 0 select the documented
// defaults (eta = 0.01/(sigma_max * lambda_max); steps = ceil(3 * T_max *
// delta / eta), the smallest horizon on which every mode saturates).
struct ExperimentConfig {
    StepConfig step_cfg;
    WeightingMode weighting = WeightingMode::vanilla;
    double gamma = 0.5;  // used when weighting == reweighted
    InitSpec init;
    double eta = 0.0;
    long steps = 0;
    long record_every = 1;
    std::vector<std::string> outputs = {"trajectory", "summary"};
    Integrator method = Integrator::heun;
};

// Row = true class, column = predicted class.
struct ConfusionMatrix {
    int k = 0;
    std::vector<long> counts;  // k*k, row-major

    ConfusionMatrix() = default;
    explicit ConfusionMatrix(int k_) : k(k_), counts(static_cast<size_t>(k_) * k_, 0) {}
    long& at(int r, int c) { return counts[static_cast<size_t>(r) * k + c]; }
    long at(int r, int c) const { return counts[static_cast<size_t>(r) * k + c]; }
};

struct ExperimentReport {
    ExperimentConfig cfg;  // resolved (defaults filled in)
    std::vector<double> sigma;
    std::vector<double> lambda;
    LearningSchedule schedule;
    Trajectory trajectory;
    // First interpolated time, in rescaled units t/delta, at which each mode
    // factor reaches 1/(1+sigma_i) — the value the limiting step trajectory
    // takes exactly at T_i. NaN when a mode never crosses.
    std::vector<double> empirical_times;
    std::vector<double> theory_error;  // per mode, max |simulated - closed form|
    std::vector<std::pair<long, ConfusionMatrix>> confusion_snapshots;
};

// argmax prediction per column, ties broken toward the smallest class index.
ConfusionMatrix confusion_from_logits(const Matrix& L, const LabelMatrix& Y);

// Build the instance, run the simulation, and assemble times/errors/snapshots.
ExperimentReport run_experiment(const ExperimentConfig& cfg);

// Resolve eta/steps defaults against the instance's spectrum without running.
ExperimentConfig resolve_config(ExperimentConfig cfg);

// Full invariant check of a resolved config (including the requirement that
// steps*eta spans 3*T_max*delta so every mode saturates). Throws ConfigError
// naming the violated invariant.
void validate_experiment_config(const ExperimentConfig& cfg);

// Theory learning windows per imbalance ratio.
struct WindowRow {
    double R = 1.0;
    double vanilla = 0.0;
    double reweighted = 0.0;
};
std::vector<WindowRow> sweep_window(int k, const std::vector<double>& R_list, double gamma);

// Random-init runs compared ordinally against the spectral-init schedule.
struct SeedOutcome {
    std::uint64_t seed = 0;
    bool diverged = false;
    std::vector<double> crossing_times;  // rescaled; NaN if never crossed
    bool ordering_matches = false;       // level-wise order agrees with theory
    double maxmin_ratio = 0.0;           // max/min crossing time across modes
};
struct CompareInitsReport {
    std::vector<double> spectral_times;  // reference crossing times
    LearningSchedule schedule;
    std::vector<SeedOutcome> outcomes;
};
CompareInitsReport compare_inits(const ExperimentConfig& cfg,
                                 const std::vector<std::uint64_t>& seeds);

// Crossing times (rescaled by delta) of threshold 1/(1+sigma_i) per mode,
// linearly interpolated between recorded steps; NaN when never crossed.
std::vector<double> crossing_times(const Trajectory& traj, const std::vector<double>& sigma,
                                   double delta);

// First recorded step from which every class in [class_begin, class_end) is
// predicted entirely within its own class at this and all later snapshots;
// -1 if that never happens. "Sustained" guards against accidental diagonality
// of near-zero random logits.
long first_sustained_diagonal_step(const std::vector<std::pair<long, ConfusionMatrix>>& snapshots,
                                   int class_begin, int class_end,
                                   const std::vector<int>& class_sizes);

}  // namespace ufm
