#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "doctest.h"
#include "ufm/errors.hpp"
#include "ufm/experiments.hpp"

using namespace ufm;

namespace {

ExperimentConfig base_config(int k, double R, WeightingMode mode) {
    ExperimentConfig cfg;
    cfg.step_cfg.k = k;
    cfg.step_cfg.R = R;
    cfg.step_cfg.n_min = 1;
    cfg.step_cfg.d = 2 * k;
    cfg.weighting = mode;
    return cfg;
}

}  // namespace

TEST_CASE("confusion assigns argmax predictions with ties to the smaller class") {
    const StepConfig scfg = [] {
        StepConfig c;
        c.k = 4;
        c.R = 10.0;
        c.d = 8;
        return c;
    }();
    const LabelMatrix Y = build_step_onehot(scfg);
    const SelMatrix Z = center_labels(Y);

    SUBCASE("perfect logits give a diagonal confusion with the class sizes") {
        const ConfusionMatrix cm = confusion_from_logits(Z.entries, Y);
        for (int r = 0; r < 4; ++r)
            for (int c = 0; c < 4; ++c)
                CHECK(cm.at(r, c) == (r == c ? Y.class_sizes[r] : 0));
    }

    SUBCASE("zero logits dump every example on the first class") {
        const ConfusionMatrix cm = confusion_from_logits(Matrix(4, 22), Y);
        for (int r = 0; r < 4; ++r) {
            CHECK(cm.at(r, 0) == Y.class_sizes[r]);
            for (int c = 1; c < 4; ++c) CHECK(cm.at(r, c) == 0);
        }
    }

    SUBCASE("dropping the slow modes confuses exactly the minority classes") {
        // Keep only the two fastest spectral modes: majorities resolve, both
        // minority classes collapse onto the first minority class.
        const SpectralFactors f = closed_form_factors(scfg);
        std::vector<double> partial = f.sigma;
        partial[2] = 0.0;
        const Matrix L = scale_columns(f.U, partial) * f.V.transposed();
        const ConfusionMatrix cm = confusion_from_logits(L, Y);
        CHECK(cm.at(0, 0) == 10);
        CHECK(cm.at(1, 1) == 10);
        CHECK(cm.at(2, 2) == 1);
        CHECK(cm.at(3, 2) == 1);
        CHECK(cm.at(3, 3) == 0);
    }

    SUBCASE("shape mismatch is rejected") {
        CHECK_THROWS_AS(confusion_from_logits(Matrix(4, 5), Y), ConfigError);
    }
}

TEST_CASE("config resolution fills the documented step-size and horizon defaults") {
    SUBCASE("unweighted reference instance") {
        const ExperimentConfig cfg = resolve_config(base_config(4, 10.0, WeightingMode::vanilla));
        CHECK(cfg.eta == doctest::Approx(0.01 / std::sqrt(10.0)).epsilon(1e-15));
        CHECK(cfg.steps == 7590);
    }

    SUBCASE("reweighted reference instance") {
        const ExperimentConfig cfg =
            resolve_config(base_config(4, 10.0, WeightingMode::reweighted));
        CHECK(cfg.eta == doctest::Approx(0.01 / std::sqrt(11.0)).epsilon(1e-15));
        // Slowest reweighted rate is the middle mode's (sqrt(10)+1)/sqrt(2).
        const double t_max = std::sqrt(2.0) / (std::sqrt(10.0) + 1.0);
        CHECK(cfg.steps == static_cast<long>(std::ceil(3.0 * t_max * 8.0 / cfg.eta)));
        CHECK(cfg.steps == 2705);
    }

    SUBCASE("explicit values are kept") {
        ExperimentConfig cfg = base_config(4, 10.0, WeightingMode::vanilla);
        cfg.eta = 1e-3;
        cfg.steps = 50000;
        const ExperimentConfig out = resolve_config(cfg);
        CHECK(out.eta == 1e-3);
        CHECK(out.steps == 50000);
    }
}

TEST_CASE("config validation demands a horizon long enough to saturate every mode") {
    ExperimentConfig cfg = resolve_config(base_config(4, 10.0, WeightingMode::vanilla));
    CHECK_NOTHROW(validate_experiment_config(cfg));
    cfg.steps = 100;  // far below 3 * T_max * delta / eta
    bool threw = false;
    try {
        validate_experiment_config(cfg);
    } catch (const ConfigError& e) {
        threw = true;
        CHECK(std::string(e.what()).find("must span") != std::string::npos);
    }
    CHECK(threw);
}

TEST_CASE("crossing times interpolate linearly between recorded samples") {
    Trajectory traj;
    traj.sample_steps = {0, 1, 2};
    traj.times = {0.0, 1.0, 2.0};
    traj.mode_factors = {{0.0, 0.9}, {0.5, 0.95}, {1.0, 1.0}};
    traj.logit_singulars = {{0, 0}, {0, 0}, {0, 0}};
    traj.losses = {1.0, 0.5, 0.0};

    const double sigma = std::sqrt(10.0);
    const std::vector<double> times = crossing_times(traj, {sigma, sigma}, 8.0);

    // Mode 1 rises 0 -> 0.5 over [0,1]: crosses 1/(1+sigma) at t = 2/(1+sigma).
    const double threshold = 1.0 / (1.0 + sigma);
    CHECK(times[0] == doctest::Approx(2.0 * threshold / 8.0).epsilon(1e-12));
    // Mode 2 starts above the threshold: crossing is the first sample.
    CHECK(times[1] == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("crossing times report NaN for modes that never reach the threshold") {
    Trajectory traj;
    traj.sample_steps = {0, 1};
    traj.times = {0.0, 1.0};
    traj.mode_factors = {{0.0}, {0.1}};
    traj.logit_singulars = {{0}, {0}};
    traj.losses = {1.0, 0.9};
    const std::vector<double> times = crossing_times(traj, {std::sqrt(10.0)}, 8.0);
    CHECK(std::isnan(times[0]));
}

TEST_CASE("unweighted experiment learns modes at the spectrum-ordered times") {
    ExperimentConfig cfg = base_config(4, 10.0, WeightingMode::vanilla);
    cfg.record_every = 5;
    const ExperimentReport rep = run_experiment(cfg);

    REQUIRE(rep.empirical_times.size() == 3);
    const std::vector<double> expect = {1.0 / std::sqrt(10.0), std::sqrt(2.0 / 11.0), 1.0};
    for (int i = 0; i < 3; ++i) {
        CHECK(std::isfinite(rep.empirical_times[i]));
        CHECK(std::fabs(rep.empirical_times[i] - expect[i]) <= 0.05 * expect[i]);
    }
    CHECK(rep.empirical_times[0] < rep.empirical_times[1]);
    CHECK(rep.empirical_times[1] < rep.empirical_times[2]);

    // The simulation tracks the closed form uniformly.
    for (double err : rep.theory_error) CHECK(err <= 1e-3);

    // Schedule carries the closed-form times for the same modes.
    for (int i = 0; i < 3; ++i)
        CHECK(rep.schedule.times[i] == doctest::Approx(expect[i]).epsilon(1e-12));
}

TEST_CASE("reweighted experiment learns both outer levels simultaneously") {
    ExperimentConfig cfg = base_config(4, 10.0, WeightingMode::reweighted);
    cfg.record_every = 2;
    const ExperimentReport rep = run_experiment(cfg);

    const double t_outer = 1.0 / std::sqrt(11.0);
    CHECK(std::fabs(rep.empirical_times[0] - t_outer) <= 0.05 * t_outer);
    CHECK(std::fabs(rep.empirical_times[2] - t_outer) <= 0.05 * t_outer);
    // Majority and minority levels cross within 1% of each other.
    CHECK(std::fabs(rep.empirical_times[0] - rep.empirical_times[2]) <=
          0.01 * rep.empirical_times[0]);

    // Outer modes track their closed forms; the middle mode detaches (its
    // coupling to an off-subspace component speeds it up measurably).
    CHECK(rep.theory_error[0] <= 1e-3);
    CHECK(rep.theory_error[2] <= 1e-3);
    CHECK(rep.theory_error[1] > 0.1);
}

TEST_CASE("balanced instances learn every mode at the same time") {
    ExperimentConfig cfg = base_config(4, 1.0, WeightingMode::vanilla);
    cfg.record_every = 2;
    const ExperimentReport rep = run_experiment(cfg);
    for (int i = 0; i < 3; ++i)
        CHECK(std::fabs(rep.empirical_times[i] - 1.0) <= 0.01);
}

TEST_CASE("experiment reports are deterministic across runs") {
    ExperimentConfig cfg = base_config(4, 10.0, WeightingMode::reweighted);
    cfg.record_every = 50;
    const ExperimentReport a = run_experiment(cfg);
    const ExperimentReport b = run_experiment(cfg);
    CHECK(a.trajectory.mode_factors == b.trajectory.mode_factors);
    CHECK(a.trajectory.logit_singulars == b.trajectory.logit_singulars);
    CHECK(a.trajectory.losses == b.trajectory.losses);
    CHECK(a.empirical_times == b.empirical_times);
}

TEST_CASE("zero-exponent reweighting reproduces the unweighted run bit for bit") {
    ExperimentConfig vanilla = base_config(4, 10.0, WeightingMode::vanilla);
    vanilla.record_every = 25;
    ExperimentConfig rw = base_config(4, 10.0, WeightingMode::reweighted);
    rw.gamma = 0.0;
    rw.record_every = 25;

    const ExperimentReport a = run_experiment(vanilla);
    const ExperimentReport b = run_experiment(rw);
    CHECK(a.cfg.eta == b.cfg.eta);
    CHECK(a.cfg.steps == b.cfg.steps);
    CHECK(a.trajectory.mode_factors == b.trajectory.mode_factors);
    CHECK(a.trajectory.losses == b.trajectory.losses);
}

TEST_CASE("window sweep tabulates both laws across ratios") {
    const std::vector<double> Rs = {1.0, 2.0, 5.0, 10.0, 100.0};
    const std::vector<WindowRow> rows = sweep_window(4, Rs, 0.5);
    REQUIRE(rows.size() == 5);
    for (size_t i = 0; i < Rs.size(); ++i) {
        const double R = Rs[i];
        CHECK(rows[i].R == R);
        CHECK(rows[i].vanilla == doctest::Approx(std::sqrt(R) - 1.0).epsilon(1e-12));
        const double expect =
            std::sqrt(2.0) * std::sqrt(R + 1.0) / (std::sqrt(R) + 1.0) - 1.0;
        CHECK(rows[i].reweighted == doctest::Approx(expect).epsilon(1e-9));
        CHECK(rows[i].reweighted <= std::sqrt(2.0) - 1.0 + 1e-12);
    }
    // Balanced classes leave nothing to reweight.
    CHECK(rows[0].reweighted == doctest::Approx(0.0).epsilon(1e-12));
    CHECK_THROWS_AS(sweep_window(4, Rs, 1.5), ConfigError);
}

TEST_CASE("random initializations reproduce the unweighted spectral ordering") {
    ExperimentConfig cfg = base_config(4, 10.0, WeightingMode::vanilla);
    cfg.record_every = 5;
    const CompareInitsReport rep = compare_inits(cfg, {1, 2, 3});

    REQUIRE(rep.outcomes.size() == 3);
    for (const SeedOutcome& oc : rep.outcomes) {
        CHECK_FALSE(oc.diverged);
        CHECK(oc.ordering_matches);
        CHECK(oc.maxmin_ratio > std::sqrt(10.0) * 0.5);  // window stays wide
    }
    // The spectral reference reproduces its own schedule ordering.
    for (int i = 0; i < 3; ++i) CHECK(std::isfinite(rep.spectral_times[i]));
    CHECK(rep.spectral_times[0] < rep.spectral_times[2]);

    CHECK_THROWS_AS(compare_inits(cfg, {}), ConfigError);
}

TEST_CASE("random initializations keep the reweighted window narrow") {
    ExperimentConfig cfg = base_config(4, 10.0, WeightingMode::reweighted);
    cfg.record_every = 2;
    const CompareInitsReport rep = compare_inits(cfg, {1, 2});
    for (const SeedOutcome& oc : rep.outcomes) {
        CHECK_FALSE(oc.diverged);
        CHECK(oc.maxmin_ratio <= 1.3);
    }
}

TEST_CASE("sustained diagonality scans snapshots from the end") {
    const std::vector<int> sizes = {2, 2, 1, 1};
    auto diag = [&](bool majorities, bool minorities) {
        ConfusionMatrix cm(4);
        cm.at(0, 0) = majorities ? 2 : 0;
        cm.at(0, 1) = majorities ? 0 : 2;
        cm.at(1, 1) = 2;
        cm.at(2, 2) = minorities ? 1 : 0;
        cm.at(2, 3) = minorities ? 0 : 1;
        cm.at(3, 3) = 1;
        return cm;
    };

    std::vector<std::pair<long, ConfusionMatrix>> snaps;
    snaps.emplace_back(0, diag(false, false));
    snaps.emplace_back(10, diag(true, false));   // majorities flicker in...
    snaps.emplace_back(20, diag(false, false));  // ...and out again
    snaps.emplace_back(30, diag(true, false));
    snaps.emplace_back(40, diag(true, true));

    // Majorities are sustained only from step 30; the flicker at 10 is ignored.
    CHECK(first_sustained_diagonal_step(snaps, 0, 2, sizes) == 30);
    // Minorities only resolve at the last snapshot.
    CHECK(first_sustained_diagonal_step(snaps, 2, 4, sizes) == 40);
    // The full diagonal also holds only at the end.
    CHECK(first_sustained_diagonal_step(snaps, 0, 4, sizes) == 40);

    snaps.emplace_back(50, diag(true, false));  // minorities regress at the end
    CHECK(first_sustained_diagonal_step(snaps, 2, 4, sizes) == -1);
}
