// ufm — STEP-imbalanced two-factor (UFM) training dynamics toolkit.
//
// Subcommands:
//   spectrum       print the closed-form SVD levels and effective weights
//   simulate       run gradient descent and emit trajectory/summary reports
//   theory         tabulate the closed-form trajectories only
//   sweep          learning-window laws across imbalance ratios
//   compare-inits  random-init runs checked ordinally against spectral init
//
// Exit codes: 0 success, 2 config error, 3 numerical divergence, 4 I/O error.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ufm/config.hpp"
#include "ufm/errors.hpp"
#include "ufm/reports.hpp"

namespace {

struct CommonFlags {
    std::optional<std::string> config_path;
    ufm::ConfigOverrides o;
    std::vector<std::string> outputs_raw;
    CLI::Option* outputs_opt = nullptr;
    std::string out_dir = "ufm_out";

    // Folds flag-only state (the outputs list) into the overrides.
    const ufm::ConfigOverrides& overrides() {
        if (outputs_opt != nullptr && outputs_opt->count() > 0) o.outputs = outputs_raw;
        return o;
    }
};

// Every config key is mirrored as a --kebab-case flag; flags override file
// values (weighting.mode appears as --weighting, init.kind as --init).
void add_common_flags(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--config", f.config_path, "JSON config file");
    cmd->add_option("--k", f.o.k, "class count (even, >= 4)");
    cmd->add_option("--r", f.o.R, "imbalance ratio R (>= 1)");
    cmd->add_option("--n-min", f.o.n_min, "examples per minority class");
    cmd->add_option("--d", f.o.d, "embedding dimension (default 2k)");
    cmd->add_option("--weighting", f.o.weighting, "loss weighting: vanilla | reweighted");
    cmd->add_option("--gamma", f.o.gamma, "reweighting exponent in [0,1] (default 0.5)");
    cmd->add_option("--init", f.o.init_kind, "initialization: spectral | random");
    cmd->add_option("--delta", f.o.delta, "initialization log-scale (default 8)");
    cmd->add_option("--seed", f.o.seed, "random-init seed (UFM_SEED overrides)");
    cmd->add_option("--eta", f.o.eta, "step size (default 0.01/(sigma_max*lambda_max))");
    cmd->add_option("--steps", f.o.steps, "gradient steps (default: 3*T_max*delta horizon)");
    cmd->add_option("--record-every", f.o.record_every, "recording stride (default 1)");
    f.outputs_opt = cmd->add_option("--outputs", f.outputs_raw,
                                    "report kinds: trajectory, summary, confusion")
                        ->delimiter(',');
    cmd->add_option("--out-dir", f.out_dir, "output directory (default ufm_out)");
}

void print_vector(const char* name, const std::vector<double>& v) {
    std::printf("%-18s", name);
    for (double x : v) std::printf(" %12.6f", x);
    std::printf("\n");
}

int run_spectrum(CommonFlags& f) {
    const ufm::ExperimentConfig cfg = ufm::parse_config(f.config_path, f.overrides());
    const ufm::LabelMatrix Y = ufm::build_step_onehot(cfg.step_cfg);
    const ufm::SelMatrix Z = ufm::center_labels(Y);

    ufm::SpectralFactors factors;
    if (cfg.step_cfg.n_min == 1) {
        factors = ufm::closed_form_factors(cfg.step_cfg);
    } else {
        ufm::SvdResult svd = ufm::numeric_svd(Z.entries);
        factors.U = std::move(svd.U);
        factors.sigma = std::move(svd.sigma);
        factors.V = std::move(svd.V);
    }
    const ufm::WeightSpec weights = ufm::step_weights(cfg.step_cfg, cfg.gamma);
    const ufm::EffectiveWeights ew = ufm::effective_weights(factors.V, weights);
    const std::vector<double> ones(factors.sigma.size(), 1.0);
    const ufm::LearningSchedule vanilla = ufm::learning_schedule(factors.sigma, ones);
    const ufm::LearningSchedule reweighted = ufm::learning_schedule(factors.sigma, ew.lambdas);

    std::printf("STEP instance: k=%d R=%g n_min=%d (n=%d), gamma=%g\n", cfg.step_cfg.k,
                cfg.step_cfg.R, cfg.step_cfg.n_min, cfg.step_cfg.total_examples(), cfg.gamma);
    std::printf("factorization residual: %.3e\n", ufm::verify_factorization(Z, factors));
    print_vector("sigma", factors.sigma);
    print_vector("lambda", ew.lambdas);
    print_vector("T (vanilla)", vanilla.times);
    print_vector("T (reweighted)", reweighted.times);
    std::printf("%-18s %12.6f\n", "window vanilla", vanilla.window);
    std::printf("%-18s %12.6f\n", "window reweighted", reweighted.window);
    return 0;
}

int run_simulate(CommonFlags& f) {
    const ufm::ExperimentConfig cfg = ufm::parse_config(f.config_path, f.overrides());
    const ufm::ExperimentReport report = ufm::run_experiment(cfg);
    const ufm::RunManifest manifest = ufm::emit_reports(report, f.out_dir);
    std::printf("wrote %zu files to %s (config %s)\n", manifest.outputs.size() + 1,
                f.out_dir.c_str(), manifest.config_digest.c_str());
    return 0;
}

int run_theory(CommonFlags& f) {
    const ufm::ExperimentConfig cfg = ufm::parse_config(f.config_path, f.overrides());
    const ufm::RunManifest manifest = ufm::emit_theory_table(cfg, f.out_dir);
    std::printf("wrote %zu files to %s (config %s)\n", manifest.outputs.size() + 1,
                f.out_dir.c_str(), manifest.config_digest.c_str());
    return 0;
}

int run_sweep(int k, double gamma, const std::vector<double>& r_list,
              const std::string& out_dir) {
    const std::vector<ufm::WindowRow> rows = ufm::sweep_window(k, r_list, gamma);
    const ufm::RunManifest manifest = ufm::emit_sweep_table(k, gamma, rows, out_dir);
    std::printf("wrote %zu files to %s (params %s)\n", manifest.outputs.size() + 1,
                out_dir.c_str(), manifest.config_digest.c_str());
    return 0;
}

int run_compare_inits(CommonFlags& f, const std::vector<std::uint64_t>& seeds) {
    const ufm::ExperimentConfig cfg = ufm::parse_config(f.config_path, f.overrides());
    const ufm::CompareInitsReport rep = ufm::compare_inits(cfg, seeds);
    const ufm::RunManifest manifest = ufm::emit_compare_inits(cfg, rep, f.out_dir);
    std::printf("wrote %zu files to %s (config %s)\n", manifest.outputs.size() + 1,
                f.out_dir.c_str(), manifest.config_digest.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"STEP-imbalanced UFM training dynamics"};
    app.require_subcommand(1);

    CommonFlags spectrum_f, simulate_f, theory_f, compare_f;
    CLI::App* spectrum = app.add_subcommand("spectrum", "closed-form factors and weights");
    add_common_flags(spectrum, spectrum_f);
    CLI::App* simulate = app.add_subcommand("simulate", "run gradient descent, emit reports");
    add_common_flags(simulate, simulate_f);
    CLI::App* theory = app.add_subcommand("theory", "closed-form trajectories only");
    add_common_flags(theory, theory_f);

    int sweep_k = 4;
    double sweep_gamma = 0.5;
    std::vector<double> sweep_r = {1, 2, 5, 10, 20, 50, 100};
    std::string sweep_out = "ufm_out";
    CLI::App* sweep = app.add_subcommand("sweep", "learning windows vs imbalance ratio");
    sweep->add_option("--k", sweep_k, "class count");
    sweep->add_option("--gamma", sweep_gamma, "reweighting exponent");
    sweep->add_option("--r-list", sweep_r, "imbalance ratios")->delimiter(',');
    sweep->add_option("--out-dir", sweep_out, "output directory");

    std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
    CLI::App* compare = app.add_subcommand("compare-inits", "random vs spectral initialization");
    add_common_flags(compare, compare_f);
    compare->add_option("--seeds", seeds, "random seeds")->delimiter(',');

    try {
        app.parse(argc, argv);
        if (spectrum->parsed()) return run_spectrum(spectrum_f);
        if (simulate->parsed()) return run_simulate(simulate_f);
        if (theory->parsed()) return run_theory(theory_f);
        if (sweep->parsed()) return run_sweep(sweep_k, sweep_gamma, sweep_r, sweep_out);
        if (compare->parsed()) return run_compare_inits(compare_f, seeds);
        return 2;
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);  // prints the usage error
        return 2;
    } catch (const ufm::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const ufm::NumericalError& e) {
        std::fprintf(stderr, "numerical error: %s\n", e.what());
        return 3;
    } catch (const ufm::IoError& e) {
        std::fprintf(stderr, "i/o error: %s\n", e.what());
        return 4;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 4;
    }
}
