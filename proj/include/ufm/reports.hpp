#pragma once

#include <string>
#include <vector>

#include "ufm/config.hpp"
#include "ufm/experiments.hpp"

namespace ufm {

// What a run left on disk: a content hash of the resolved config (stable
// across reruns of the same config), the tool version, and the emitted files
// (paths relative to the output directory).
struct RunManifest {
    std::string config_digest;
    std::string tool_version;
    std::vector<std::string> outputs;
};

inline constexpr const char* kToolVersion = "0.1.0";

// Write the report's artifacts under out_dir according to cfg.outputs:
//   trajectory.csv  one row per recorded step:
//                   step,time,rescaled_time,mode_factor_1..m,logit_sigma_1..m,
//                   loss,theory_factor_1..m   (m = k-1)
//   summary.json    schedule, empirical times, window, theory errors, ...
//   confusion.csv   recorded confusion matrices as integer grids
// plus always resolved_config.json and manifest.json. Numbers in CSV files
// are printed with 17 significant digits; rerunning an identical resolved
// config reproduces every table byte for byte.
RunManifest emit_reports(const ExperimentReport& report, const std::string& out_dir);

// Table for the closed-form trajectories alone (no simulation):
//   theory.csv  step,time,rescaled_time,theory_factor_1..m
RunManifest emit_theory_table(const ExperimentConfig& resolved, const std::string& out_dir);

// Table of learning windows per imbalance ratio:
//   sweep.csv  R,window_vanilla,window_reweighted
RunManifest emit_sweep_table(int k, double gamma, const std::vector<WindowRow>& rows,
                             const std::string& out_dir);

// Per-seed ordinal comparison of random vs spectral initialization:
//   compare_inits.csv  seed,crossing_time_1..m,ordering_matches,maxmin_ratio,diverged
RunManifest emit_compare_inits(const ExperimentConfig& resolved, const CompareInitsReport& rep,
                               const std::string& out_dir);

}  // namespace ufm
