#include "ufm/reports.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <system_error>

#include "json.hpp"
#include "ufm/errors.hpp"

namespace ufm {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// All CSV numbers go through one formatter so the tables are reproducible
// byte for byte: 17 significant digits round-trips any double exactly.
std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

void ensure_dir(const std::string& out_dir) {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec || !fs::is_directory(out_dir))
        throw IoError("cannot create output directory: " + out_dir);
}

std::ofstream open_out(const std::string& out_dir, const std::string& name) {
    const std::string path = out_dir + "/" + name;
    std::ofstream out(path, std::ios::binary);  // binary: no newline translation
    if (!out) throw IoError("cannot open output file: " + path);
    return out;
}

void finish(std::ofstream& out, const std::string& out_dir, const std::string& name) {
    out.flush();
    if (!out) throw IoError("failed writing output file: " + out_dir + "/" + name);
}

void write_manifest(const RunManifest& manifest, const std::string& out_dir) {
    json doc;
    doc["config_digest"] = manifest.config_digest;
    doc["tool_version"] = manifest.tool_version;
    doc["outputs"] = manifest.outputs;
    auto out = open_out(out_dir, "manifest.json");
    out << doc.dump(2) << "\n";
    finish(out, out_dir, "manifest.json");
}

void write_resolved_config(const ExperimentConfig& cfg, RunManifest& manifest,
                           const std::string& out_dir) {
    auto out = open_out(out_dir, "resolved_config.json");
    out << config_to_json(cfg);
    finish(out, out_dir, "resolved_config.json");
    manifest.outputs.push_back("resolved_config.json");
}

bool wants(const ExperimentConfig& cfg, const std::string& kind) {
    for (const std::string& o : cfg.outputs)
        if (o == kind) return true;
    return false;
}

json schedule_json(const LearningSchedule& sched) {
    return json{{"times", sched.times}, {"window", sched.window}};
}

}  // namespace

RunManifest emit_reports(const ExperimentReport& report, const std::string& out_dir) {
    ensure_dir(out_dir);
    const ExperimentConfig& cfg = report.cfg;
    const int m = static_cast<int>(report.sigma.size());
    RunManifest manifest{config_digest(cfg), kToolVersion, {}};

    if (wants(cfg, "trajectory")) {
        auto out = open_out(out_dir, "trajectory.csv");
        out << "step,time,rescaled_time";
        for (int i = 1; i <= m; ++i) out << ",mode_factor_" << i;
        for (int i = 1; i <= m; ++i) out << ",logit_sigma_" << i;
        out << ",loss";
        for (int i = 1; i <= m; ++i) out << ",theory_factor_" << i;
        out << "\n";
        const Trajectory& tr = report.trajectory;
        for (size_t j = 0; j < tr.sample_steps.size(); ++j) {
            const double t = tr.times[j];
            out << tr.sample_steps[j] << ',' << fmt(t) << ',' << fmt(t / cfg.init.delta);
            for (int i = 0; i < m; ++i) out << ',' << fmt(tr.mode_factors[j][i]);
            for (int i = 0; i < m; ++i) out << ',' << fmt(tr.logit_singulars[j][i]);
            out << ',' << fmt(tr.losses[j]);
            for (int i = 0; i < m; ++i)
                out << ','
                    << fmt(theory_factor(report.sigma[i], report.lambda[i], cfg.init.delta, t));
            out << "\n";
        }
        finish(out, out_dir, "trajectory.csv");
        manifest.outputs.push_back("trajectory.csv");
    }

    if (wants(cfg, "summary")) {
        json doc;
        doc["config"] = json::parse(config_to_json(cfg));
        doc["config_digest"] = manifest.config_digest;
        doc["sigma"] = report.sigma;
        doc["lambda"] = report.lambda;
        doc["schedule"] = schedule_json(report.schedule);
        doc["window"] = report.schedule.window;
        doc["empirical_times"] = report.empirical_times;
        doc["theory_error"] = report.theory_error;
        if (!report.trajectory.logit_singulars.empty()) {
            doc["terminal_logit_sigma"] = report.trajectory.logit_singulars.back();
            doc["final_loss"] = report.trajectory.losses.back();
        }
        auto out = open_out(out_dir, "summary.json");
        out << doc.dump(2, ' ', false, json::error_handler_t::replace) << "\n";
        finish(out, out_dir, "summary.json");
        manifest.outputs.push_back("summary.json");
    }

    if (wants(cfg, "confusion")) {
        const int k = cfg.step_cfg.k;
        auto out = open_out(out_dir, "confusion.csv");
        out << "step,true_class";
        for (int c = 1; c <= k; ++c) out << ",pred_" << c;
        out << "\n";
        for (const auto& [step, cm] : report.confusion_snapshots) {
            for (int r = 0; r < k; ++r) {
                out << step << ',' << (r + 1);
                for (int c = 0; c < k; ++c) out << ',' << cm.at(r, c);
                out << "\n";
            }
        }
        finish(out, out_dir, "confusion.csv");
        manifest.outputs.push_back("confusion.csv");
    }

    write_resolved_config(cfg, manifest, out_dir);
    write_manifest(manifest, out_dir);
    return manifest;
}

RunManifest emit_theory_table(const ExperimentConfig& cfg, const std::string& out_dir) {
    ensure_dir(out_dir);
    RunManifest manifest{config_digest(cfg), kToolVersion, {}};

    const std::vector<double> sigma = step_sigma(cfg.step_cfg.k, cfg.step_cfg.R);
    const std::vector<double> lambda = cfg.weighting == WeightingMode::vanilla
                                           ? std::vector<double>(sigma.size(), 1.0)
                                           : step_lambda(cfg.step_cfg.k, cfg.step_cfg.R, cfg.gamma);
    const int m = static_cast<int>(sigma.size());

    auto out = open_out(out_dir, "theory.csv");
    out << "step,time,rescaled_time";
    for (int i = 1; i <= m; ++i) out << ",theory_factor_" << i;
    out << "\n";
    for (long step = 0; step <= cfg.steps; step += cfg.record_every) {
        const double t = static_cast<double>(step) * cfg.eta;
        out << step << ',' << fmt(t) << ',' << fmt(t / cfg.init.delta);
        for (int i = 0; i < m; ++i)
            out << ',' << fmt(theory_factor(sigma[i], lambda[i], cfg.init.delta, t));
        out << "\n";
    }
    finish(out, out_dir, "theory.csv");
    manifest.outputs.push_back("theory.csv");

    write_resolved_config(cfg, manifest, out_dir);
    write_manifest(manifest, out_dir);
    return manifest;
}

RunManifest emit_sweep_table(int k, double gamma, const std::vector<WindowRow>& rows,
                             const std::string& out_dir) {
    ensure_dir(out_dir);
    // The digest covers the sweep parameters (there is no single run config).
    json params;
    params["k"] = k;
    params["gamma"] = gamma;
    std::vector<double> Rs;
    for (const WindowRow& r : rows) Rs.push_back(r.R);
    params["R_list"] = Rs;
    const std::string text = params.dump();
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char digest[17];
    std::snprintf(digest, sizeof(digest), "%016llx", static_cast<unsigned long long>(h));
    RunManifest manifest{digest, kToolVersion, {}};

    auto out = open_out(out_dir, "sweep.csv");
    out << "R,window_vanilla,window_reweighted\n";
    for (const WindowRow& r : rows)
        out << fmt(r.R) << ',' << fmt(r.vanilla) << ',' << fmt(r.reweighted) << "\n";
    finish(out, out_dir, "sweep.csv");
    manifest.outputs.push_back("sweep.csv");

    write_manifest(manifest, out_dir);
    return manifest;
}

RunManifest emit_compare_inits(const ExperimentConfig& cfg, const CompareInitsReport& rep,
                               const std::string& out_dir) {
    ensure_dir(out_dir);
    RunManifest manifest{config_digest(cfg), kToolVersion, {}};
    const int m = static_cast<int>(rep.schedule.times.size());

    auto out = open_out(out_dir, "compare_inits.csv");
    out << "seed";
    for (int i = 1; i <= m; ++i) out << ",crossing_time_" << i;
    out << ",ordering_matches,maxmin_ratio,diverged\n";
    for (const SeedOutcome& oc : rep.outcomes) {
        out << oc.seed;
        for (int i = 0; i < m; ++i) out << ',' << fmt(oc.crossing_times[i]);
        out << ',' << (oc.ordering_matches ? 1 : 0) << ',' << fmt(oc.maxmin_ratio) << ','
            << (oc.diverged ? 1 : 0) << "\n";
    }
    finish(out, out_dir, "compare_inits.csv");
    manifest.outputs.push_back("compare_inits.csv");

    json doc;
    doc["config"] = json::parse(config_to_json(cfg));
    doc["config_digest"] = manifest.config_digest;
    doc["schedule"] = schedule_json(rep.schedule);
    doc["spectral_times"] = rep.spectral_times;
    auto sum = open_out(out_dir, "compare_inits_summary.json");
    sum << doc.dump(2) << "\n";
    finish(sum, out_dir, "compare_inits_summary.json");
    manifest.outputs.push_back("compare_inits_summary.json");

    write_resolved_config(cfg, manifest, out_dir);
    write_manifest(manifest, out_dir);
    return manifest;
}

}  // namespace ufm
