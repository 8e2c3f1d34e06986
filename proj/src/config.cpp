#include "ufm/config.hpp"

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "ufm/errors.hpp"

namespace ufm {

using nlohmann::json;

namespace {

const std::set<std::string> kTopKeys = {"k",    "R",    "n_min", "d",           "weighting",
                                        "init", "eta",  "steps", "record_every", "outputs"};
const std::set<std::string> kWeightingKeys = {"mode", "gamma"};
const std::set<std::string> kInitKeys = {"kind", "delta", "seed"};
const std::set<std::string> kOutputKinds = {"trajectory", "summary", "confusion"};

void reject_unknown(const json& obj, const std::set<std::string>& allowed,
                    const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!allowed.count(it.key()))
            throw ConfigError("unknown config key \"" + it.key() + "\" in " + where);
}

template <typename T>
T get_number(const json& obj, const std::string& key) {
    if (!obj.at(key).is_number())
        throw ConfigError("config key \"" + key + "\" must be a number");
    return obj.at(key).get<T>();
}

WeightingMode parse_weighting(const std::string& s) {
    if (s == "vanilla") return WeightingMode::vanilla;
    if (s == "reweighted") return WeightingMode::reweighted;
    throw ConfigError("weighting.mode must be \"vanilla\" or \"reweighted\", got \"" + s + "\"");
}

InitKind parse_init_kind(const std::string& s) {
    if (s == "spectral") return InitKind::spectral;
    if (s == "random") return InitKind::random;
    throw ConfigError("init.kind must be \"spectral\" or \"random\", got \"" + s + "\"");
}

void check_outputs(const std::vector<std::string>& outputs) {
    for (const std::string& o : outputs)
        if (!kOutputKinds.count(o))
            throw ConfigError("unknown output kind \"" + o +
                              "\" (expected trajectory, summary, or confusion)");
}

}  // namespace

const char* weighting_name(WeightingMode mode) {
    return mode == WeightingMode::vanilla ? "vanilla" : "reweighted";
}

const char* init_kind_name(InitKind kind) {
    return kind == InitKind::spectral ? "spectral" : "random";
}

ExperimentConfig parse_config(const std::optional<std::string>& config_path,
                              const ConfigOverrides& o) {
    ExperimentConfig cfg;
    cfg.step_cfg = StepConfig{};
    cfg.step_cfg.d = 0;  // resolved to 2k below unless given
    bool have_k = false, have_R = false;

    if (config_path) {
        std::ifstream in(*config_path);
        if (!in) throw IoError("cannot open config file: " + *config_path);
        json doc;
        try {
            doc = json::parse(in);
        } catch (const json::parse_error& e) {
            throw ConfigError("config file is not valid JSON: " + std::string(e.what()));
        }
        if (!doc.is_object()) throw ConfigError("config file must contain a JSON object");
        reject_unknown(doc, kTopKeys, "config");

        if (doc.contains("k")) {
            cfg.step_cfg.k = get_number<int>(doc, "k");
            have_k = true;
        }
        if (doc.contains("R")) {
            cfg.step_cfg.R = get_number<double>(doc, "R");
            have_R = true;
        }
        if (doc.contains("n_min")) cfg.step_cfg.n_min = get_number<int>(doc, "n_min");
        if (doc.contains("d")) cfg.step_cfg.d = get_number<int>(doc, "d");
        if (doc.contains("weighting")) {
            const json& wobj = doc.at("weighting");
            if (!wobj.is_object()) throw ConfigError("weighting must be an object");
            reject_unknown(wobj, kWeightingKeys, "weighting");
            if (wobj.contains("mode")) cfg.weighting = parse_weighting(wobj.at("mode"));
            if (wobj.contains("gamma")) cfg.gamma = get_number<double>(wobj, "gamma");
        }
        if (doc.contains("init")) {
            const json& iobj = doc.at("init");
            if (!iobj.is_object()) throw ConfigError("init must be an object");
            reject_unknown(iobj, kInitKeys, "init");
            if (iobj.contains("kind")) cfg.init.kind = parse_init_kind(iobj.at("kind"));
            if (iobj.contains("delta")) cfg.init.delta = get_number<double>(iobj, "delta");
            if (iobj.contains("seed")) cfg.init.seed = get_number<std::uint64_t>(iobj, "seed");
        }
        if (doc.contains("eta")) cfg.eta = get_number<double>(doc, "eta");
        if (doc.contains("steps")) cfg.steps = get_number<long>(doc, "steps");
        if (doc.contains("record_every")) cfg.record_every = get_number<long>(doc, "record_every");
        if (doc.contains("outputs")) {
            if (!doc.at("outputs").is_array()) throw ConfigError("outputs must be an array");
            cfg.outputs = doc.at("outputs").get<std::vector<std::string>>();
        }
    }

    // Flags override file values.
    if (o.k) {
        cfg.step_cfg.k = *o.k;
        have_k = true;
    }
    if (o.R) {
        cfg.step_cfg.R = *o.R;
        have_R = true;
    }
    if (o.n_min) cfg.step_cfg.n_min = *o.n_min;
    if (o.d) cfg.step_cfg.d = *o.d;
    if (o.weighting) cfg.weighting = parse_weighting(*o.weighting);
    if (o.gamma) cfg.gamma = *o.gamma;
    if (o.init_kind) cfg.init.kind = parse_init_kind(*o.init_kind);
    if (o.delta) cfg.init.delta = *o.delta;
    if (o.seed) cfg.init.seed = *o.seed;
    if (o.eta) cfg.eta = *o.eta;
    if (o.steps) cfg.steps = *o.steps;
    if (o.record_every) cfg.record_every = *o.record_every;
    if (o.outputs) cfg.outputs = *o.outputs;

    if (!have_k || !have_R) throw ConfigError("config requires at least k and R");

    // Environment beats everything for the seed.
    if (const char* env = std::getenv("UFM_SEED")) {
        char* end = nullptr;
        const unsigned long long v = std::strtoull(env, &end, 10);
        if (end == env || *end != '\0')
            throw ConfigError("UFM_SEED must be a nonnegative integer, got \"" +
                              std::string(env) + "\"");
        cfg.init.seed = static_cast<std::uint64_t>(v);
    }

    if (cfg.step_cfg.d == 0) cfg.step_cfg.d = 2 * cfg.step_cfg.k;
    check_outputs(cfg.outputs);

    cfg = resolve_config(std::move(cfg));

    // Surface invariant violations (including the run-length requirement) now,
    // with the violated invariant's name, rather than at run time.
    validate_experiment_config(cfg);
    return cfg;
}

std::string config_to_json(const ExperimentConfig& cfg) {
    json doc;
    doc["k"] = cfg.step_cfg.k;
    doc["R"] = cfg.step_cfg.R;
    doc["n_min"] = cfg.step_cfg.n_min;
    doc["d"] = cfg.step_cfg.d;
    doc["weighting"] = {{"mode", weighting_name(cfg.weighting)}, {"gamma", cfg.gamma}};
    doc["init"] = {{"kind", init_kind_name(cfg.init.kind)},
                   {"delta", cfg.init.delta},
                   {"seed", cfg.init.seed}};
    doc["eta"] = cfg.eta;
    doc["steps"] = cfg.steps;
    doc["record_every"] = cfg.record_every;
    doc["outputs"] = cfg.outputs;
    return doc.dump(2) + "\n";
}

std::string config_digest(const ExperimentConfig& cfg) {
    const std::string text = config_to_json(cfg);
    std::uint64_t h = 1469598103934665603ull;  // FNV-1a 64
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    std::ostringstream os;
    os << std::hex;
    os.width(16);
    os.fill('0');
    os << h;
    return os.str();
}

}  // namespace ufm
