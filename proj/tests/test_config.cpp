#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"
#include "ufm/config.hpp"
#include "ufm/errors.hpp"

using namespace ufm;
namespace fs = std::filesystem;

namespace {

// Each test writes its config to a unique temp file and removes it afterward.
struct TempFile {
    fs::path path;
    explicit TempFile(const std::string& name, const std::string& text)
        : path(fs::temp_directory_path() / name) {
        std::ofstream out(path);
        out << text;
    }
    ~TempFile() { fs::remove(path); }
    std::string str() const { return path.string(); }
};

// The seed environment override must not leak between tests.
struct SeedEnvGuard {
    explicit SeedEnvGuard(const char* value) {
        if (value)
            setenv("UFM_SEED", value, 1);
        else
            unsetenv("UFM_SEED");
    }
    ~SeedEnvGuard() { unsetenv("UFM_SEED"); }
};

ConfigOverrides kr(int k, double R) {
    ConfigOverrides o;
    o.k = k;
    o.R = R;
    return o;
}

}  // namespace

TEST_CASE("flag-only configs resolve every default") {
    SeedEnvGuard env(nullptr);
    const ExperimentConfig cfg = parse_config(std::nullopt, kr(4, 10.0));

    CHECK(cfg.step_cfg.k == 4);
    CHECK(cfg.step_cfg.R == 10.0);
    CHECK(cfg.step_cfg.n_min == 1);
    CHECK(cfg.step_cfg.d == 8);  // 2k unless given
    CHECK(cfg.weighting == WeightingMode::vanilla);
    CHECK(cfg.gamma == 0.5);
    CHECK(cfg.init.kind == InitKind::spectral);
    CHECK(cfg.init.delta == 8.0);
    CHECK(cfg.init.seed == 1);
    CHECK(cfg.eta == doctest::Approx(0.01 / std::sqrt(10.0)).epsilon(1e-15));
    CHECK(cfg.steps == 7590);
    CHECK(cfg.record_every == 1);
    CHECK(cfg.outputs == std::vector<std::string>{"trajectory", "summary"});
}

TEST_CASE("the instance shape is mandatory") {
    SeedEnvGuard env(nullptr);
    ConfigOverrides only_k;
    only_k.k = 4;
    CHECK_THROWS_WITH_AS(parse_config(std::nullopt, only_k), "config requires at least k and R",
                         ConfigError);
    CHECK_THROWS_WITH_AS(parse_config(std::nullopt, ConfigOverrides{}),
                         "config requires at least k and R", ConfigError);
}

TEST_CASE("config files populate every field and flags take precedence") {
    SeedEnvGuard env(nullptr);
    const TempFile file("ufm_cfg_full.json", R"({
        "k": 4, "R": 2, "n_min": 1, "d": 9,
        "weighting": {"mode": "reweighted", "gamma": 0.25},
        "init": {"kind": "random", "delta": 4.0, "seed": 9},
        "eta": 0.001, "steps": 90000, "record_every": 3,
        "outputs": ["trajectory", "confusion"]
    })");

    const ExperimentConfig cfg = parse_config(file.str(), ConfigOverrides{});
    CHECK(cfg.step_cfg.R == 2.0);
    CHECK(cfg.step_cfg.d == 9);
    CHECK(cfg.weighting == WeightingMode::reweighted);
    CHECK(cfg.gamma == 0.25);
    CHECK(cfg.init.kind == InitKind::random);
    CHECK(cfg.init.delta == 4.0);
    CHECK(cfg.init.seed == 9);
    CHECK(cfg.eta == 0.001);
    CHECK(cfg.steps == 90000);
    CHECK(cfg.record_every == 3);
    CHECK(cfg.outputs == std::vector<std::string>{"trajectory", "confusion"});

    ConfigOverrides o;
    o.R = 10.0;
    o.eta = 0.0005;
    o.steps = 200000;
    const ExperimentConfig over = parse_config(file.str(), o);
    CHECK(over.step_cfg.R == 10.0);
    CHECK(over.eta == 0.0005);
    CHECK(over.steps == 200000);
    CHECK(over.gamma == 0.25);  // untouched file value survives
}

TEST_CASE("malformed configs are rejected with the offending detail") {
    SeedEnvGuard env(nullptr);

    SUBCASE("unknown top-level key") {
        const TempFile file("ufm_cfg_unknown.json", R"({"k": 4, "R": 10, "bogus": 1})");
        bool threw = false;
        try {
            parse_config(file.str(), ConfigOverrides{});
        } catch (const ConfigError& e) {
            threw = true;
            CHECK(std::string(e.what()).find("bogus") != std::string::npos);
        }
        CHECK(threw);
    }

    SUBCASE("unknown nested key") {
        const TempFile file("ufm_cfg_nested.json",
                            R"({"k": 4, "R": 10, "init": {"seeds": 1}})");
        CHECK_THROWS_AS(parse_config(file.str(), ConfigOverrides{}), ConfigError);
    }

    SUBCASE("invalid JSON") {
        const TempFile file("ufm_cfg_broken.json", "{\"k\": 4,");
        bool threw = false;
        try {
            parse_config(file.str(), ConfigOverrides{});
        } catch (const ConfigError& e) {
            threw = true;
            CHECK(std::string(e.what()).find("not valid JSON") != std::string::npos);
        }
        CHECK(threw);
    }

    SUBCASE("non-object document") {
        const TempFile file("ufm_cfg_array.json", "[1,2,3]");
        CHECK_THROWS_AS(parse_config(file.str(), ConfigOverrides{}), ConfigError);
    }

    SUBCASE("missing file is an I/O failure, not a config failure") {
        CHECK_THROWS_AS(parse_config(std::string("/nonexistent/ufm.json"), ConfigOverrides{}),
                        IoError);
    }

    SUBCASE("non-numeric numeric field") {
        const TempFile file("ufm_cfg_type.json", R"({"k": "four", "R": 10})");
        CHECK_THROWS_WITH_AS(parse_config(file.str(), ConfigOverrides{}),
                             "config key \"k\" must be a number", ConfigError);
    }

    SUBCASE("bad enum values") {
        const TempFile file("ufm_cfg_mode.json",
                            R"({"k": 4, "R": 10, "weighting": {"mode": "focal"}})");
        CHECK_THROWS_AS(parse_config(file.str(), ConfigOverrides{}), ConfigError);
        const TempFile file2("ufm_cfg_kind.json",
                             R"({"k": 4, "R": 10, "init": {"kind": "warm"}})");
        CHECK_THROWS_AS(parse_config(file2.str(), ConfigOverrides{}), ConfigError);
    }

    SUBCASE("unknown output kind") {
        ConfigOverrides o = kr(4, 10.0);
        o.outputs = std::vector<std::string>{"trajectory", "heatmap"};
        bool threw = false;
        try {
            parse_config(std::nullopt, o);
        } catch (const ConfigError& e) {
            threw = true;
            CHECK(std::string(e.what()).find("heatmap") != std::string::npos);
        }
        CHECK(threw);
    }

    SUBCASE("instance invariants are enforced at parse time") {
        CHECK_THROWS_WITH_AS(parse_config(std::nullopt, kr(5, 10.0)),
                             "k must be even and >= 4", ConfigError);
        CHECK_THROWS_WITH_AS(parse_config(std::nullopt, kr(4, 0.5)), "R must be >= 1",
                             ConfigError);
        ConfigOverrides o = kr(4, 10.0);
        o.steps = 10;  // horizon far too short for the slowest mode
        CHECK_THROWS_AS(parse_config(std::nullopt, o), ConfigError);
    }
}

TEST_CASE("the seed environment variable overrides file and flags") {
    const TempFile file("ufm_cfg_seed.json",
                        R"({"k": 4, "R": 10, "init": {"kind": "random", "seed": 9}})");

    SUBCASE("override applies") {
        SeedEnvGuard env("1234");
        ConfigOverrides o;
        o.seed = 77;  // even the flag loses to the environment
        const ExperimentConfig cfg = parse_config(file.str(), o);
        CHECK(cfg.init.seed == 1234);
    }

    SUBCASE("unset environment keeps the flag") {
        SeedEnvGuard env(nullptr);
        ConfigOverrides o;
        o.seed = 77;
        const ExperimentConfig cfg = parse_config(file.str(), o);
        CHECK(cfg.init.seed == 77);
    }

    SUBCASE("garbage values are rejected") {
        SeedEnvGuard env("12x4");
        bool threw = false;
        try {
            parse_config(file.str(), ConfigOverrides{});
        } catch (const ConfigError& e) {
            threw = true;
            CHECK(std::string(e.what()).find("UFM_SEED") != std::string::npos);
        }
        CHECK(threw);
    }
}

TEST_CASE("serialized configs round-trip exactly") {
    SeedEnvGuard env(nullptr);
    ConfigOverrides o = kr(4, 10.0);
    o.weighting = std::string("reweighted");
    o.record_every = 5;
    const ExperimentConfig cfg = parse_config(std::nullopt, o);

    const std::string text = config_to_json(cfg);
    const TempFile file("ufm_cfg_roundtrip.json", text);
    const ExperimentConfig back = parse_config(file.str(), ConfigOverrides{});

    CHECK(config_to_json(back) == text);
    CHECK(config_digest(back) == config_digest(cfg));
}

TEST_CASE("config digests separate distinct runs and name things stably") {
    SeedEnvGuard env(nullptr);
    const ExperimentConfig a = parse_config(std::nullopt, kr(4, 10.0));
    ConfigOverrides o = kr(4, 10.0);
    o.weighting = std::string("reweighted");
    const ExperimentConfig b = parse_config(std::nullopt, o);

    CHECK(config_digest(a) != config_digest(b));
    CHECK(config_digest(a).size() == 16);  // fixed-width hex

    const std::string text = config_to_json(a);
    CHECK(text.find("\"vanilla\"") != std::string::npos);
    CHECK(text.find("\"spectral\"") != std::string::npos);
    CHECK(std::string(weighting_name(WeightingMode::reweighted)) == "reweighted");
    CHECK(std::string(init_kind_name(InitKind::random)) == "random");
}
