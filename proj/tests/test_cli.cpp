#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <map>
#include <set>
#include <sstream>

#include "gazeaffect/cli.hpp"
#include "gazeaffect/data_io.hpp"
#include "gazeaffect/network.hpp"
#include "gazeaffect/pipeline.hpp"
#include "gazeaffect/roi.hpp"
#include "gazeaffect/synth.hpp"
#include "test_util.hpp"

using namespace gazeaffect;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path small_config(const fs::path& dir) {
    const fs::path p = dir / "small.toml";
    io::write_file_atomic(p, R"([cohort]
n_participants = 12
trials_per_participant = 18
sample_rate = 60

[model]
lstm_hidden = 4
personality_width = 3
stimulus_width = 3
env_width = 2
fusion_width = 6
max_epochs = 6
patience = 3
)");
    return p;
}

void run_pipeline(const fs::path& d, const fs::path& cfg, const std::string& seed) {
    const std::string c = cfg.string();
    REQUIRE(run({"synth", "--seed", seed, "--out", d.string(), "--config", c}).code == 0);
    REQUIRE(run({"features", "--in", d.string(), "--config", c}).code == 0);
    REQUIRE(run({"stats", "--in", d.string()}).code == 0);
    REQUIRE(run({"split", "--in", d.string(), "--seed", seed}).code == 0);
    const auto train = run({"train", "--in", d.string(), "--config", c, "--seed", seed});
    INFO(train.err);
    REQUIRE(train.code == 0);
}

}  // namespace

TEST_CASE("sha256 and p formatting") {
    CHECK(cli::sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(cli::format_p(0.0004) == "< 0.001");
    CHECK(cli::format_p(0.027) == "0.027");
    CHECK(cli::format_p(0.001) == "0.001");
}

TEST_CASE("synth, features, stats happy path") {
    testutil::TempDir tmp;
    const fs::path d = tmp.path();
    const auto cfg = small_config(d);
    CHECK(run({"synth", "--seed", "7", "--out", (d / "data").string(), "--config", cfg.string()}).code == 0);
    CHECK(run({"features", "--in", (d / "data").string(), "--config", cfg.string()}).code == 0);
    const auto r = run({"stats", "--in", (d / "data").string()});
    CHECK(r.code == 0);
    CHECK(fs::exists(d / "data" / "stats-report.json"));
    const auto manifest = json::parse(io::read_file(d / "data" / "manifest-stats.json"));
    CHECK(manifest["subcommand"] == "stats");
    CHECK(manifest["seed"] == 1);
    REQUIRE(manifest["inputs"].size() == 1);
    CHECK(manifest["inputs"][0]["sha256"] == cli::sha256_hex(io::read_file(d / "data" / "features.csv")));
    CHECK(manifest["outputs"][0]["sha256"] == cli::sha256_hex(io::read_file(d / "data" / "stats-report.json")));
}

TEST_CASE("missing input is a domain error naming the path") {
    testutil::TempDir tmp;
    const fs::path d = tmp.path();
    const auto r = run({"train", "--in", d.string()});
    CHECK(r.code == 1);
    CHECK(r.err.find((d / "features.csv").string()) != std::string::npos);
    CHECK(r.err.find('\n') == r.err.size() - 1);

    const auto c = run({"stats", "--in", d.string(), "--config", (d / "nope.toml").string()});
    CHECK(c.code == 1);
    CHECK(c.err.find("nope.toml") != std::string::npos);
}

TEST_CASE("usage errors exit 2") {
    CHECK(run({}).code == 2);
    CHECK(run({"frobnicate"}).code == 2);
    CHECK(run({"stats"}).code == 2);
    CHECK(run({"stats", "--seed", "x", "--in", "."}).code == 2);
    testutil::TempDir tmp;
    const fs::path d = tmp.path();
    CHECK(run({"grid", "--in", d.string(), "--grid", "huge"}).code == 2);
    CHECK(run({"train", "--in", d.string(), "--label", "joy"}).code == 2);
    CHECK(run({"--help"}).code == 0);
}

TEST_CASE("outputs are protected unless --overwrite, and reruns are idempotent") {
    testutil::TempDir tmp;
    const fs::path d = tmp.path();
    const auto cfg = small_config(d);
    const std::string data = (d / "data").string();
    REQUIRE(run({"synth", "--out", data, "--config", cfg.string()}).code == 0);
    REQUIRE(run({"features", "--in", data}).code == 0);
    const std::string first = io::read_file(d / "data" / "features.csv");
    const auto again = run({"features", "--in", data});
    CHECK(again.code == 2);
    CHECK(again.err.find("--overwrite") != std::string::npos);
    CHECK(run({"features", "--in", data, "--overwrite"}).code == 0);
    CHECK(io::read_file(d / "data" / "features.csv") == first);
}

TEST_CASE("end-to-end runs with the same seed are byte-identical") {
    testutil::TempDir tmp;
    const fs::path a = tmp / "a", b = tmp / "b", c = tmp / "c";
    const auto cfg = small_config(tmp.path());
    run_pipeline(a / "run", cfg, "11");
    run_pipeline(b / "run", cfg, "11");
    run_pipeline(c / "run", cfg, "12");
    for (const char* f : {"metrics.json", "stats-report.json", "split.csv", "features.csv", "model-felt_valence.ckpt"})
        CHECK(io::read_file(a / "run" / f) == io::read_file(b / "run" / f));
    CHECK(io::read_file(a / "run" / "stats-report.json") != io::read_file(c / "run" / "stats-report.json"));

    // eval reproduces the test metrics recorded at training time
    REQUIRE(run({"eval", "--in", (a / "run").string()}).code == 0);
    const auto trained = json::parse(io::read_file(a / "run" / "metrics.json"));
    const auto evaluated = json::parse(io::read_file(a / "run" / "eval-metrics.json"));
    for (const auto& [label, m] : evaluated["labels"].items()) CHECK(m["test"] == trained["labels"][label]["test"]);

    REQUIRE(run({"baseline", "--in", (a / "run").string()}).code == 0);
    REQUIRE(run({"agreement", "--in", (a / "run").string()}).code == 0);
    const auto report = run({"report", "--in", (a / "run").string()});
    CHECK(report.code == 0);
    CHECK(report.out.find("Rater agreement") != std::string::npos);
    CHECK(report.out.find("SVM stimulus_personality") != std::string::npos);
    CHECK(fs::exists(a / "run" / "report.txt"));
}

TEST_CASE("participant split keeps participants together") {
    testutil::TempDir tmp;
    const fs::path d = tmp.path();
    const auto cfg = small_config(d);
    const std::string data = (d / "data").string();
    REQUIRE(run({"synth", "--out", data, "--config", cfg.string()}).code == 0);
    REQUIRE(run({"features", "--in", data}).code == 0);
    REQUIRE(run({"split", "--in", data, "--by-participant"}).code == 0);
    std::istringstream in(io::read_file(d / "data" / "split.csv"));
    std::string line;
    std::getline(in, line);
    CHECK(line == "trial_id,participant_id,perceived_valence,perceived_arousal,felt_valence,felt_arousal");
    std::map<std::string, std::set<std::string>> parts;
    while (std::getline(in, line)) {
        std::stringstream ls(line);
        std::string trial, participant, part;
        std::getline(ls, trial, ',');
        std::getline(ls, participant, ',');
        std::getline(ls, part, ',');
        parts[participant].insert(part);
    }
    CHECK(parts.size() == 12);
    for (const auto& [p, s] : parts) CHECK(s.size() == 1);
}

TEST_CASE("grid writes a leaderboard per label") {
    testutil::TempDir tmp;
    const fs::path d = tmp.path();
    const auto cfg = small_config(d);
    const std::string data = (d / "data").string();
    REQUIRE(run({"synth", "--out", data, "--config", cfg.string()}).code == 0);
    REQUIRE(run({"features", "--in", data}).code == 0);
    REQUIRE(run({"split", "--in", data}).code == 0);
    const auto r = run({"grid", "--in", data, "--config", cfg.string(), "--label", "felt_valence"});
    INFO(r.err);
    REQUIRE(r.code == 0);
    std::istringstream board(io::read_file(d / "data" / "leaderboard.csv"));
    std::string line;
    std::getline(board, line);
    CHECK(line == "label,learning_rate,dropout,val_macro_f1,best_epoch");
    std::size_t rows = 0;
    while (std::getline(board, line)) rows += line.rfind("felt_valence,", 0) == 0 ? 1 : 0;
    CHECK(rows == 9);
    const auto metrics = json::parse(io::read_file(d / "data" / "metrics.json"));
    CHECK(metrics["labels"].size() == 1);
    CHECK(metrics["labels"]["felt_valence"]["grid"] == "paper");
}

TEST_CASE("report rendering") {
    testutil::TempDir tmp;
    const fs::path d = tmp.path();
    CHECK(run({"report", "--in", d.string()}).code == 1);

    io::write_file_atomic(d / "stats-report.json", R"({"correlations": [], "lme": []})");
    auto r = run({"report", "--in", d.string()});
    CHECK(r.code == 0);
    CHECK(r.out.find("no results") != std::string::npos);

    io::write_file_atomic(d / "metrics.json", R"({"variant": "full", "labels": {"felt_valence": {"test":
        {"f1_low": 0.7, "f1_medium": 0.8, "f1_high": 0.81, "macro_f1": 0.77, "confusion": [], "n": 10}}}})");
    io::write_file_atomic(d / "stats-report.json", R"({"correlations": [
        {"family": "trait_label", "predictor": "neuroticism", "label": "felt_valence", "r": -0.29, "p": 0.0004}],
        "lme": []})");
    r = run({"report", "--in", d.string(), "--overwrite"});
    CHECK(r.code == 0);
    CHECK(r.out.find("0.77") != std::string::npos);
    CHECK(r.out.find("-0.29 (< 0.001)") != std::string::npos);
    CHECK(r.out.find("no results") == std::string::npos);
}

TEST_CASE("default config comes from the environment") {
    testutil::TempDir tmp;
    const fs::path d = tmp.path();
    const auto cfg = small_config(d);
    ::setenv(cli::kConfigEnv, cfg.string().c_str(), 1);
    const auto r = run({"synth", "--out", (d / "data").string()});
    ::unsetenv(cli::kConfigEnv);
    REQUIRE(r.code == 0);
    CHECK(r.out.find("participants 12") != std::string::npos);
}

TEST_CASE("shipped config files restate the built-in defaults") {
    const fs::path dir = fs::path(GAZEAFFECT_SOURCE_DIR) / "config";
    const auto effects_doc = config::Document::load(dir / "effects.toml");
    const auto e = synth::PlantedEffects::from_config(effects_doc);
    const synth::PlantedEffects defaults;
    CHECK(e.trait_felt_valence == defaults.trait_felt_valence);
    CHECK(e.happy_conscientiousness_perceived_valence == defaults.happy_conscientiousness_perceived_valence);
    CHECK(e.pupil_mean_arousal == defaults.pupil_mean_arousal);
    CHECK(e.pupil_mean_valence == defaults.pupil_mean_valence);
    CHECK(e.pupil_var_valence == defaults.pupil_var_valence);
    CHECK(e.region_tilt == defaults.region_tilt);
    CHECK(e.sigma_u == defaults.sigma_u);
    CHECK(e.sigma_e == defaults.sigma_e);
    CHECK(e.stimulus_base == defaults.stimulus_base);
    const auto spec = synth::CohortSpec::from_config(effects_doc);
    CHECK(spec.n_participants == 73);
    CHECK(spec.trials_per_participant == 84);
    CHECK(spec.sample_rate == 150.0);

    const auto m = model::ModelConfig::from_config(config::Document::load(dir / "model-config.toml"));
    const model::ModelConfig md;
    CHECK(m.learning_rate == md.learning_rate);
    CHECK(m.dropout == md.dropout);
    CHECK(m.lstm_hidden == md.lstm_hidden);
    CHECK(m.fusion_width == md.fusion_width);
    CHECK(m.env_width == md.env_width);
    CHECK(m.max_epochs == md.max_epochs);
    CHECK(m.variant == md.variant);

    const auto regions_doc = config::Document::load(dir / "regions.toml");
    const auto r = roi::RegionMap::from_config(regions_doc);
    const auto std68 = roi::RegionMap::standard68();
    CHECK(r.indices == std68.indices);
    CHECK(r.priority == std68.priority);
    CHECK(r.margin == std68.margin);
    const auto det = pipeline::ExtractionConfig::from_config(regions_doc).detector;
    const events::DetectorConfig dd;
    CHECK(det.dispersion_threshold == dd.dispersion_threshold);
    CHECK(det.min_duration == dd.min_duration);
    CHECK(det.max_gap == dd.max_gap);
}
