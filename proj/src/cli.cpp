#include "gazeaffect/cli.hpp"

#include <openssl/evp.h>

#include <CLI11.hpp>
#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "gazeaffect/data_io.hpp"
#include "gazeaffect/error.hpp"
#include "gazeaffect/features.hpp"
#include "gazeaffect/pipeline.hpp"
#include "gazeaffect/stats.hpp"
#include "gazeaffect/stats_report.hpp"
#include "gazeaffect/synth.hpp"
#include "gazeaffect/training.hpp"

namespace gazeaffect::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Stream ids for per-stage seeds derived from --seed.
constexpr std::uint64_t kSplitStream = 101;
constexpr std::uint64_t kModelStream = 102;
constexpr std::uint64_t kSvmStream = 103;

constexpr const char* kFeaturesFile = "features.csv";
constexpr const char* kSequencesFile = "sequences.csv";
constexpr const char* kEventsFile = "events.csv";
constexpr const char* kStatsFile = "stats-report.json";
constexpr const char* kSplitFile = "split.csv";
constexpr const char* kMetricsFile = "metrics.json";
constexpr const char* kBaselineFile = "baseline-metrics.json";
constexpr const char* kEvalFile = "eval-metrics.json";
constexpr const char* kAgreementFile = "agreement.json";
constexpr const char* kLeaderboardFile = "leaderboard.csv";
constexpr const char* kReportFile = "report.txt";

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Options {
    std::string in;
    std::string out;
    std::vector<std::string> configs;
    std::optional<std::uint64_t> seed;
    bool by_participant = false;
    bool overwrite = false;
    std::string grid = "paper";
    std::string label = "all";
};

/// One subcommand invocation: resolved config, recorded inputs and outputs.
class Run {
public:
    Run(std::string subcommand, const Options& opts, std::ostream& out, std::ostream& err)
        : subcommand_(std::move(subcommand)), opts_(opts), out_(out), err_(err) {
        if (const char* env = std::getenv(kConfigEnv); env && *env) load_config(env);
        for (const auto& c : opts.configs) load_config(c);
        seed_ = opts.seed ? *opts.seed : static_cast<std::uint64_t>(config_.number("run.seed", 1.0));
    }

    const config::Document& config() const { return config_; }
    std::uint64_t seed() const { return seed_; }
    const Options& options() const { return opts_; }
    std::ostream& out() { return out_; }
    std::ostream& err() { return err_; }

    fs::path in_dir() const {
        if (opts_.in.empty()) throw UsageError(subcommand_ + " requires --in");
        return opts_.in;
    }
    fs::path out_dir() const {
        if (!opts_.out.empty()) return opts_.out;
        if (!opts_.in.empty()) return opts_.in;
        throw UsageError(subcommand_ + " requires --out");
    }

    /// Existing input file in --in; recorded for the manifest.
    fs::path input(const std::string& name) {
        const fs::path p = in_dir() / name;
        if (!fs::exists(p)) throw Error(Errc::MissingInput, p.string());
        inputs_.push_back(p);
        return p;
    }
    bool has_input(const std::string& name) const { return fs::exists(in_dir() / name); }

    /// Output path in --out; refuses to clobber without --overwrite.
    fs::path output(const std::string& name) {
        const fs::path p = out_dir() / name;
        if (fs::exists(p) && !opts_.overwrite)
            throw UsageError(p.string() + " exists; pass --overwrite to replace it");
        fs::create_directories(out_dir());
        outputs_.push_back(p);
        return p;
    }
    void write(const std::string& name, const std::string& content) { io::write_file_atomic(output(name), content); }

    void warn(const io::Warnings& warnings) {
        for (const auto& w : warnings) err_ << "warning: " << w << "\n";
        warnings_ += warnings.size();
    }

    void write_manifest() {
        json m;
        m["subcommand"] = subcommand_;
        m["tool_version"] = std::string(kToolVersion);
        m["seed"] = seed_;
        m["config_hash"] = sha256_hex(config_.canonical());
        m["config_files"] = config_files_;
        m["warnings"] = warnings_;
        auto digests = [](const std::vector<fs::path>& paths) {
            json arr = json::array();
            for (const auto& p : paths) arr.push_back({{"path", p.generic_string()}, {"sha256", sha256_hex(io::read_file(p))}});
            return arr;
        };
        m["inputs"] = digests(inputs_);
        m["outputs"] = digests(outputs_);
        fs::create_directories(out_dir());
        io::write_file_atomic(out_dir() / ("manifest-" + subcommand_ + ".json"), m.dump(2) + "\n");
    }

private:
    void load_config(const fs::path& p) {
        if (!fs::exists(p)) throw Error(Errc::MissingInput, p.string());
        config_.merge(config::Document::load(p));
        config_files_.push_back(p.generic_string());
        inputs_.push_back(p);
    }

    std::string subcommand_;
    Options opts_;
    std::ostream& out_;
    std::ostream& err_;
    config::Document config_;
    std::vector<std::string> config_files_;
    std::uint64_t seed_ = 1;
    std::vector<fs::path> inputs_;
    std::vector<fs::path> outputs_;
    std::size_t warnings_ = 0;
};

std::vector<LabelDim> selected_labels(const Run& run) {
    const auto& name = run.options().label;
    if (name == "all") return {kAllLabelDims.begin(), kAllLabelDims.end()};
    if (auto d = parse_label_dim(name)) return {*d};
    throw UsageError("unknown label '" + name + "'");
}

FeatureTable load_table(Run& run, bool with_sequences) {
    FeatureTable table = io::read_features(run.input(kFeaturesFile));
    if (with_sequences) io::read_sequences(table, run.input(kSequencesFile));
    return table;
}

// ---- split file ----

struct SplitTable {
    std::vector<std::string> trial_ids;
    std::array<std::vector<model::SplitPart>, kLabelDimCount> parts;
};

std::string split_csv(const FeatureTable& table, const SplitTable& split) {
    std::ostringstream s;
    s << "trial_id,participant_id";
    for (LabelDim d : kAllLabelDims) s << "," << label_dim_name(d);
    s << "\n";
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        s << table.rows[i].trial_id << "," << table.rows[i].participant_id;
        for (std::size_t d = 0; d < kLabelDimCount; ++d) s << "," << model::split_part_name(split.parts[d][i]);
        s << "\n";
    }
    return s.str();
}

SplitTable parse_split(const fs::path& path, const FeatureTable& table) {
    std::istringstream in(io::read_file(path));
    std::string line;
    std::getline(in, line);
    SplitTable split;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ls(line);
        for (std::string cell; std::getline(ls, cell, ',');) cells.push_back(cell);
        if (cells.size() != 2 + kLabelDimCount)
            throw Error(Errc::MalformedRow, path.string() + ":" + std::to_string(line_no));
        split.trial_ids.push_back(cells[0]);
        for (std::size_t d = 0; d < kLabelDimCount; ++d) {
            try {
                split.parts[d].push_back(model::parse_split_part(cells[2 + d]));
            } catch (const Error&) {
                throw Error(Errc::MalformedRow, path.string() + ":" + std::to_string(line_no));
            }
        }
    }
    if (split.trial_ids.size() != table.rows.size())
        throw Error(Errc::ShapeMismatch, path.string() + " does not match " + kFeaturesFile);
    for (std::size_t i = 0; i < table.rows.size(); ++i)
        if (split.trial_ids[i] != table.rows[i].trial_id)
            throw Error(Errc::ShapeMismatch, path.string() + ": trial order differs at " + split.trial_ids[i]);
    return split;
}

struct Partitioned {
    std::vector<model::Example> train, validation, test;
};

Partitioned partition(const std::vector<model::Example>& xs, const std::vector<model::SplitPart>& parts) {
    Partitioned p;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        switch (parts[i]) {
            case model::SplitPart::Train: p.train.push_back(xs[i]); break;
            case model::SplitPart::Validation: p.validation.push_back(xs[i]); break;
            case model::SplitPart::Test: p.test.push_back(xs[i]); break;
        }
    }
    return p;
}

std::string label_file(const char* stem, LabelDim d, const char* ext) {
    return std::string(stem) + "-" + std::string(label_dim_name(d)) + ext;
}

// ---- subcommands ----

void cmd_synth(Run& run) {
    auto spec = synth::CohortSpec::from_config(run.config());
    spec.seed = run.seed();
    const auto effects = synth::PlantedEffects::from_config(run.config());
    const Dataset ds = synth::generate_cohort(spec, effects);
    for (const char* name : {io::kGazeFile, io::kLabelsFile, io::kParticipantsFile, io::kEnvFile, io::kLandmarksFile})
        run.output(name);
    io::write_dataset(ds, run.out_dir());
    const std::string summary = synth::format_summary(synth::describe_cohort(ds));
    run.write("cohort-summary.txt", summary);
    run.out() << summary;
}

Dataset load_raw(Run& run) {
    for (const char* name : {io::kGazeFile, io::kLabelsFile, io::kParticipantsFile, io::kEnvFile, io::kLandmarksFile})
        run.input(name);
    io::Warnings warnings;
    Dataset ds = io::load_dataset(run.in_dir(), &warnings);
    run.warn(warnings);
    return ds;
}

void cmd_events(Run& run) {
    const Dataset ds = load_raw(run);
    io::Warnings warnings;
    const auto ex = pipeline::extract(ds, pipeline::ExtractionConfig::from_config(run.config()), &warnings);
    run.warn(warnings);
    pipeline::write_events(ex, run.output(kEventsFile));
    run.out() << "events for " << ex.events.size() << " trials\n";
}

void cmd_features(Run& run) {
    const Dataset ds = load_raw(run);
    io::Warnings warnings;
    const auto ex = pipeline::extract(ds, pipeline::ExtractionConfig::from_config(run.config()), &warnings);
    run.warn(warnings);
    io::write_features(ex.table, run.output(kFeaturesFile));
    io::write_sequences(ex.table, run.output(kSequencesFile));
    pipeline::write_events(ex, run.output(kEventsFile));
    run.out() << "features for " << ex.table.rows.size() << " trials\n";
}

void cmd_stats(Run& run) {
    const FeatureTable table = load_table(run, false);
    const json report = stats::build_stats_report(table.rows);
    run.write(kStatsFile, report.dump(2) + "\n");
    run.out() << report["correlations"].size() << " correlations, " << report["lme"].size() << " mixed models\n";
}

void cmd_split(Run& run) {
    const FeatureTable table = load_table(run, false);
    if (table.rows.empty()) throw Error(Errc::EmptyDataset, run.in_dir().string() + "/" + kFeaturesFile);
    const std::uint64_t seed = synth::substream_seed(run.seed(), kSplitStream);
    SplitTable split;
    if (run.options().by_participant) {
        std::vector<std::string> ids;
        for (const auto& r : table.rows) ids.push_back(r.participant_id);
        const auto parts = model::participant_split(ids, {}, seed);
        split.parts.fill(parts);
    } else {
        for (std::size_t d = 0; d < kLabelDimCount; ++d) {
            std::vector<int> classes;
            for (const auto& r : table.rows)
                classes.push_back(static_cast<int>(features::bin_label(r.labels[kAllLabelDims[d]])));
            split.parts[d] = model::stratified_split(classes, {}, synth::substream_seed(seed, d + 1));
        }
    }
    run.write(kSplitFile, split_csv(table, split));
    run.out() << "split " << table.rows.size() << " trials"
              << (run.options().by_participant ? " by participant\n" : " stratified per label\n");
}

Partitioned labelled_partition(const FeatureTable& table, const SplitTable& split, LabelDim d) {
    return partition(model::make_examples(table, d), split.parts[static_cast<std::size_t>(d)]);
}

void require_nonempty(const Partitioned& p, LabelDim d) {
    if (p.train.empty() || p.validation.empty() || p.test.empty())
        throw Error(Errc::EmptySplit, std::string(label_dim_name(d)) + " has an empty partition");
}

json label_metrics(const model::NetworkParams& params, const model::ExampleScaler& scaler, const Partitioned& p) {
    json j;
    j["validation"] = model::evaluate(params, scaler.apply(p.validation)).to_json();
    j["test"] = model::evaluate(params, scaler.apply(p.test)).to_json();
    return j;
}

void save_model(Run& run, LabelDim d, const model::NetworkParams& params, const model::ExampleScaler& scaler,
                const model::TrainResult& result) {
    run.write(label_file("model", d, ".ckpt"), model::serialize_params(params));
    run.write(label_file("scaler", d, ".json"), scaler.to_json().dump(2) + "\n");
    run.write(label_file("training-log", d, ".csv"), model::training_log_csv(result.log));
    for (const auto& c : scaler.zero_variance_channels())
        run.err() << "warning: " << label_dim_name(d) << ": zero-variance channel " << c << "\n";
}

model::ModelConfig label_config(const Run& run, LabelDim d) {
    auto cfg = model::ModelConfig::from_config(run.config());
    cfg.seed = synth::substream_seed(run.seed(), kModelStream, static_cast<std::uint64_t>(d) + 1);
    return cfg;
}

json metrics_header(const Run& run, const model::ModelConfig& cfg) {
    return {{"variant", std::string(model::variant_name(cfg.variant))},
            {"split", run.options().by_participant ? "participant" : "trial"},
            {"labels", json::object()}};
}

void cmd_train(Run& run) {
    const FeatureTable table = load_table(run, true);
    const SplitTable split = parse_split(run.input(kSplitFile), table);
    json metrics;
    for (LabelDim d : selected_labels(run)) {
        const auto cfg = label_config(run, d);
        if (metrics.is_null()) metrics = metrics_header(run, cfg);
        const Partitioned p = labelled_partition(table, split, d);
        require_nonempty(p, d);
        const auto scaler = model::ExampleScaler::fit(p.train);
        const auto result = model::train(cfg, scaler.apply(p.train), scaler.apply(p.validation));
        save_model(run, d, result.params, scaler, result);
        json j = label_metrics(result.params, scaler, p);
        j["best_epoch"] = result.best_epoch;
        j["learning_rate"] = cfg.learning_rate;
        j["dropout"] = cfg.dropout;
        run.out() << label_dim_name(d) << ": test macro F1 " << j["test"]["macro_f1"].get<double>() << "\n";
        metrics["labels"][std::string(label_dim_name(d))] = std::move(j);
    }
    run.write(kMetricsFile, metrics.dump(2) + "\n");
}

void cmd_grid(Run& run) {
    const auto& which = run.options().grid;
    const auto grid = which == "paper" ? model::paper_grid() : model::extended_grid();
    const FeatureTable table = load_table(run, true);
    const SplitTable split = parse_split(run.input(kSplitFile), table);
    json metrics;
    std::string board;
    for (LabelDim d : selected_labels(run)) {
        const auto base = label_config(run, d);
        if (metrics.is_null()) metrics = metrics_header(run, base);
        const Partitioned p = labelled_partition(table, split, d);
        require_nonempty(p, d);
        const auto scaler = model::ExampleScaler::fit(p.train);
        const auto result = model::grid_search(base, grid, scaler.apply(p.train), scaler.apply(p.validation));
        std::istringstream rows(model::leaderboard_csv(result.leaderboard));
        std::string line;
        std::getline(rows, line);
        if (board.empty()) board = "label," + line + "\n";
        while (std::getline(rows, line)) board += std::string(label_dim_name(d)) + "," + line + "\n";
        save_model(run, d, result.best_run.params, scaler, result.best_run);
        json j = label_metrics(result.best_run.params, scaler, p);
        j["best_epoch"] = result.best_run.best_epoch;
        j["learning_rate"] = result.best_config.learning_rate;
        j["dropout"] = result.best_config.dropout;
        j["grid"] = which;
        run.out() << label_dim_name(d) << ": lr " << result.best_config.learning_rate << ", dropout "
                  << result.best_config.dropout << ", test macro F1 " << j["test"]["macro_f1"].get<double>() << "\n";
        metrics["labels"][std::string(label_dim_name(d))] = std::move(j);
    }
    run.write(kLeaderboardFile, board);
    run.write(kMetricsFile, metrics.dump(2) + "\n");
}

void cmd_baseline(Run& run) {
    const FeatureTable table = load_table(run, true);
    const SplitTable split = parse_split(run.input(kSplitFile), table);
    model::SvmConfig cfg;
    cfg.lambda = run.config().number("svm.lambda", cfg.lambda);
    cfg.epochs = static_cast<std::size_t>(run.config().number("svm.epochs", static_cast<double>(cfg.epochs)));
    if (!(cfg.lambda > 0.0) || cfg.epochs == 0) throw Error(Errc::InvalidConfig, "svm.lambda and svm.epochs must be > 0");
    const auto weights = run.config().string("svm.class_weights", "inverse");
    if (weights != "inverse" && weights != "uniform") throw Error(Errc::InvalidConfig, "svm.class_weights: " + weights);
    cfg.class_weights = weights == "inverse" ? model::ClassWeightsMode::Inverse : model::ClassWeightsMode::Uniform;
    json out = {{"labels", json::object()}};
    for (LabelDim d : selected_labels(run)) {
        const Partitioned p = labelled_partition(table, split, d);
        require_nonempty(p, d);
        json j;
        for (auto f : {model::SvmFeatures::Stimulus, model::SvmFeatures::StimulusPersonality}) {
            cfg.seed = synth::substream_seed(run.seed(), kSvmStream, static_cast<std::uint64_t>(d) + 1);
            const auto svm = model::train_svm(p.train, f, cfg);
            j[std::string(model::svm_features_name(f))] = model::evaluate(svm, p.test).to_json();
        }
        out["labels"][std::string(label_dim_name(d))] = std::move(j);
    }
    run.write(kBaselineFile, out.dump(2) + "\n");
    run.out() << "baselines for " << out["labels"].size() << " labels\n";
}

void cmd_eval(Run& run) {
    const FeatureTable table = load_table(run, true);
    const SplitTable split = parse_split(run.input(kSplitFile), table);
    json out = {{"labels", json::object()}};
    for (LabelDim d : selected_labels(run)) {
        const auto params = model::load_params(run.input(label_file("model", d, ".ckpt")));
        const auto scaler =
            model::ExampleScaler::from_json(json::parse(io::read_file(run.input(label_file("scaler", d, ".json")))));
        const Partitioned p = labelled_partition(table, split, d);
        if (p.test.empty()) throw Error(Errc::EmptySplit, std::string(label_dim_name(d)) + " test partition");
        out["labels"][std::string(label_dim_name(d))] = {
            {"test", model::evaluate(params, scaler.apply(p.test)).to_json()}};
    }
    run.write(kEvalFile, out.dump(2) + "\n");
    run.out() << "evaluated " << out["labels"].size() << " labels\n";
}

void cmd_agreement(Run& run) {
    const FeatureTable table = load_table(run, false);
    const auto a = stats::agreement_all(table.rows);
    json out;
    for (std::size_t i = 0; i < kLabelDimCount; ++i)
        out[std::string(label_dim_name(kAllLabelDims[i]))] = {{"percent", a.percent[i]}, {"tied_clips", a.tied_clips[i]}};
    out["clips"] = a.clips;
    out["tie_rule"] = "medium, then low";
    run.write(kAgreementFile, out.dump(2) + "\n");
    run.out() << "agreement over " << a.clips << " clips\n";
}

void cmd_report(Run& run) {
    for (const char* name : {kStatsFile, kMetricsFile, kBaselineFile, kAgreementFile})
        if (run.has_input(name)) run.input(name);
    const std::string text = render_report(run.in_dir());
    run.write(kReportFile, text);
    run.out() << text;
}

// ---- report rendering ----

std::string fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::string pad(std::string s, std::size_t width) {
    if (s.size() < width) s.append(width - s.size(), ' ');
    return s;
}

std::string cell(const json& row, const char* value_key) {
    if (row.contains("error")) return "n/a";
    return fixed(row[value_key].get<double>(), value_key == std::string("r") ? 2 : 3) + " (" +
           format_p(row["p"].get<double>()) + ")";
}

std::optional<json> load_json(const fs::path& p) {
    if (!fs::exists(p)) return std::nullopt;
    try {
        return json::parse(io::read_file(p));
    } catch (const json::exception& e) {
        throw Error(Errc::MalformedRow, p.string() + ": " + e.what());
    }
}

// predictor x label grid with "value (p)" cells for one family.
void grid_table(std::ostream& s, const json& rows, const std::string& family, const char* value_key,
                const std::function<bool(const json&)>& keep = {}) {
    std::vector<std::string> predictors;
    std::map<std::pair<std::string, std::string>, std::string> cells;
    for (const auto& r : rows) {
        if (r.value("family", "") != family || (keep && !keep(r))) continue;
        const std::string pred = r["predictor"];
        if (std::find(predictors.begin(), predictors.end(), pred) == predictors.end()) predictors.push_back(pred);
        cells[{pred, r["label"].get<std::string>()}] = cell(r, value_key);
    }
    s << pad("", 24);
    for (LabelDim d : kAllLabelDims) s << pad(std::string(label_dim_name(d)), 22);
    s << "\n";
    for (const auto& p : predictors) {
        s << pad(p, 24);
        for (LabelDim d : kAllLabelDims) {
            auto it = cells.find({p, std::string(label_dim_name(d))});
            s << pad(it == cells.end() ? "" : it->second, 22);
        }
        s << "\n";
    }
    s << "\n";
}

void f1_row(std::ostream& s, const std::string& name, const json& m) {
    s << pad(name, 44) << pad(fixed(m["f1_low"].get<double>(), 2), 8) << pad(fixed(m["f1_medium"].get<double>(), 2), 8)
      << pad(fixed(m["f1_high"].get<double>(), 2), 8) << fixed(m["macro_f1"].get<double>(), 2) << "\n";
}

}  // namespace

std::string sha256_hex(std::string_view bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw Error(Errc::IoFailure, "SHA-256 failed");
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(kHex[digest[i] >> 4]);
        out.push_back(kHex[digest[i] & 15]);
    }
    return out;
}

std::string format_p(double p) {
    if (p < 0.001) return "< 0.001";
    return fixed(p, 3);
}

std::string render_report(const fs::path& dir) {
    const auto stats = load_json(dir / kStatsFile);
    const auto metrics = load_json(dir / kMetricsFile);
    const auto baseline = load_json(dir / kBaselineFile);
    const auto agreement = load_json(dir / kAgreementFile);
    if (!stats && !metrics && !baseline && !agreement)
        throw Error(Errc::MissingInput, (dir / kStatsFile).string() + " (or metrics.json, baseline-metrics.json, agreement.json)");

    std::ostringstream s;
    if (stats) {
        const json empty = json::array();
        const json& corr = stats->contains("correlations") ? (*stats)["correlations"] : empty;
        const json& lme = stats->contains("lme") ? (*stats)["lme"] : empty;
        std::size_t usable = 0;
        for (const auto* arr : {&corr, &lme})
            for (const auto& r : *arr) usable += r.contains("error") ? 0 : 1;
        if (usable == 0) {
            s << "== statistics: no results ==\n\n";
        } else {
            s << "Personality traits vs labels, participant-level r (p)\n";
            grid_table(s, corr, "trait_label", "r");
            s << "Stimulus-conditional trait correlations with p < 0.05, r (p)\n";
            for (const auto& r : corr)
                if (r.value("family", "") == "stimulus_trait_label" && !r.contains("error") && r["p"].get<double>() < 0.05)
                    s << "  " << pad(r["stimulus"].get<std::string>(), 10) << pad(r["predictor"].get<std::string>(), 20)
                      << pad(r["label"].get<std::string>(), 20) << cell(r, "r") << "\n";
            s << "\nEye metrics vs labels, participant-level r (p)\n";
            grid_table(s, corr, "eye_metric_label", "r");
            s << "Mixed models: pupil predictors, beta1 (p)\n";
            grid_table(s, lme, "lme_pupil", "beta1");
            s << "Mixed models: region proportions, binned labels, beta1 (p)\n";
            grid_table(s, lme, "lme_regions_binned", "beta1");
            s << "Mixed models: region proportions, beta1 (p)\n";
            grid_table(s, lme, "lme_regions", "beta1");
            s << "Mixed models: personality traits, beta1 (p)\n";
            grid_table(s, lme, "lme_traits", "beta1");
        }
    }
    if (metrics || baseline) {
        s << "Model performance, F1 on the test partition\n" << pad("", 44) << pad("low", 8) << pad("medium", 8)
          << pad("high", 8) << "macro\n";
        for (LabelDim d : kAllLabelDims) {
            const std::string name(label_dim_name(d));
            if (metrics && (*metrics)["labels"].contains(name))
                f1_row(s, name + " NN " + metrics->value("variant", std::string()),
                       (*metrics)["labels"][name]["test"]);
            if (baseline && (*baseline)["labels"].contains(name))
                for (const auto& [key, m] : (*baseline)["labels"][name].items()) f1_row(s, name + " SVM " + key, m);
        }
        s << "\n";
    }
    const json* agree = agreement ? &*agreement : nullptr;
    if (!agree && stats && stats->contains("agreement")) agree = &(*stats)["agreement"];
    if (agree && !agree->contains("error")) {
        s << "Rater agreement, % of ratings in the clip's modal class\n";
        for (LabelDim d : kAllLabelDims) {
            const std::string name(label_dim_name(d));
            if (agree->contains(name)) s << "  " << pad(name, 20) << fixed((*agree)[name]["percent"].get<double>(), 1) << "\n";
        }
        s << "\n";
    }
    return s.str();
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Gaze, personality and affect analysis pipeline", "gazeaffect"};
    app.set_version_flag("--version", std::string(kToolVersion));
    Options opts;
    std::uint64_t seed = 0;
    app.add_option("--in", opts.in, "Input directory");
    app.add_option("--out", opts.out, "Output directory (defaults to --in)");
    app.add_option("--config", opts.configs, "Config file; repeat to layer overrides")->take_all();
    auto* seed_opt = app.add_option("--seed", seed, "Master seed for every stage");
    app.add_flag("--by-participant", opts.by_participant, "Participant-disjoint split");
    app.add_flag("--overwrite", opts.overwrite, "Replace existing outputs");
    app.add_option("--grid", opts.grid, "Grid for the grid subcommand: paper or extended");
    app.add_option("--label", opts.label, "Label to model (perceived_valence, ..., or all)");
    app.require_subcommand(1, 1);
    app.fallthrough();

    const std::vector<std::pair<const char*, const char*>> commands = {
        {"synth", "Generate a synthetic cohort"},
        {"events", "Detect fixations and saccades"},
        {"features", "Extract trial features and sequences"},
        {"stats", "Correlations, mixed models, agreement"},
        {"split", "Train/validation/test split"},
        {"train", "Train one network per label"},
        {"grid", "Grid search over learning rate and dropout"},
        {"baseline", "Linear SVM baselines"},
        {"eval", "Evaluate saved networks on the test split"},
        {"agreement", "Rater agreement per label"},
        {"report", "Render result tables"},
    };
    for (const auto& [name, help] : commands) app.add_subcommand(name, help);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForVersion&) {
        out << kToolVersion << "\n";
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n";
        return kUsageError;
    }
    if (seed_opt->count() > 0) opts.seed = seed;
    const std::string sub = app.get_subcommands().front()->get_name();

    static const std::map<std::string, void (*)(Run&)> handlers = {
        {"synth", cmd_synth}, {"events", cmd_events},       {"features", cmd_features}, {"stats", cmd_stats},
        {"split", cmd_split}, {"train", cmd_train},         {"grid", cmd_grid},         {"baseline", cmd_baseline},
        {"eval", cmd_eval},   {"agreement", cmd_agreement}, {"report", cmd_report},
    };
    try {
        if (opts.label != "all" && !parse_label_dim(opts.label)) throw UsageError("unknown label '" + opts.label + "'");
        if (opts.grid != "paper" && opts.grid != "extended") throw UsageError("--grid must be 'paper' or 'extended'");
        Run run(sub, opts, out, err);
        handlers.at(sub)(run);
        run.write_manifest();
        return kOk;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return kUsageError;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kDomainError;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return kDomainError;
    }
}

}  // namespace gazeaffect::cli
