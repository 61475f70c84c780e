#include "gazeaffect/training.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "gazeaffect/data_io.hpp"
#include "gazeaffect/error.hpp"
#include "gazeaffect/features.hpp"

namespace gazeaffect::model {

using nlohmann::json;

namespace {

constexpr std::array<ScaleMode, kSequenceChannels> kSequenceModes = {
    ScaleMode::ZScore,      ScaleMode::ZScore,      ScaleMode::ZScore,      ScaleMode::Passthrough,
    ScaleMode::Passthrough, ScaleMode::Passthrough, ScaleMode::Passthrough, ScaleMode::Passthrough,
    ScaleMode::MinMax,      ScaleMode::Passthrough};
constexpr std::array<ScaleMode, kEnvDim> kEnvModes = {ScaleMode::ZScore, ScaleMode::ZScore, ScaleMode::ZScore};
constexpr std::array<std::string_view, kEnvDim> kEnvNames = {"ambient_lux", "temperature_celsius",
                                                             "stimulus_brightness"};

std::string_view mode_name(ScaleMode m) {
    switch (m) {
        case ScaleMode::Passthrough: return "passthrough";
        case ScaleMode::MinMax: return "minmax";
        case ScaleMode::ZScore: return "zscore";
    }
    return "?";
}

ScaleMode parse_mode(const std::string& s) {
    for (ScaleMode m : {ScaleMode::Passthrough, ScaleMode::MinMax, ScaleMode::ZScore})
        if (mode_name(m) == s) return m;
    throw Error(Errc::InvalidConfig, "unknown scale mode '" + s + "'");
}

json scaler_json(const ChannelScaler& s) {
    json modes = json::array();
    for (ScaleMode m : s.modes) modes.push_back(mode_name(m));
    return {{"modes", modes}, {"offset", s.offset}, {"divisor", s.divisor}, {"zero_variance", s.zero_variance}};
}

ChannelScaler scaler_from(const json& j) {
    ChannelScaler s;
    for (const auto& m : j.at("modes")) s.modes.push_back(parse_mode(m.get<std::string>()));
    s.offset = j.at("offset").get<std::vector<double>>();
    s.divisor = j.at("divisor").get<std::vector<double>>();
    s.zero_variance = j.at("zero_variance").get<std::vector<std::size_t>>();
    if (s.offset.size() != s.modes.size() || s.divisor.size() != s.modes.size())
        throw Error(Errc::ShapeMismatch, "scaler column counts disagree");
    return s;
}

int argmax(const std::array<double, kClasses>& v) {
    int best = 0;
    for (int k = 1; k < static_cast<int>(kClasses); ++k)
        if (v[static_cast<std::size_t>(k)] > v[static_cast<std::size_t>(best)]) best = k;
    return best;
}

std::array<double, kClasses> weights_for(ClassWeightsMode mode, std::span<const Example> xs) {
    if (mode == ClassWeightsMode::Uniform) return {1.0, 1.0, 1.0};
    return class_weights(class_counts(xs));
}

}  // namespace

std::string_view split_part_name(SplitPart p) {
    switch (p) {
        case SplitPart::Train: return "train";
        case SplitPart::Validation: return "validation";
        case SplitPart::Test: return "test";
    }
    return "?";
}

SplitPart parse_split_part(std::string_view name) {
    for (SplitPart p : {SplitPart::Train, SplitPart::Validation, SplitPart::Test})
        if (split_part_name(p) == name) return p;
    throw Error(Errc::MalformedRow, "unknown split part '" + std::string(name) + "'");
}

std::array<std::size_t, 3> partition_counts(std::size_t n, const SplitFractions& f) {
    const std::array<double, 3> frac = {f.train, f.validation, f.test};
    double total = 0.0;
    for (double x : frac) {
        if (!(x >= 0.0)) throw Error(Errc::InvalidConfig, "split fractions must be >= 0");
        total += x;
    }
    if (std::fabs(total - 1.0) > 1e-9) throw Error(Errc::InvalidConfig, "split fractions must sum to 1");
    std::array<std::size_t, 3> counts{};
    std::array<double, 3> rem{};
    std::size_t assigned = 0;
    for (std::size_t i = 0; i < 3; ++i) {
        const double exact = static_cast<double>(n) * frac[i];
        // Guard against representation error such as 100 * 0.64 landing just below 64.
        counts[i] = static_cast<std::size_t>(std::floor(exact + 1e-9));
        rem[i] = exact - static_cast<double>(counts[i]);
        assigned += counts[i];
    }
    std::array<std::size_t, 3> order = {0, 1, 2};
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return rem[a] > rem[b] + 1e-12; });
    for (std::size_t k = 0; assigned < n; k = (k + 1) % 3, ++assigned) ++counts[order[k]];
    return counts;
}

std::vector<SplitPart> stratified_split(std::span<const int> classes, const SplitFractions& f, std::uint64_t seed) {
    std::array<std::vector<std::size_t>, kClasses> members;
    for (std::size_t i = 0; i < classes.size(); ++i) {
        const int c = classes[i];
        if (c < 0 || c >= static_cast<int>(kClasses)) throw Error(Errc::ShapeMismatch, "class index outside 0..2");
        members[static_cast<std::size_t>(c)].push_back(i);
    }
    std::vector<SplitPart> out(classes.size(), SplitPart::Train);
    std::mt19937_64 rng(seed);
    for (std::size_t c = 0; c < kClasses; ++c) {
        auto& idx = members[c];
        if (idx.empty()) throw Error(Errc::EmptyClass, "class " + std::to_string(c) + " has no trials");
        std::shuffle(idx.begin(), idx.end(), rng);
        const auto counts = partition_counts(idx.size(), f);
        std::size_t k = 0;
        for (std::size_t part = 0; part < 3; ++part)
            for (std::size_t j = 0; j < counts[part]; ++j) out[idx[k++]] = static_cast<SplitPart>(part);
    }
    return out;
}

std::vector<SplitPart> participant_split(std::span<const std::string> participant_ids, const SplitFractions& f,
                                         std::uint64_t seed) {
    std::vector<std::string> order;
    std::unordered_map<std::string, std::size_t> index;
    for (const auto& id : participant_ids)
        if (index.try_emplace(id, order.size()).second) order.push_back(id);
    if (order.empty()) throw Error(Errc::EmptyDataset, "no participants to split");
    std::vector<std::size_t> perm(order.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::mt19937_64 rng(seed);
    std::shuffle(perm.begin(), perm.end(), rng);
    const auto counts = partition_counts(order.size(), f);
    std::vector<SplitPart> by_participant(order.size());
    std::size_t k = 0;
    for (std::size_t part = 0; part < 3; ++part)
        for (std::size_t j = 0; j < counts[part]; ++j) by_participant[perm[k++]] = static_cast<SplitPart>(part);
    std::vector<SplitPart> out;
    out.reserve(participant_ids.size());
    for (const auto& id : participant_ids) out.push_back(by_participant[index.at(id)]);
    return out;
}

ChannelScaler ChannelScaler::fit(std::span<const std::vector<double>> rows, std::span<const ScaleMode> modes) {
    if (rows.empty()) throw Error(Errc::EmptySplit, "cannot fit a scaler on zero rows");
    const std::size_t d = modes.size();
    ChannelScaler s;
    s.modes.assign(modes.begin(), modes.end());
    s.offset.assign(d, 0.0);
    s.divisor.assign(d, 1.0);
    for (std::size_t c = 0; c < d; ++c) {
        if (s.modes[c] == ScaleMode::Passthrough) continue;
        // Sorted accumulation keeps the fit independent of row order.
        std::vector<double> col;
        col.reserve(rows.size());
        for (const auto& r : rows) {
            if (r.size() != d) throw Error(Errc::ShapeMismatch, "scaler row width mismatch");
            col.push_back(r[c]);
        }
        std::sort(col.begin(), col.end());
        if (s.modes[c] == ScaleMode::MinMax) {
            s.offset[c] = col.front();
            s.divisor[c] = col.back() - col.front();
        } else {
            double sum = 0.0;
            for (double v : col) sum += v;
            const double mean = sum / static_cast<double>(col.size());
            double ss = 0.0;
            for (double v : col) ss += (v - mean) * (v - mean);
            s.offset[c] = mean;
            s.divisor[c] = std::sqrt(ss / static_cast<double>(col.size()));
        }
        if (!(s.divisor[c] > 0.0)) {
            s.divisor[c] = 0.0;
            s.zero_variance.push_back(c);
        }
    }
    return s;
}

double ChannelScaler::apply(std::size_t column, double value) const {
    switch (modes.at(column)) {
        case ScaleMode::Passthrough: return value;
        case ScaleMode::MinMax:
        case ScaleMode::ZScore:
            if (divisor[column] == 0.0) return 0.0;
            return (value - offset[column]) / divisor[column];
    }
    return value;
}

ExampleScaler ExampleScaler::fit(std::span<const Example> train) {
    if (train.empty()) throw Error(Errc::EmptySplit, "cannot fit scaling on an empty training split");
    std::vector<std::vector<double>> seq_rows, env_rows;
    seq_rows.reserve(train.size() * kSequenceSteps);
    for (const auto& ex : train) {
        for (const auto& step : ex.sequence) seq_rows.emplace_back(step.begin(), step.end());
        env_rows.emplace_back(ex.env.begin(), ex.env.end());
    }
    return {ChannelScaler::fit(seq_rows, kSequenceModes), ChannelScaler::fit(env_rows, kEnvModes)};
}

Example ExampleScaler::apply(const Example& ex) const {
    Example out = ex;
    for (auto& step : out.sequence)
        for (std::size_t c = 0; c < kSequenceChannels; ++c) step[c] = sequence.apply(c, step[c]);
    for (std::size_t c = 0; c < kEnvDim; ++c) out.env[c] = env.apply(c, out.env[c]);
    return out;
}

std::vector<Example> ExampleScaler::apply(std::span<const Example> xs) const {
    std::vector<Example> out;
    out.reserve(xs.size());
    for (const auto& ex : xs) out.push_back(apply(ex));
    return out;
}

std::vector<std::string> ExampleScaler::zero_variance_channels() const {
    std::vector<std::string> out;
    for (std::size_t c : sequence.zero_variance) out.emplace_back(sequence_channel_names()[c]);
    for (std::size_t c : env.zero_variance) out.emplace_back(kEnvNames[c]);
    return out;
}

json ExampleScaler::to_json() const { return {{"sequence", scaler_json(sequence)}, {"env", scaler_json(env)}}; }

ExampleScaler ExampleScaler::from_json(const json& j) {
    try {
        ExampleScaler s{scaler_from(j.at("sequence")), scaler_from(j.at("env"))};
        if (s.sequence.modes.size() != kSequenceChannels || s.env.modes.size() != kEnvDim)
            throw Error(Errc::ShapeMismatch, "scaler has the wrong number of channels");
        return s;
    } catch (const json::exception& e) {
        throw Error(Errc::MalformedRow, std::string("scaler file: ") + e.what());
    }
}

std::array<double, kClasses> class_weights(const std::array<std::size_t, kClasses>& counts) {
    std::size_t total = 0;
    for (std::size_t c = 0; c < kClasses; ++c) {
        if (counts[c] == 0) throw Error(Errc::EmptyClass, "class " + std::to_string(c) + " has no examples");
        total += counts[c];
    }
    std::array<double, kClasses> w{};
    for (std::size_t c = 0; c < kClasses; ++c)
        w[c] = static_cast<double>(total) / (static_cast<double>(kClasses) * static_cast<double>(counts[c]));
    return w;
}

std::array<std::size_t, kClasses> class_counts(std::span<const Example> xs) {
    std::array<std::size_t, kClasses> counts{};
    for (const auto& ex : xs) ++counts.at(static_cast<std::size_t>(ex.label));
    return counts;
}

void noise_augment(std::span<double> values, double sigma, std::mt19937_64& rng, Mode mode) {
    if (mode == Mode::Eval || sigma == 0.0) return;
    std::normal_distribution<double> noise(0.0, sigma);
    for (double& v : values) v += noise(rng);
}

void noise_augment(Example& ex, double sigma, std::mt19937_64& rng, Mode mode) {
    noise_augment(std::span<double>(ex.personality), sigma, rng, mode);
    noise_augment(std::span<double>(ex.env), sigma, rng, mode);
}

json MetricsReport::to_json() const {
    json conf = json::array();
    for (const auto& row : confusion) conf.push_back(row);
    return {{"f1_low", f1[0]}, {"f1_medium", f1[1]}, {"f1_high", f1[2]},
            {"macro_f1", macro_f1}, {"confusion", conf}, {"n", n}};
}

MetricsReport evaluate_predictions(std::span<const int> truth, std::span<const int> predicted) {
    if (truth.size() != predicted.size()) throw Error(Errc::LengthMismatch, "prediction count differs from labels");
    if (truth.empty()) throw Error(Errc::EmptySplit, "evaluation split is empty");
    MetricsReport m;
    m.n = truth.size();
    for (std::size_t i = 0; i < truth.size(); ++i)
        ++m.confusion.at(static_cast<std::size_t>(truth[i])).at(static_cast<std::size_t>(predicted[i]));
    double sum = 0.0;
    for (std::size_t c = 0; c < kClasses; ++c) {
        const double tp = static_cast<double>(m.confusion[c][c]);
        double fp = 0.0, fn = 0.0;
        for (std::size_t k = 0; k < kClasses; ++k) {
            if (k == c) continue;
            fp += static_cast<double>(m.confusion[k][c]);
            fn += static_cast<double>(m.confusion[c][k]);
        }
        m.f1[c] = tp == 0.0 ? 0.0 : 2.0 * tp / (2.0 * tp + fp + fn);
        sum += m.f1[c];
    }
    m.macro_f1 = sum / static_cast<double>(kClasses);
    return m;
}

std::vector<int> predict(const NetworkParams& params, std::span<const Example> xs) {
    std::vector<int> out;
    out.reserve(xs.size());
    for (const auto& ex : xs) out.push_back(argmax(forward(params, ex, Mode::Eval, 0.0)));
    return out;
}

MetricsReport evaluate(const NetworkParams& params, std::span<const Example> xs) {
    if (xs.empty()) throw Error(Errc::EmptySplit, "evaluation split is empty");
    std::vector<int> truth;
    for (const auto& ex : xs) truth.push_back(ex.label);
    return evaluate_predictions(truth, predict(params, xs));
}

EarlyStopper::EarlyStopper(std::size_t patience) : patience_(patience) {
    if (patience < 1) throw Error(Errc::InvalidConfig, "patience must be >= 1");
}

bool EarlyStopper::update(std::size_t epoch, double score) {
    if (!seen_ || score > best_score_) {
        seen_ = true;
        best_score_ = score;
        best_epoch_ = epoch;
    }
    return epoch - best_epoch_ >= patience_;
}

TrainResult train(const ModelConfig& config, std::span<const Example> train_set,
                  std::span<const Example> validation_set) {
    config.validate();
    if (train_set.empty()) throw Error(Errc::EmptySplit, "training split is empty");
    if (validation_set.empty()) throw Error(Errc::EmptySplit, "validation split is empty");
    std::mt19937_64 rng(config.seed);
    NetworkParams params = NetworkParams::initialize(config, rng);
    NetworkParams grad = NetworkParams::zeros(config);
    Adam adam(params, config.learning_rate);

    TrainResult result;
    result.weights = weights_for(config.class_weights, train_set);
    result.params = params;

    std::vector<std::size_t> order(train_set.size());
    std::iota(order.begin(), order.end(), 0);
    std::vector<Example> batch;
    std::vector<std::vector<double>> masks;
    EarlyStopper stopper(config.patience);

    for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        double epoch_loss = 0.0;
        for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
            const std::size_t end = std::min(order.size(), start + config.batch_size);
            batch.clear();
            masks.clear();
            for (std::size_t i = start; i < end; ++i) {
                batch.push_back(train_set[order[i]]);
                noise_augment(batch.back(), config.noise_sigma, rng);
                masks.push_back(dropout_mask(config.fusion_width, config.dropout, rng));
            }
            grad.fill(0.0);
            const double l = batch_loss(params, batch, result.weights, masks, &grad);
            if (!std::isfinite(l))
                throw Error(Errc::DivergenceDetected, "training loss is not finite at epoch " + std::to_string(epoch));
            if (config.weight_decay > 0.0) {
                auto ps = params.tensors();
                auto gs = grad.tensors();
                for (std::size_t t = 0; t < ps.size(); ++t)
                    for (std::size_t k = 0; k < ps[t]->data.size(); ++k)
                        gs[t]->data[k] += config.weight_decay * ps[t]->data[k];
            }
            adam.step(params, grad);
            epoch_loss += l * static_cast<double>(end - start);
        }
        if (!params.all_finite())
            throw Error(Errc::DivergenceDetected, "parameters became non-finite at epoch " + std::to_string(epoch));
        const double val_f1 = evaluate(params, validation_set).macro_f1;
        result.log.push_back({epoch, epoch_loss / static_cast<double>(train_set.size()), val_f1});
        const bool stop = stopper.update(epoch, val_f1);
        if (stopper.best_epoch() == epoch) result.params = params;
        if (stop) break;
    }
    result.best_epoch = stopper.best_epoch();
    result.best_val_f1 = stopper.best_score();
    return result;
}

std::string training_log_csv(const std::vector<EpochLog>& log) {
    std::string out = "epoch,train_loss,val_macro_f1\n";
    for (const auto& e : log)
        out += std::to_string(e.epoch) + "," + io::format_roundtrip(e.train_loss) + "," +
               io::format_roundtrip(e.val_macro_f1) + "\n";
    return out;
}

std::vector<GridPoint> paper_grid() {
    std::vector<GridPoint> g;
    for (double lr : {1e-3, 1e-4, 1e-5})
        for (double d : {0.2, 0.3, 0.5}) g.push_back({lr, d});
    return g;
}

std::vector<GridPoint> extended_grid() {
    std::vector<GridPoint> g;
    for (double lr : {1e-3, 7e-4, 4e-4, 3.5e-4, 3e-4, 2e-4, 1e-4, 1e-5})
        for (double d : {0.2, 0.3, 0.5}) g.push_back({lr, d});
    return g;
}

std::size_t select_best(std::span<const LeaderboardRow> rows) {
    if (rows.empty()) throw Error(Errc::InvalidConfig, "grid is empty");
    std::size_t best = 0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& a = rows[i];
        const auto& b = rows[best];
        if (a.val_macro_f1 != b.val_macro_f1) {
            if (a.val_macro_f1 > b.val_macro_f1) best = i;
        } else if (a.point.learning_rate != b.point.learning_rate) {
            if (a.point.learning_rate < b.point.learning_rate) best = i;
        } else if (a.point.dropout < b.point.dropout) {
            best = i;
        }
    }
    return best;
}

GridResult grid_search(const ModelConfig& base, std::span<const GridPoint> grid, std::span<const Example> train_set,
                       std::span<const Example> validation_set) {
    if (grid.empty()) throw Error(Errc::InvalidConfig, "grid is empty");
    GridResult out;
    std::vector<TrainResult> runs;
    for (const auto& point : grid) {
        ModelConfig c = base;
        c.learning_rate = point.learning_rate;
        c.dropout = point.dropout;
        runs.push_back(train(c, train_set, validation_set));
        out.leaderboard.push_back({point, runs.back().best_val_f1, runs.back().best_epoch});
    }
    const std::size_t best = select_best(out.leaderboard);
    out.best_config = base;
    out.best_config.learning_rate = grid[best].learning_rate;
    out.best_config.dropout = grid[best].dropout;
    out.best_run = std::move(runs[best]);
    return out;
}

std::string leaderboard_csv(std::span<const LeaderboardRow> rows) {
    std::string out = "learning_rate,dropout,val_macro_f1,best_epoch\n";
    for (const auto& r : rows)
        out += io::format_roundtrip(r.point.learning_rate) + "," + io::format_roundtrip(r.point.dropout) + "," +
               io::format_roundtrip(r.val_macro_f1) + "," + std::to_string(r.best_epoch) + "\n";
    return out;
}

std::string_view svm_features_name(SvmFeatures f) {
    return f == SvmFeatures::Stimulus ? "stimulus" : "stimulus_personality";
}

SvmFeatures parse_svm_features(std::string_view name) {
    if (name == "stimulus") return SvmFeatures::Stimulus;
    if (name == "stimulus_personality") return SvmFeatures::StimulusPersonality;
    throw Error(Errc::InvalidConfig, "unknown SVM feature set '" + std::string(name) + "'");
}

std::vector<double> svm_input(const Example& ex, SvmFeatures f) {
    std::vector<double> x(ex.stimulus.begin(), ex.stimulus.end());
    if (f == SvmFeatures::StimulusPersonality) x.insert(x.end(), ex.personality.begin(), ex.personality.end());
    x.push_back(1.0);
    return x;
}

std::array<double, kClasses> SvmModel::margins(const Example& ex) const {
    const auto x = svm_input(ex, features);
    std::array<double, kClasses> m{};
    for (std::size_t c = 0; c < kClasses; ++c) {
        if (w[c].size() != x.size()) throw Error(Errc::ShapeMismatch, "SVM weight width mismatch");
        m[c] = std::inner_product(x.begin(), x.end(), w[c].begin(), 0.0);
    }
    return m;
}

int SvmModel::predict(const Example& ex) const { return argmax(margins(ex)); }

SvmModel train_svm(std::span<const Example> train_set, SvmFeatures features, const SvmConfig& config) {
    if (train_set.empty()) throw Error(Errc::EmptySplit, "training split is empty");
    if (!(config.lambda > 0.0)) throw Error(Errc::InvalidConfig, "SVM lambda must be > 0");
    const auto weights = weights_for(config.class_weights, train_set);
    const double max_w = *std::max_element(weights.begin(), weights.end());
    const double radius = std::sqrt(max_w / config.lambda);

    std::vector<std::vector<double>> xs;
    for (const auto& ex : train_set) xs.push_back(svm_input(ex, features));
    const std::size_t d = xs[0].size();
    SvmModel model;
    model.features = features;
    for (auto& w : model.w) w.assign(d, 0.0);

    std::vector<std::size_t> order(xs.size());
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(config.seed);
    std::size_t t = 0;
    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t i : order) {
            ++t;
            const double eta = 1.0 / (config.lambda * static_cast<double>(t));
            const auto& x = xs[i];
            const double wi = weights[static_cast<std::size_t>(train_set[i].label)];
            for (std::size_t c = 0; c < kClasses; ++c) {
                auto& w = model.w[c];
                const double y = train_set[i].label == static_cast<int>(c) ? 1.0 : -1.0;
                const double margin = y * std::inner_product(x.begin(), x.end(), w.begin(), 0.0);
                const double shrink = 1.0 - eta * config.lambda;
                for (double& v : w) v *= shrink;
                if (margin < 1.0)
                    for (std::size_t k = 0; k < d; ++k) w[k] += eta * wi * y * x[k];
                const double norm = std::sqrt(std::inner_product(w.begin(), w.end(), w.begin(), 0.0));
                if (norm > radius)
                    for (double& v : w) v *= radius / norm;
            }
        }
    }
    return model;
}

MetricsReport evaluate(const SvmModel& model, std::span<const Example> xs) {
    std::vector<int> truth, pred;
    for (const auto& ex : xs) {
        truth.push_back(ex.label);
        pred.push_back(model.predict(ex));
    }
    return evaluate_predictions(truth, pred);
}

std::vector<Example> make_examples(const FeatureTable& table, LabelDim label) {
    if (table.sequences.size() != table.rows.size())
        throw Error(Errc::ShapeMismatch, "feature table has " + std::to_string(table.rows.size()) + " rows but " +
                                             std::to_string(table.sequences.size()) + " sequences");
    std::vector<Example> out;
    out.reserve(table.rows.size());
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& row = table.rows[i];
        Example ex;
        ex.sequence = table.sequences[i].steps;
        ex.personality = row.features.big5_scaled;
        ex.stimulus = row.features.stimulus_onehot;
        ex.env = {row.features.env.ambient_lux, row.features.env.temperature_celsius,
                  row.features.env.stimulus_brightness};
        ex.label = static_cast<int>(features::bin_label(row.labels[label]));
        out.push_back(ex);
    }
    return out;
}

}  // namespace gazeaffect::model
