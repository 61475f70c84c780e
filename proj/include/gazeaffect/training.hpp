#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "gazeaffect/feature_types.hpp"
#include "gazeaffect/network.hpp"

namespace gazeaffect::model {

// ---- splits ----

enum class SplitPart { Train = 0, Validation = 1, Test = 2 };
std::string_view split_part_name(SplitPart p);
SplitPart parse_split_part(std::string_view name);

struct SplitFractions {
    double train = 0.64;
    double validation = 0.16;
    double test = 0.20;
};

/// Floor of n*f per part, remainder handed out by largest fractional part
/// (ties: train, validation, test). 5 items -> (3, 1, 1).
std::array<std::size_t, 3> partition_counts(std::size_t n, const SplitFractions& f);

/// Per class: seeded shuffle, then partition_counts. Throws EmptyClass when a
/// class in 0..2 has no items.
std::vector<SplitPart> stratified_split(std::span<const int> classes, const SplitFractions& f, std::uint64_t seed);

/// Participant-disjoint split: participants (first-appearance order) are shuffled
/// and partitioned with partition_counts; every trial follows its participant.
std::vector<SplitPart> participant_split(std::span<const std::string> participant_ids, const SplitFractions& f,
                                         std::uint64_t seed);

// ---- scaling ----

enum class ScaleMode { Passthrough, MinMax, ZScore };

/// Column-wise affine scaling fitted on training rows only. Constant columns
/// scale to 0 and are listed in zero_variance.
struct ChannelScaler {
    std::vector<ScaleMode> modes;
    std::vector<double> offset;
    std::vector<double> divisor;  // range or sd; 0 for zero-variance columns
    std::vector<std::size_t> zero_variance;

    static ChannelScaler fit(std::span<const std::vector<double>> rows, std::span<const ScaleMode> modes);
    double apply(std::size_t column, double value) const;
};

/// Sequence channels: pupil and gaze z-scored, speed min-max, region one-hot
/// and saccade progress passed through. Environment z-scored. Personality (already
/// /50) and the stimulus one-hot are passed through.
struct ExampleScaler {
    ChannelScaler sequence;
    ChannelScaler env;

    static ExampleScaler fit(std::span<const Example> train);
    Example apply(const Example& ex) const;
    std::vector<Example> apply(std::span<const Example> xs) const;
    std::vector<std::string> zero_variance_channels() const;

    nlohmann::json to_json() const;
    static ExampleScaler from_json(const nlohmann::json& j);
};

// ---- loss weighting and augmentation ----

/// w_c = N / (3 n_c). Throws EmptyClass.
std::array<double, kClasses> class_weights(const std::array<std::size_t, kClasses>& counts);
std::array<std::size_t, kClasses> class_counts(std::span<const Example> xs);

/// Adds N(0, sigma) to each value in Train mode; identity in Eval mode.
void noise_augment(std::span<double> values, double sigma, std::mt19937_64& rng, Mode mode = Mode::Train);
/// Perturbs the personality and environment channels only.
void noise_augment(Example& ex, double sigma, std::mt19937_64& rng, Mode mode = Mode::Train);

// ---- metrics ----

struct MetricsReport {
    std::array<double, kClasses> f1{};
    double macro_f1 = 0.0;
    std::array<std::array<std::size_t, kClasses>, kClasses> confusion{};  // [true][predicted]
    std::size_t n = 0;

    nlohmann::json to_json() const;
};

/// Throws EmptySplit or LengthMismatch.
MetricsReport evaluate_predictions(std::span<const int> truth, std::span<const int> predicted);
std::vector<int> predict(const NetworkParams& params, std::span<const Example> xs);
MetricsReport evaluate(const NetworkParams& params, std::span<const Example> xs);

// ---- training ----

/// Tracks the best score; stop once `patience` epochs pass without a strict improvement.
class EarlyStopper {
public:
    explicit EarlyStopper(std::size_t patience);
    /// Returns true when training should stop after this epoch.
    bool update(std::size_t epoch, double score);
    std::size_t best_epoch() const { return best_epoch_; }
    double best_score() const { return best_score_; }

private:
    std::size_t patience_;
    std::size_t best_epoch_ = 0;
    double best_score_ = -1.0;
    bool seen_ = false;
};

struct EpochLog {
    std::size_t epoch = 0;
    double train_loss = 0.0;
    double val_macro_f1 = 0.0;
};

struct TrainResult {
    NetworkParams params;  // from the best validation epoch
    std::vector<EpochLog> log;
    std::size_t best_epoch = 0;
    double best_val_f1 = 0.0;
    std::array<double, kClasses> weights{};
};

/// Mini-batch Adam with per-epoch validation macro F1 and early stopping.
/// Inputs must already be scaled. Throws DivergenceDetected on a non-finite loss.
TrainResult train(const ModelConfig& config, std::span<const Example> train_set,
                  std::span<const Example> validation_set);
std::string training_log_csv(const std::vector<EpochLog>& log);

struct GridPoint {
    double learning_rate = 1e-3;
    double dropout = 0.3;
};
std::vector<GridPoint> paper_grid();
std::vector<GridPoint> extended_grid();

struct LeaderboardRow {
    GridPoint point;
    double val_macro_f1 = 0.0;
    std::size_t best_epoch = 0;
};

struct GridResult {
    ModelConfig best_config;
    TrainResult best_run;
    std::vector<LeaderboardRow> leaderboard;  // in grid order
};

/// Highest validation macro F1 wins; ties go to the lower learning rate, then the lower dropout.
std::size_t select_best(std::span<const LeaderboardRow> rows);
GridResult grid_search(const ModelConfig& base, std::span<const GridPoint> grid, std::span<const Example> train_set,
                       std::span<const Example> validation_set);
std::string leaderboard_csv(std::span<const LeaderboardRow> rows);

// ---- SVM baselines ----

enum class SvmFeatures { Stimulus, StimulusPersonality };
std::string_view svm_features_name(SvmFeatures f);
SvmFeatures parse_svm_features(std::string_view name);
std::vector<double> svm_input(const Example& ex, SvmFeatures f);

struct SvmConfig {
    double lambda = 1e-3;
    std::size_t epochs = 100;
    std::uint64_t seed = 1;
    ClassWeightsMode class_weights = ClassWeightsMode::Inverse;
};

/// One-vs-rest linear classifiers; the last weight multiplies a constant 1 input.
struct SvmModel {
    SvmFeatures features = SvmFeatures::Stimulus;
    std::array<std::vector<double>, kClasses> w;

    std::array<double, kClasses> margins(const Example& ex) const;
    int predict(const Example& ex) const;
};

/// Pegasos projected subgradient with class-weighted hinge loss.
SvmModel train_svm(std::span<const Example> train_set, SvmFeatures features, const SvmConfig& config);
MetricsReport evaluate(const SvmModel& model, std::span<const Example> xs);

// ---- data assembly ----

/// Unscaled examples for `label` from a feature table with sequences.
/// Throws ShapeMismatch when sequences are missing.
std::vector<Example> make_examples(const FeatureTable& table, LabelDim label);

}  // namespace gazeaffect::model
