#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gazeaffect/config.hpp"
#include "gazeaffect/feature_types.hpp"

namespace gazeaffect::model {

inline constexpr std::size_t kClasses = 3;
inline constexpr std::size_t kPersonalityDim = kTraitCount;
inline constexpr std::size_t kStimulusDim = kEmotionCount;
inline constexpr std::size_t kEnvDim = 3;

/// Which static streams feed the fusion layer. The sequence and environment
/// streams are always present.
enum class Variant { Eye, EyePersonality, EyeStimulus, Full };
std::string_view variant_name(Variant v);
/// Throws InvalidConfig.
Variant parse_variant(std::string_view name);
bool uses_personality(Variant v);
bool uses_stimulus(Variant v);

enum class ClassWeightsMode { Inverse, Uniform };

struct ModelConfig {
    double learning_rate = 1e-3;
    double dropout = 0.3;
    double noise_sigma = 0.05;
    double weight_decay = 0.0;  // L2 penalty added to the gradient
    std::size_t lstm_hidden = 32;
    std::size_t personality_width = 8;
    std::size_t stimulus_width = 8;
    std::size_t env_width = 4;
    std::size_t fusion_width = 32;
    std::size_t batch_size = 32;
    std::size_t max_epochs = 200;
    std::size_t patience = 10;
    std::uint64_t seed = 1;
    ClassWeightsMode class_weights = ClassWeightsMode::Inverse;
    Variant variant = Variant::Full;

    /// Reads the `model` section. Throws InvalidConfig on violated invariants.
    static ModelConfig from_config(const config::Document& doc);
    void validate() const;
};

/// One trial's network inputs, already scaled.
struct Example {
    std::array<SequenceStep, kSequenceSteps> sequence{};
    std::array<double, kPersonalityDim> personality{};
    std::array<double, kStimulusDim> stimulus{};
    std::array<double, kEnvDim> env{};
    int label = 0;  // class index 0..2
};

/// Row-major matrix; biases are single-column.
struct Tensor {
    std::string name;
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

/// LSTM gates are stacked input, forget, cell, output in the 4H rows. Streams
/// absent from the variant have zero width.
struct NetworkParams {
    Tensor lstm_w, lstm_u, lstm_b;
    Tensor pers_w, pers_b;
    Tensor stim_w, stim_b;
    Tensor env_w, env_b;
    Tensor fuse_w, fuse_b;
    Tensor out_w, out_b;
    Variant variant = Variant::Full;

    /// Zero-filled tensors shaped by `config`.
    static NetworkParams zeros(const ModelConfig& config);
    /// Glorot-uniform weights, zero biases, forget-gate bias 1.
    static NetworkParams initialize(const ModelConfig& config, std::mt19937_64& rng);

    std::vector<Tensor*> tensors();
    std::vector<const Tensor*> tensors() const;
    std::size_t hidden() const { return lstm_u.cols; }
    std::size_t parameter_count() const;
    void fill(double value);
    bool all_finite() const;
};

/// Text checkpoint: header, then per tensor `name rows cols` and row-major values.
void save_params(const NetworkParams& params, const std::filesystem::path& path);
NetworkParams load_params(const std::filesystem::path& path);
std::string serialize_params(const NetworkParams& params);
NetworkParams parse_params(std::string_view text);

enum class Mode { Train, Eval };

/// Inverted-dropout keep mask for the fusion layer (entries 0 or 1/(1-rate)).
std::vector<double> dropout_mask(std::size_t width, double rate, std::mt19937_64& rng);

/// Class probabilities. In Train mode dropout is sampled from `rng`.
/// Throws ShapeMismatch or NonFiniteActivation.
std::array<double, kClasses> forward(const NetworkParams& params, const Example& ex, Mode mode, double dropout,
                                     std::mt19937_64* rng = nullptr);

/// -w_y log(max(p_y, 1e-12)).
double loss(const std::array<double, kClasses>& probs, int true_class, const std::array<double, kClasses>& weights);

/// Mean weighted cross-entropy over `batch` with fixed dropout masks (one per
/// example, or none for no dropout). Accumulates the exact gradient into `grad`
/// (shaped like params) when non-null. Throws NonFiniteGradient.
double batch_loss(const NetworkParams& params, std::span<const Example> batch,
                  const std::array<double, kClasses>& weights, std::span<const std::vector<double>> masks,
                  NetworkParams* grad);

class Adam {
public:
    Adam(const NetworkParams& shape, double learning_rate, double beta1 = 0.9, double beta2 = 0.999,
         double epsilon = 1e-8);
    void step(NetworkParams& params, const NetworkParams& grad);
    std::size_t steps() const { return t_; }

private:
    double lr_, b1_, b2_, eps_;
    std::size_t t_ = 0;
    std::vector<std::vector<double>> m_, v_;
};

}  // namespace gazeaffect::model
