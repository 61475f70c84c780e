#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "gazeaffect/types.hpp"

namespace gazeaffect {

/// Facial regions; `Outside` is last so the first four index the hull set.
enum class Region { Eyes = 0, Eyebrows, Nose, Mouth, Outside };
inline constexpr std::size_t kRegionCount = 5;
inline constexpr std::size_t kFaceRegionCount = 4;
std::string_view region_name(Region r);

/// Static per-trial feature vector.
struct TrialFeatures {
    double fix_duration_mean = 0.0;
    double fix_duration_median = 0.0;
    double fix_duration_var = 0.0;
    double fix_dispersion_mean = 0.0;
    double fix_dispersion_median = 0.0;
    double fix_dispersion_var = 0.0;
    double pupil_mean = 0.0;
    double pupil_min = 0.0;
    double pupil_max = 0.0;
    double pupil_var = 0.0;
    double saccade_amplitude_mean = 0.0;
    double saccade_duration_mean = 0.0;
    double saccade_peak_velocity_max = 0.0;
    double saccade_acceleration_mean = 0.0;
    std::array<double, kRegionCount> region_proportions{0.2, 0.2, 0.2, 0.2, 0.2};
    Environment env;
    std::array<double, kTraitCount> big5_scaled{};
    std::array<double, kEmotionCount> stimulus_onehot{};

    bool missing_fixations = false;
    bool missing_saccades = false;
    bool missing_pupil = false;
    bool degenerate_regions = false;

    static constexpr std::size_t kValueCount = 14 + kRegionCount + 3 + kTraitCount + kEmotionCount;
    static const std::array<std::string_view, kValueCount>& value_names();

    std::array<double, kValueCount> values() const;
    static TrialFeatures from_values(const std::array<double, kValueCount>& v);
};

inline constexpr std::size_t kSequenceSteps = 15;
inline constexpr std::size_t kSequenceChannels = 10;

/// Channel layout of a StepSequence step.
enum class SeqChannel : std::size_t {
    Pupil = 0,
    GazeX = 1,
    GazeY = 2,
    RegionEyes = 3,  // 3..7 region one-hot
    Speed = 8,
    SaccadeProgress = 9,
};
const std::array<std::string_view, kSequenceChannels>& sequence_channel_names();

using SequenceStep = std::array<double, kSequenceChannels>;

struct StepSequence {
    std::array<SequenceStep, kSequenceSteps> steps{};
    std::array<double, kSequenceSteps> times{};
};

/// One trial as consumed by statistics and models.
struct FeatureRow {
    std::string trial_id;
    std::string participant_id;
    std::string clip_id;
    Emotion stimulus = Emotion::Neutral;
    LabelRecord labels;
    TrialFeatures features;
};

struct FeatureTable {
    std::vector<FeatureRow> rows;
    std::vector<StepSequence> sequences;  // parallel to rows; may be empty
};

}  // namespace gazeaffect
