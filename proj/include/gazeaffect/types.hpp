#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gazeaffect {

/// Stimulus emotions in canonical one-hot order.
enum class Emotion { Anger = 0, Disgust, Fear, Happy, Neutral, Sad };

inline constexpr std::size_t kEmotionCount = 6;
inline constexpr std::array<Emotion, kEmotionCount> kAllEmotions = {
    Emotion::Anger, Emotion::Disgust, Emotion::Fear, Emotion::Happy, Emotion::Neutral, Emotion::Sad};

std::string_view emotion_name(Emotion e);
/// Throws Error(UnknownEmotion).
Emotion parse_emotion(std::string_view name);

struct Point {
    double x = 0.0;
    double y = 0.0;
};

struct GazeSample {
    double t = 0.0;  // seconds from trial onset
    double x = 0.0;  // normalized screen coordinates
    double y = 0.0;
    double pupil = 0.0;  // mm, raw
    bool valid = true;
};

inline constexpr std::size_t kTraitCount = 5;
enum class Trait { Openness = 0, Conscientiousness, Extraversion, Agreeableness, Neuroticism };
std::string_view trait_name(Trait t);

struct ParticipantProfile {
    std::string participant_id;
    std::array<double, kTraitCount> big5_raw{};  // each in [0,50]
};

struct Environment {
    double ambient_lux = 0.0;
    double temperature_celsius = 0.0;
    double stimulus_brightness = 0.0;
};

/// The four rating channels; order is also the column order in labels.csv.
enum class LabelDim { PerceivedValence = 0, PerceivedArousal, FeltValence, FeltArousal };
inline constexpr std::size_t kLabelDimCount = 4;
inline constexpr std::array<LabelDim, kLabelDimCount> kAllLabelDims = {
    LabelDim::PerceivedValence, LabelDim::PerceivedArousal, LabelDim::FeltValence, LabelDim::FeltArousal};
std::string_view label_dim_name(LabelDim d);
std::optional<LabelDim> parse_label_dim(std::string_view name);

struct LabelRecord {
    std::array<int, kLabelDimCount> ratings{5, 5, 5, 5};  // each in 1..9

    int operator[](LabelDim d) const { return ratings[static_cast<std::size_t>(d)]; }
    int& operator[](LabelDim d) { return ratings[static_cast<std::size_t>(d)]; }
};

struct TrialRecord {
    std::string trial_id;
    std::string participant_id;
    std::string clip_id;  // optional; empty when unknown
    Emotion stimulus = Emotion::Neutral;
    double duration = 0.0;
    Environment env;
    std::vector<GazeSample> samples;
    LabelRecord labels;
};

inline constexpr std::size_t kLandmarkCount = 68;

struct LandmarkFrame {
    std::string trial_id;
    double frame_time = 0.0;
    std::array<Point, kLandmarkCount> points{};
};

/// Canonical in-memory dataset. Treated as immutable once loaded.
struct Dataset {
    std::vector<ParticipantProfile> participants;
    std::vector<TrialRecord> trials;
    std::vector<LandmarkFrame> landmarks;

    const ParticipantProfile* find_participant(std::string_view id) const;
};

}  // namespace gazeaffect
