#include "gazeaffect/error.hpp"
#include "gazeaffect/feature_types.hpp"
#include "gazeaffect/types.hpp"

#include <algorithm>

namespace gazeaffect {

std::string_view errc_name(Errc code) {
    switch (code) {
        case Errc::MalformedRow: return "MalformedRow";
        case Errc::NonMonotonicTime: return "NonMonotonicTime";
        case Errc::UnknownEmotion: return "UnknownEmotion";
        case Errc::WrongPointCount: return "WrongPointCount";
        case Errc::MissingTrial: return "MissingTrial";
        case Errc::OrphanTrial: return "OrphanTrial";
        case Errc::IoFailure: return "IoFailure";
        case Errc::ZeroScreenDimension: return "ZeroScreenDimension";
        case Errc::NoNeutralTrials: return "NoNeutralTrials";
        case Errc::TooFewSamples: return "TooFewSamples";
        case Errc::DegenerateWindow: return "DegenerateWindow";
        case Errc::OutOfRangeRating: return "OutOfRangeRating";
        case Errc::OutOfRangeTrait: return "OutOfRangeTrait";
        case Errc::EmptyDataset: return "EmptyDataset";
        case Errc::ConstantInput: return "ConstantInput";
        case Errc::LengthMismatch: return "LengthMismatch";
        case Errc::SingularDesign: return "SingularDesign";
        case Errc::ConvergenceFailure: return "ConvergenceFailure";
        case Errc::InsufficientRaters: return "InsufficientRaters";
        case Errc::EmptyClass: return "EmptyClass";
        case Errc::ShapeMismatch: return "ShapeMismatch";
        case Errc::NonFiniteActivation: return "NonFiniteActivation";
        case Errc::NonFiniteGradient: return "NonFiniteGradient";
        case Errc::DivergenceDetected: return "DivergenceDetected";
        case Errc::EmptySplit: return "EmptySplit";
        case Errc::InvalidSpec: return "InvalidSpec";
        case Errc::InvalidConfig: return "InvalidConfig";
        case Errc::MissingInput: return "MissingInput";
    }
    return "Unknown";
}

std::string_view emotion_name(Emotion e) {
    switch (e) {
        case Emotion::Anger: return "anger";
        case Emotion::Disgust: return "disgust";
        case Emotion::Fear: return "fear";
        case Emotion::Happy: return "happy";
        case Emotion::Neutral: return "neutral";
        case Emotion::Sad: return "sad";
    }
    return "?";
}

Emotion parse_emotion(std::string_view name) {
    for (Emotion e : kAllEmotions) {
        if (emotion_name(e) == name) return e;
    }
    throw Error(Errc::UnknownEmotion, "'" + std::string(name) + "'");
}

std::string_view trait_name(Trait t) {
    switch (t) {
        case Trait::Openness: return "openness";
        case Trait::Conscientiousness: return "conscientiousness";
        case Trait::Extraversion: return "extraversion";
        case Trait::Agreeableness: return "agreeableness";
        case Trait::Neuroticism: return "neuroticism";
    }
    return "?";
}

std::string_view label_dim_name(LabelDim d) {
    switch (d) {
        case LabelDim::PerceivedValence: return "perceived_valence";
        case LabelDim::PerceivedArousal: return "perceived_arousal";
        case LabelDim::FeltValence: return "felt_valence";
        case LabelDim::FeltArousal: return "felt_arousal";
    }
    return "?";
}

std::optional<LabelDim> parse_label_dim(std::string_view name) {
    for (LabelDim d : kAllLabelDims) {
        if (label_dim_name(d) == name) return d;
    }
    return std::nullopt;
}

std::string_view region_name(Region r) {
    switch (r) {
        case Region::Eyes: return "eyes";
        case Region::Eyebrows: return "eyebrows";
        case Region::Nose: return "nose";
        case Region::Mouth: return "mouth";
        case Region::Outside: return "outside";
    }
    return "?";
}

const ParticipantProfile* Dataset::find_participant(std::string_view id) const {
    auto it = std::find_if(participants.begin(), participants.end(),
                           [&](const ParticipantProfile& p) { return p.participant_id == id; });
    return it == participants.end() ? nullptr : &*it;
}

const std::array<std::string_view, TrialFeatures::kValueCount>& TrialFeatures::value_names() {
    static const std::array<std::string_view, kValueCount> names = {
        "fix_duration_mean", "fix_duration_median", "fix_duration_var",
        "fix_dispersion_mean", "fix_dispersion_median", "fix_dispersion_var",
        "pupil_mean", "pupil_min", "pupil_max", "pupil_var",
        "saccade_amplitude_mean", "saccade_duration_mean", "saccade_peak_velocity_max",
        "saccade_acceleration_mean",
        "prop_eyes", "prop_eyebrows", "prop_nose", "prop_mouth", "prop_outside",
        "ambient_lux", "temperature_celsius", "stimulus_brightness",
        "openness", "conscientiousness", "extraversion", "agreeableness", "neuroticism",
        "stim_anger", "stim_disgust", "stim_fear", "stim_happy", "stim_neutral", "stim_sad",
    };
    return names;
}

std::array<double, TrialFeatures::kValueCount> TrialFeatures::values() const {
    std::array<double, kValueCount> v{};
    std::size_t k = 0;
    for (double x : {fix_duration_mean, fix_duration_median, fix_duration_var, fix_dispersion_mean,
                     fix_dispersion_median, fix_dispersion_var, pupil_mean, pupil_min, pupil_max, pupil_var,
                     saccade_amplitude_mean, saccade_duration_mean, saccade_peak_velocity_max,
                     saccade_acceleration_mean}) {
        v[k++] = x;
    }
    for (double x : region_proportions) v[k++] = x;
    v[k++] = env.ambient_lux;
    v[k++] = env.temperature_celsius;
    v[k++] = env.stimulus_brightness;
    for (double x : big5_scaled) v[k++] = x;
    for (double x : stimulus_onehot) v[k++] = x;
    return v;
}

TrialFeatures TrialFeatures::from_values(const std::array<double, kValueCount>& v) {
    TrialFeatures f;
    std::size_t k = 0;
    for (double* dst : {&f.fix_duration_mean, &f.fix_duration_median, &f.fix_duration_var,
                        &f.fix_dispersion_mean, &f.fix_dispersion_median, &f.fix_dispersion_var,
                        &f.pupil_mean, &f.pupil_min, &f.pupil_max, &f.pupil_var,
                        &f.saccade_amplitude_mean, &f.saccade_duration_mean,
                        &f.saccade_peak_velocity_max, &f.saccade_acceleration_mean}) {
        *dst = v[k++];
    }
    for (double& x : f.region_proportions) x = v[k++];
    f.env.ambient_lux = v[k++];
    f.env.temperature_celsius = v[k++];
    f.env.stimulus_brightness = v[k++];
    for (double& x : f.big5_scaled) x = v[k++];
    for (double& x : f.stimulus_onehot) x = v[k++];
    return f;
}

const std::array<std::string_view, kSequenceChannels>& sequence_channel_names() {
    static const std::array<std::string_view, kSequenceChannels> names = {
        "pupil", "gaze_x", "gaze_y", "in_eyes", "in_eyebrows", "in_nose", "in_mouth", "in_outside",
        "speed", "saccade_progress"};
    return names;
}

}  // namespace gazeaffect
