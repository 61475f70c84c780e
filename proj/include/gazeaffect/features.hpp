#pragma once

#include <array>
#include <span>
#include <vector>

#include "gazeaffect/feature_types.hpp"
#include "gazeaffect/gaze_events.hpp"
#include "gazeaffect/roi.hpp"
#include "gazeaffect/types.hpp"

namespace gazeaffect::features {

enum class LabelClass { Low = 0, Medium = 1, High = 2 };
inline constexpr std::size_t kClassCount = 3;
std::string_view class_name(LabelClass c);

/// 1-3 low, 4-6 medium, 7-9 high. Throws OutOfRangeRating.
LabelClass bin_label(int rating);
/// Midpoint rating of a class (2, 5, 8).
int class_representative(LabelClass c);

/// raw / 50. Throws OutOfRangeTrait outside [0,50].
double scale_personality(double raw);
std::array<double, kTraitCount> scale_personality(const std::array<double, kTraitCount>& raw);

/// Canonical order anger, disgust, fear, happy, neutral, sad.
std::array<double, kEmotionCount> one_hot_stimulus(Emotion e);
/// Throws UnknownEmotion.
std::array<double, kEmotionCount> one_hot_stimulus(std::string_view name);

/// Static features from one trial's events. Statistics use population variance;
/// empty inputs leave zeros and set the matching missing flag. Input order does
/// not affect the result.
TrialFeatures build_trial_features(const events::EventSet& events, std::span<const double> corrected_pupils,
                                   const roi::RegionProportions& proportions, const Environment& env,
                                   const ParticipantProfile& profile, Emotion stimulus);

/// Per-sample signals feeding the sequence resampler.
struct TrialSignals {
    std::vector<double> t;
    std::vector<double> pupil;  // baseline-corrected
    std::vector<double> x;
    std::vector<double> y;
    std::vector<Region> region;
    std::vector<double> speed;             // |dpos|/dt, backward difference
    std::vector<double> saccade_progress;  // saccades completed by t / total
    double duration = 0.0;                 // grid spans [0, duration]
};

/// Builds signals from quality-filtered samples of one trial.
TrialSignals build_signals(std::span<const GazeSample> valid_samples, double pupil_baseline,
                           const events::EventSet& events, std::span<const Region> sample_regions,
                           double duration);

/// Linear interpolation of (times, values) at each grid time; constant beyond the ends.
std::vector<double> interpolate_linear(std::span<const double> times, std::span<const double> values,
                                       std::span<const double> grid);

/// 15 steps at k*duration/14. Continuous channels interpolate linearly; the region
/// channel takes the nearest sample's label. Throws TooFewSamples below 2 samples.
StepSequence resample_sequence(const TrialSignals& signals);

}  // namespace gazeaffect::features
