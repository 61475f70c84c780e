#pragma once

#include <span>
#include <string>
#include <vector>

#include "gazeaffect/types.hpp"

namespace gazeaffect::events {

struct FixationEvent {
    double start = 0.0;
    double end = 0.0;
    Point centroid;
    double dispersion = 0.0;  // I-DT (max x - min x) + (max y - min y)
    double duration = 0.0;
    double mean_pupil_corrected = 0.0;
    std::size_t first_sample = 0;  // indices into the filtered sample list, inclusive
    std::size_t last_sample = 0;
};

struct SaccadeEvent {
    double start = 0.0;
    double end = 0.0;
    double amplitude = 0.0;  // normalized screen units
    double duration = 0.0;
    double peak_velocity = 0.0;      // units/s
    double mean_acceleration = 0.0;  // units/s^2
};

struct EventSet {
    std::vector<FixationEvent> fixations;
    std::vector<SaccadeEvent> saccades;
};

struct PupilBaseline {
    std::string participant_id;
    double baseline = 0.0;  // mm
};

struct DetectorConfig {
    double dispersion_threshold = 0.03;  // normalized units
    double min_duration = 0.100;         // s
    double max_gap = 0.075;              // s; longer gaps in valid data split fixations
};

/// Keeps the samples flagged valid, in input order.
std::vector<GazeSample> quality_filter(std::span<const GazeSample> samples);

struct NormalizedGaze {
    std::vector<GazeSample> samples;
    std::size_t offscreen_count = 0;
};

/// Pixel coordinates to [0,1]; out-of-range values are clamped and counted.
NormalizedGaze normalize_gaze(std::span<const GazeSample> samples, double screen_width_px,
                              double screen_height_px);

/// Pooled mean of valid pupil samples across the participant's neutral trials.
PupilBaseline compute_baseline(std::span<const TrialRecord> participant_trials);

/// Signed pupil - baseline.
inline double correct_pupil(const GazeSample& sample, const PupilBaseline& baseline) {
    return sample.pupil - baseline.baseline;
}

/// I-DT fixation detection on quality-filtered, normalized samples. Gaps between
/// consecutive fixations whose endpoints differ by more than the dispersion
/// threshold become saccades. Fixation mean pupil is corrected against `baseline`
/// (pass 0 to keep raw values).
EventSet detect_fixations(std::span<const GazeSample> samples, const DetectorConfig& config,
                          double pupil_baseline = 0.0);

/// Kinematics over a saccade window (>= 2 samples, positive time span).
SaccadeEvent saccade_metrics(std::span<const GazeSample> window);

/// I-DT dispersion of a sample window.
double dispersion(std::span<const GazeSample> window);

/// Optional conversion of normalized amplitude to visual degrees.
struct ViewingGeometry {
    double screen_width_cm = 0.0;
    double viewing_distance_cm = 0.0;
};
double amplitude_to_degrees(double normalized_amplitude, const ViewingGeometry& geometry);

}  // namespace gazeaffect::events
