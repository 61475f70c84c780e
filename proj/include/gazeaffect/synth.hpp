#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "gazeaffect/config.hpp"
#include "gazeaffect/lme.hpp"
#include "gazeaffect/types.hpp"

namespace gazeaffect::synth {

/// Ground-truth effects. Correlation-scale values are trial-level correlations
/// with the latent rating (within stimulus); they are turned into slopes by
/// slope = r * sigma_outcome / sigma_predictor with unit-variance predictors.
struct PlantedEffects {
    std::array<double, kTraitCount> trait_felt_valence{0.0, 0.26, 0.0, 0.33, -0.29};
    double happy_conscientiousness_perceived_valence = 0.37;
    double pupil_mean_arousal = 0.061;   // rating units per mm, both arousal channels
    double pupil_mean_valence = -0.048;  // rating units per mm, both valence channels
    double pupil_var_valence = -0.32;    // corr(log fluctuation amplitude, perceived valence)
    double mouth_felt_valence = 1.0;     // sign of the dwell tilt toward the mouth
    double eye_felt_valence = -1.0;      // sign of the dwell tilt toward the eyes
    double region_tilt = 0.4;            // log-weight change per sd of felt valence
    double sigma_u = 0.8;                // random intercept sd (valence and arousal each)
    /// Residual sd per label channel (perceived valence, perceived arousal, felt valence, felt arousal).
    std::array<double, kLabelDimCount> sigma_e{0.7, 1.2, 1.0, 1.5};
    /// (valence, arousal) base per stimulus in canonical emotion order.
    std::array<std::array<double, 2>, kEmotionCount> stimulus_base{
        {{3.0, 6.5}, {3.0, 5.5}, {3.2, 6.5}, {7.2, 6.0}, {5.0, 3.8}, {3.0, 4.0}}};
    double pupil_mean_sd = 0.3;  // mm, trial-to-trial corrected pupil mean

    /// Labels drawn uniformly on 1..9, independent of everything else.
    bool independent_labels = false;
    /// Every rating equals the class midpoint of (stimulus index mod 3).
    bool deterministic_stimulus_labels = false;

    static PlantedEffects none();
    /// Reads the `effects` section. Throws InvalidConfig.
    static PlantedEffects from_config(const config::Document& doc);
    void validate() const;
};

struct CohortSpec {
    std::size_t n_participants = 73;
    std::size_t trials_per_participant = 84;
    double sample_rate = 150.0;
    double duration_min = 2.0;
    double duration_max = 4.0;
    double landmark_rate = 1.0;  // frames per second
    std::uint64_t seed = 1;

    /// Reads the `cohort` section. Throws InvalidSpec.
    static CohortSpec from_config(const config::Document& doc);
    void validate() const;
};

/// SplitMix64 finalizer; used to derive independent substream seeds.
std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t sub = 0);

/// Canonical frontal face in normalized screen coordinates.
LandmarkFrame canonical_face();

/// Participants, trials with gaze traces and labels, and landmark frames.
/// Clip c (0-based) shows stimulus kAllEmotions[c % 6]. Throws InvalidSpec.
Dataset generate_cohort(const CohortSpec& spec, const PlantedEffects& effects);

struct CohortSummary {
    std::size_t participants = 0;
    std::size_t trials = 0;
    /// [label dim][class]
    std::array<std::array<std::size_t, 3>, kLabelDimCount> class_counts{};
    std::array<std::size_t, kEmotionCount> emotion_counts{};
    /// Smallest and largest per-participant count of any one emotion.
    std::size_t min_emotion_per_participant = 0;
    std::size_t max_emotion_per_participant = 0;
    /// Participant-level Pearson r [trait][label]; NaN when not computable.
    std::array<std::array<double, kLabelDimCount>, kTraitCount> trait_label_r{};
};

CohortSummary describe_cohort(const Dataset& dataset);
std::string format_summary(const CohortSummary& s);

/// Balanced random-intercept panel y = b0 + b1 x + u_j + e with x ~ N(0, x_sd^2).
stats::LmeData simulate_lme_panel(std::size_t participants, std::size_t trials, double beta0, double beta1,
                                  double sigma_u, double sigma_e, double x_sd, std::uint64_t seed);

}  // namespace gazeaffect::synth
