#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gazeaffect/feature_types.hpp"
#include "gazeaffect/types.hpp"

namespace gazeaffect::stats {

/// I_x(a, b) by Lentz's continued fraction, |error| < 1e-10 for a, b > 0.
double regularized_incomplete_beta(double a, double b, double x);

/// Two-sided tail P(|T| >= |t|) for Student's t with `df` degrees of freedom.
double student_t_two_sided_p(double t, double df);

/// 2 * (1 - Phi(|z|)).
double normal_two_sided_p(double z);

struct CorrelationResult {
    double r = 0.0;
    std::size_t n = 0;
    double p = 1.0;
};

/// p-value for a given coefficient and sample size via t = r sqrt((n-2)/(1-r^2)).
CorrelationResult correlation_from_r(double r, std::size_t n);

/// Throws LengthMismatch, ConstantInput, or TooFewSamples (n < 3).
CorrelationResult pearson(std::span<const double> x, std::span<const double> y);

/// Per-trial metric; nullopt marks a missing value.
using Metric = std::function<std::optional<double>(const FeatureRow&)>;

Metric label_metric(LabelDim dim);
/// Binned class index (0 low, 1 medium, 2 high).
Metric binned_label_metric(LabelDim dim);
Metric trait_metric(Trait trait);
/// Any TrialFeatures column by name; trials flagged missing for that family yield nullopt.
Metric feature_metric(std::string_view name);

struct ParticipantValue {
    std::string participant_id;
    double value = 0.0;
};

struct Aggregate {
    std::vector<ParticipantValue> values;  // first-appearance order
    std::size_t excluded = 0;              // participants whose metric was missing on every trial
};

/// Mean of `metric` per participant over trials passing `stimulus` (all when nullopt).
/// Throws EmptyDataset when no rows are given.
Aggregate participant_aggregate(std::span<const FeatureRow> rows, const Metric& metric,
                                std::optional<Emotion> stimulus = std::nullopt);

/// Pearson correlation of two per-participant means over participants having both.
CorrelationResult participant_correlation(std::span<const FeatureRow> rows, const Metric& a, const Metric& b,
                                          std::optional<Emotion> stimulus = std::nullopt);

/// Trait vs label means over one stimulus's trials (or all trials when nullopt).
CorrelationResult stimulus_conditional_correlation(std::span<const FeatureRow> rows, std::optional<Emotion> stimulus,
                                                   Trait trait, LabelDim label);

/// min(1, p*m) elementwise. Throws InvalidConfig when m < p.size() or m == 0.
std::vector<double> bonferroni(std::span<const double> p_values, std::size_t m);

struct AgreementResult {
    std::array<double, kLabelDimCount> percent{};
    std::array<std::size_t, kLabelDimCount> tied_clips{};  // clips whose mode needed the tie rule
    std::size_t clips = 0;
};

/// 100 x fraction of (participant, clip) binned ratings equal to the clip's modal
/// class; ties favour medium, then low. Clips are grouped by clip_id, or by
/// stimulus emotion when clip ids are absent. Throws InsufficientRaters when a
/// clip has fewer than 2 distinct participants.
double agreement(std::span<const FeatureRow> rows, LabelDim dim, std::size_t* tied_clips = nullptr);
AgreementResult agreement_all(std::span<const FeatureRow> rows);

}  // namespace gazeaffect::stats
