#include "gazeaffect/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <unordered_map>

#include "gazeaffect/error.hpp"
#include "gazeaffect/features.hpp"

namespace gazeaffect::stats {

namespace {

// Modified Lentz evaluation of the continued fraction for I_x(a, b).
double beta_continued_fraction(double a, double b, double x) {
    constexpr int kMaxIter = 10000;
    constexpr double kEps = 1e-16;
    constexpr double kTiny = 1e-300;
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) return h;
    }
    throw Error(Errc::ConvergenceFailure, "incomplete beta continued fraction did not converge");
}

std::optional<std::size_t> value_index(std::string_view name) {
    const auto& names = TrialFeatures::value_names();
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == name) return i;
    return std::nullopt;
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0) || !(x >= 0.0 && x <= 1.0))
        throw Error(Errc::InvalidSpec, "incomplete beta arguments out of domain");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    const double log_front =
        std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
    if (x < (a + 1.0) / (a + b + 2.0)) return std::exp(log_front) * beta_continued_fraction(a, b, x) / a;
    return 1.0 - std::exp(log_front) * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_two_sided_p(double t, double df) {
    if (!(df > 0.0)) throw Error(Errc::InvalidSpec, "t distribution needs df > 0");
    if (std::isinf(t)) return 0.0;
    if (std::isnan(t)) throw Error(Errc::InvalidSpec, "t statistic is NaN");
    const double p = regularized_incomplete_beta(0.5 * df, 0.5, df / (df + t * t));
    return std::clamp(p, 0.0, 1.0);
}

double normal_two_sided_p(double z) {
    return std::clamp(std::erfc(std::fabs(z) / std::sqrt(2.0)), 0.0, 1.0);
}

CorrelationResult correlation_from_r(double r, std::size_t n) {
    if (n < 3) throw Error(Errc::TooFewSamples, "correlation needs n >= 3, got " + std::to_string(n));
    CorrelationResult out;
    out.r = std::clamp(r, -1.0, 1.0);
    out.n = n;
    const double df = static_cast<double>(n) - 2.0;
    const double one_minus = 1.0 - out.r * out.r;
    if (one_minus <= 0.0) {
        out.p = 0.0;
        return out;
    }
    out.p = student_t_two_sided_p(out.r * std::sqrt(df / one_minus), df);
    return out;
}

CorrelationResult pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size())
        throw Error(Errc::LengthMismatch,
                    "pearson inputs differ in length: " + std::to_string(x.size()) + " vs " + std::to_string(y.size()));
    const std::size_t n = x.size();
    if (n < 3) throw Error(Errc::TooFewSamples, "correlation needs n >= 3, got " + std::to_string(n));
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx == 0.0) throw Error(Errc::ConstantInput, "first pearson input is constant");
    if (syy == 0.0) throw Error(Errc::ConstantInput, "second pearson input is constant");
    return correlation_from_r(sxy / std::sqrt(sxx * syy), n);
}

Metric label_metric(LabelDim dim) {
    return [dim](const FeatureRow& r) -> std::optional<double> { return static_cast<double>(r.labels[dim]); };
}

Metric binned_label_metric(LabelDim dim) {
    return [dim](const FeatureRow& r) -> std::optional<double> {
        return static_cast<double>(static_cast<int>(features::bin_label(r.labels[dim])));
    };
}

Metric trait_metric(Trait trait) {
    return [trait](const FeatureRow& r) -> std::optional<double> {
        return r.features.big5_scaled[static_cast<std::size_t>(trait)];
    };
}

Metric feature_metric(std::string_view name) {
    const auto idx = value_index(name);
    if (!idx) throw Error(Errc::InvalidConfig, "unknown feature '" + std::string(name) + "'");
    const std::size_t i = *idx;
    return [i, name = std::string(name)](const FeatureRow& r) -> std::optional<double> {
        const auto& f = r.features;
        if (name.starts_with("fix_") && f.missing_fixations) return std::nullopt;
        if (name.starts_with("saccade_") && f.missing_saccades) return std::nullopt;
        if (name.starts_with("pupil_") && f.missing_pupil) return std::nullopt;
        if (name.starts_with("prop_") && f.degenerate_regions) return std::nullopt;
        return f.values()[i];
    };
}

Aggregate participant_aggregate(std::span<const FeatureRow> rows, const Metric& metric,
                                std::optional<Emotion> stimulus) {
    if (rows.empty()) throw Error(Errc::EmptyDataset, "no trials to aggregate");
    std::vector<std::string> order;
    std::unordered_map<std::string, std::pair<double, std::size_t>> acc;
    for (const auto& row : rows) {
        if (stimulus && row.stimulus != *stimulus) continue;
        auto [it, inserted] = acc.try_emplace(row.participant_id, 0.0, 0);
        if (inserted) order.push_back(row.participant_id);
        if (auto v = metric(row)) {
            it->second.first += *v;
            ++it->second.second;
        }
    }
    Aggregate out;
    for (const auto& id : order) {
        const auto& [sum, count] = acc.at(id);
        if (count == 0) {
            ++out.excluded;
            continue;
        }
        out.values.push_back({id, sum / static_cast<double>(count)});
    }
    return out;
}

CorrelationResult participant_correlation(std::span<const FeatureRow> rows, const Metric& a, const Metric& b,
                                          std::optional<Emotion> stimulus) {
    const Aggregate agg_a = participant_aggregate(rows, a, stimulus);
    const Aggregate agg_b = participant_aggregate(rows, b, stimulus);
    std::unordered_map<std::string, double> b_by_id;
    for (const auto& v : agg_b.values) b_by_id.emplace(v.participant_id, v.value);
    std::vector<double> xs, ys;
    for (const auto& v : agg_a.values) {
        auto it = b_by_id.find(v.participant_id);
        if (it == b_by_id.end()) continue;
        xs.push_back(v.value);
        ys.push_back(it->second);
    }
    if (xs.size() < 3)
        throw Error(Errc::TooFewSamples,
                    "only " + std::to_string(xs.size()) + " participants available" +
                        (stimulus ? " for stimulus " + std::string(emotion_name(*stimulus)) : std::string()));
    return pearson(xs, ys);
}

CorrelationResult stimulus_conditional_correlation(std::span<const FeatureRow> rows, std::optional<Emotion> stimulus,
                                                   Trait trait, LabelDim label) {
    return participant_correlation(rows, trait_metric(trait), label_metric(label), stimulus);
}

std::vector<double> bonferroni(std::span<const double> p_values, std::size_t m) {
    if (m == 0 || m < p_values.size())
        throw Error(Errc::InvalidConfig, "bonferroni m=" + std::to_string(m) + " is below the number of tests " +
                                             std::to_string(p_values.size()));
    std::vector<double> out;
    out.reserve(p_values.size());
    for (double p : p_values) out.push_back(std::min(1.0, p * static_cast<double>(m)));
    return out;
}

double agreement(std::span<const FeatureRow> rows, LabelDim dim, std::size_t* tied_clips) {
    if (rows.empty()) throw Error(Errc::EmptyDataset, "no trials for agreement");
    struct Clip {
        std::array<std::size_t, features::kClassCount> counts{};
        std::set<std::string> raters;
    };
    std::map<std::string, Clip> clips;
    for (const auto& row : rows) {
        const std::string key =
            row.clip_id.empty() ? "stimulus:" + std::string(emotion_name(row.stimulus)) : row.clip_id;
        auto& clip = clips[key];
        ++clip.counts[static_cast<std::size_t>(features::bin_label(row.labels[dim]))];
        clip.raters.insert(row.participant_id);
    }
    std::size_t matched = 0, total = 0, tied = 0;
    // Tie preference: medium, then low, then high.
    constexpr std::array<std::size_t, 3> kPreference = {1, 0, 2};
    for (const auto& [key, clip] : clips) {
        if (clip.raters.size() < 2)
            throw Error(Errc::InsufficientRaters, "clip '" + key + "' has " + std::to_string(clip.raters.size()) +
                                                      " rater(s); need at least 2");
        const std::size_t best = *std::max_element(clip.counts.begin(), clip.counts.end());
        std::size_t n_best = 0;
        std::size_t mode = 0;
        bool found = false;
        for (std::size_t c : kPreference) {
            if (clip.counts[c] != best) continue;
            ++n_best;
            if (!found) {
                mode = c;
                found = true;
            }
        }
        if (n_best > 1) ++tied;
        matched += clip.counts[mode];
        for (std::size_t c : clip.counts) total += c;
    }
    if (tied_clips) *tied_clips = tied;
    return 100.0 * static_cast<double>(matched) / static_cast<double>(total);
}

AgreementResult agreement_all(std::span<const FeatureRow> rows) {
    AgreementResult out;
    std::set<std::string> keys;
    for (const auto& row : rows)
        keys.insert(row.clip_id.empty() ? "stimulus:" + std::string(emotion_name(row.stimulus)) : row.clip_id);
    out.clips = keys.size();
    for (LabelDim d : kAllLabelDims) {
        const auto i = static_cast<std::size_t>(d);
        out.percent[i] = agreement(rows, d, &out.tied_clips[i]);
    }
    return out;
}

}  // namespace gazeaffect::stats
