#include "gazeaffect/features.hpp"

#include <algorithm>
#include <cmath>

#include "gazeaffect/error.hpp"

namespace gazeaffect::features {

namespace {

struct Summary {
    double mean = 0.0;
    double median = 0.0;
    double var = 0.0;
    double min = 0.0;
    double max = 0.0;
};

// Sorting first makes every statistic independent of input order, bit for bit.
Summary summarize(std::vector<double> v) {
    Summary s;
    if (v.empty()) return s;
    std::sort(v.begin(), v.end());
    const double n = static_cast<double>(v.size());
    double sum = 0.0;
    for (double x : v) sum += x;
    s.mean = sum / n;
    double ss = 0.0;
    for (double x : v) ss += (x - s.mean) * (x - s.mean);
    s.var = ss / n;
    const std::size_t m = v.size() / 2;
    s.median = v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
    s.min = v.front();
    s.max = v.back();
    return s;
}

}  // namespace

std::string_view class_name(LabelClass c) {
    switch (c) {
        case LabelClass::Low: return "low";
        case LabelClass::Medium: return "medium";
        case LabelClass::High: return "high";
    }
    return "?";
}

LabelClass bin_label(int rating) {
    if (rating < 1 || rating > 9) throw Error(Errc::OutOfRangeRating, "rating " + std::to_string(rating));
    if (rating <= 3) return LabelClass::Low;
    if (rating <= 6) return LabelClass::Medium;
    return LabelClass::High;
}

int class_representative(LabelClass c) { return 2 + 3 * static_cast<int>(c); }

double scale_personality(double raw) {
    if (!(raw >= 0.0 && raw <= 50.0)) throw Error(Errc::OutOfRangeTrait, "trait score " + std::to_string(raw));
    return raw / 50.0;
}

std::array<double, kTraitCount> scale_personality(const std::array<double, kTraitCount>& raw) {
    std::array<double, kTraitCount> out{};
    for (std::size_t k = 0; k < kTraitCount; ++k) out[k] = scale_personality(raw[k]);
    return out;
}

std::array<double, kEmotionCount> one_hot_stimulus(Emotion e) {
    std::array<double, kEmotionCount> v{};
    v[static_cast<std::size_t>(e)] = 1.0;
    return v;
}

std::array<double, kEmotionCount> one_hot_stimulus(std::string_view name) { return one_hot_stimulus(parse_emotion(name)); }

TrialFeatures build_trial_features(const events::EventSet& events, std::span<const double> corrected_pupils,
                                   const roi::RegionProportions& proportions, const Environment& env,
                                   const ParticipantProfile& profile, Emotion stimulus) {
    TrialFeatures f;
    std::vector<double> durations, dispersions;
    for (const auto& fx : events.fixations) {
        durations.push_back(fx.duration);
        dispersions.push_back(fx.dispersion);
    }
    f.missing_fixations = durations.empty();
    const Summary dur = summarize(durations);
    const Summary disp = summarize(dispersions);
    f.fix_duration_mean = dur.mean;
    f.fix_duration_median = dur.median;
    f.fix_duration_var = dur.var;
    f.fix_dispersion_mean = disp.mean;
    f.fix_dispersion_median = disp.median;
    f.fix_dispersion_var = disp.var;

    f.missing_pupil = corrected_pupils.empty();
    const Summary pupil = summarize({corrected_pupils.begin(), corrected_pupils.end()});
    f.pupil_mean = pupil.mean;
    f.pupil_min = pupil.min;
    f.pupil_max = pupil.max;
    f.pupil_var = pupil.var;

    std::vector<double> amp, sdur, peak, acc;
    for (const auto& s : events.saccades) {
        amp.push_back(s.amplitude);
        sdur.push_back(s.duration);
        peak.push_back(s.peak_velocity);
        acc.push_back(s.mean_acceleration);
    }
    f.missing_saccades = amp.empty();
    f.saccade_amplitude_mean = summarize(amp).mean;
    f.saccade_duration_mean = summarize(sdur).mean;
    f.saccade_peak_velocity_max = summarize(peak).max;
    f.saccade_acceleration_mean = summarize(acc).mean;

    f.region_proportions = proportions.proportions;
    f.degenerate_regions = proportions.degenerate;
    f.env = env;
    f.big5_scaled = scale_personality(profile.big5_raw);
    f.stimulus_onehot = one_hot_stimulus(stimulus);
    return f;
}

TrialSignals build_signals(std::span<const GazeSample> s, double pupil_baseline, const events::EventSet& events,
                           std::span<const Region> sample_regions, double duration) {
    if (sample_regions.size() != s.size()) throw Error(Errc::ShapeMismatch, "one region label per sample required");
    TrialSignals sig;
    sig.duration = duration;
    const std::size_t n = s.size();
    sig.t.reserve(n);
    std::vector<double> saccade_ends;
    for (const auto& sc : events.saccades) saccade_ends.push_back(sc.end);
    std::sort(saccade_ends.begin(), saccade_ends.end());
    const double total = static_cast<double>(saccade_ends.size());
    for (std::size_t k = 0; k < n; ++k) {
        sig.t.push_back(s[k].t);
        sig.pupil.push_back(s[k].pupil - pupil_baseline);
        sig.x.push_back(s[k].x);
        sig.y.push_back(s[k].y);
        sig.region.push_back(sample_regions[k]);
        double speed = 0.0;
        const std::size_t a = k == 0 ? 0 : k - 1;
        const std::size_t b = k == 0 ? std::min<std::size_t>(1, n - 1) : k;
        if (b > a && s[b].t > s[a].t) speed = std::hypot(s[b].x - s[a].x, s[b].y - s[a].y) / (s[b].t - s[a].t);
        sig.speed.push_back(speed);
        const auto done = std::upper_bound(saccade_ends.begin(), saccade_ends.end(), s[k].t) - saccade_ends.begin();
        sig.saccade_progress.push_back(total > 0.0 ? static_cast<double>(done) / total : 0.0);
    }
    return sig;
}

std::vector<double> interpolate_linear(std::span<const double> times, std::span<const double> values,
                                       std::span<const double> grid) {
    if (times.size() != values.size()) throw Error(Errc::ShapeMismatch, "times and values differ in length");
    if (times.size() < 2) throw Error(Errc::TooFewSamples, "interpolation needs at least 2 samples");
    std::vector<double> out;
    out.reserve(grid.size());
    for (double g : grid) {
        if (g <= times.front()) {
            out.push_back(values.front());
            continue;
        }
        if (g >= times.back()) {
            out.push_back(values.back());
            continue;
        }
        auto hi = static_cast<std::size_t>(std::upper_bound(times.begin(), times.end(), g) - times.begin());
        std::size_t lo = hi - 1;
        const double t0 = times[lo], t1 = times[hi];
        if (g == t0 || t1 == t0) {
            out.push_back(values[lo]);
        } else {
            out.push_back(values[lo] + (values[hi] - values[lo]) * ((g - t0) / (t1 - t0)));
        }
    }
    return out;
}

StepSequence resample_sequence(const TrialSignals& sig) {
    if (sig.t.size() < 2) throw Error(Errc::TooFewSamples, "sequence resampling needs at least 2 samples");
    StepSequence seq;
    for (std::size_t k = 0; k < kSequenceSteps; ++k) {
        seq.times[k] = sig.duration * (static_cast<double>(k) / static_cast<double>(kSequenceSteps - 1));
    }
    auto put = [&](std::size_t channel, const std::vector<double>& values) {
        auto v = interpolate_linear(sig.t, values, seq.times);
        for (std::size_t k = 0; k < kSequenceSteps; ++k) seq.steps[k][channel] = v[k];
    };
    put(static_cast<std::size_t>(SeqChannel::Pupil), sig.pupil);
    put(static_cast<std::size_t>(SeqChannel::GazeX), sig.x);
    put(static_cast<std::size_t>(SeqChannel::GazeY), sig.y);
    put(static_cast<std::size_t>(SeqChannel::Speed), sig.speed);
    put(static_cast<std::size_t>(SeqChannel::SaccadeProgress), sig.saccade_progress);

    const std::size_t region0 = static_cast<std::size_t>(SeqChannel::RegionEyes);
    for (std::size_t k = 0; k < kSequenceSteps; ++k) {
        const double g = seq.times[k];
        auto hi = static_cast<std::size_t>(std::lower_bound(sig.t.begin(), sig.t.end(), g) - sig.t.begin());
        std::size_t pick;
        if (hi == 0) {
            pick = 0;
        } else if (hi == sig.t.size()) {
            pick = sig.t.size() - 1;
        } else {
            pick = (g - sig.t[hi - 1]) <= (sig.t[hi] - g) ? hi - 1 : hi;
        }
        seq.steps[k][region0 + static_cast<std::size_t>(sig.region[pick])] = 1.0;
    }
    return seq;
}

}  // namespace gazeaffect::features
