#include "gazeaffect/gaze_events.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gazeaffect/error.hpp"

namespace gazeaffect::events {

namespace {

double distance(const GazeSample& a, const GazeSample& b) { return std::hypot(b.x - a.x, b.y - a.y); }

struct Bounds {
    double min_x, max_x, min_y, max_y;

    explicit Bounds(const GazeSample& s) : min_x(s.x), max_x(s.x), min_y(s.y), max_y(s.y) {}

    void add(const GazeSample& s) {
        min_x = std::min(min_x, s.x);
        max_x = std::max(max_x, s.x);
        min_y = std::min(min_y, s.y);
        max_y = std::max(max_y, s.y);
    }

    double dispersion() const { return (max_x - min_x) + (max_y - min_y); }

    double dispersion_with(const GazeSample& s) const {
        return (std::max(max_x, s.x) - std::min(min_x, s.x)) + (std::max(max_y, s.y) - std::min(min_y, s.y));
    }
};

FixationEvent make_fixation(std::span<const GazeSample> s, std::size_t first, std::size_t last, double disp,
                            double pupil_baseline) {
    FixationEvent f;
    f.first_sample = first;
    f.last_sample = last;
    f.start = s[first].t;
    f.end = s[last].t;
    f.duration = f.end - f.start;
    f.dispersion = disp;
    double sx = 0.0, sy = 0.0, sp = 0.0;
    for (std::size_t k = first; k <= last; ++k) {
        sx += s[k].x;
        sy += s[k].y;
        sp += s[k].pupil;
    }
    const double n = static_cast<double>(last - first + 1);
    f.centroid = {sx / n, sy / n};
    f.mean_pupil_corrected = sp / n - pupil_baseline;
    return f;
}

}  // namespace

std::vector<GazeSample> quality_filter(std::span<const GazeSample> samples) {
    std::vector<GazeSample> out;
    out.reserve(samples.size());
    std::copy_if(samples.begin(), samples.end(), std::back_inserter(out), [](const GazeSample& s) { return s.valid; });
    return out;
}

NormalizedGaze normalize_gaze(std::span<const GazeSample> samples, double screen_width_px, double screen_height_px) {
    if (!(screen_width_px > 0.0) || !(screen_height_px > 0.0)) {
        throw Error(Errc::ZeroScreenDimension, "screen dimensions must be positive");
    }
    NormalizedGaze out;
    out.samples.reserve(samples.size());
    for (GazeSample s : samples) {
        double x = s.x / screen_width_px;
        double y = s.y / screen_height_px;
        double cx = std::clamp(x, 0.0, 1.0);
        double cy = std::clamp(y, 0.0, 1.0);
        if (cx != x || cy != y) ++out.offscreen_count;
        s.x = cx;
        s.y = cy;
        out.samples.push_back(s);
    }
    return out;
}

PupilBaseline compute_baseline(std::span<const TrialRecord> participant_trials) {
    PupilBaseline b;
    if (!participant_trials.empty()) b.participant_id = participant_trials.front().participant_id;
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& tr : participant_trials) {
        if (tr.stimulus != Emotion::Neutral) continue;
        for (const auto& s : tr.samples) {
            if (!s.valid) continue;
            sum += s.pupil;
            ++count;
        }
    }
    if (count == 0) {
        throw Error(Errc::NoNeutralTrials, "participant '" + b.participant_id + "' has no valid neutral-trial samples");
    }
    b.baseline = sum / static_cast<double>(count);
    return b;
}

double dispersion(std::span<const GazeSample> window) {
    if (window.empty()) return 0.0;
    Bounds b(window.front());
    for (const auto& s : window) b.add(s);
    return b.dispersion();
}

EventSet detect_fixations(std::span<const GazeSample> s, const DetectorConfig& config, double pupil_baseline) {
    if (!(config.dispersion_threshold > 0.0) || !(config.min_duration > 0.0) || !(config.max_gap > 0.0)) {
        throw Error(Errc::InvalidConfig, "detector thresholds must be positive");
    }
    const std::size_t n = s.size();
    if (n < 2) throw Error(Errc::TooFewSamples, "fixation detection needs at least 2 samples");

    EventSet out;
    std::size_t i = 0;
    while (i < n) {
        // Smallest window starting at i spanning min_duration without a long gap.
        std::size_t j = i;
        bool gap = false;
        while (j + 1 < n && s[j].t - s[i].t < config.min_duration) {
            if (s[j + 1].t - s[j].t > config.max_gap) {
                gap = true;
                break;
            }
            ++j;
        }
        if (s[j].t - s[i].t < config.min_duration) {
            if (!gap) break;
            i = j + 1;
            continue;
        }
        Bounds bounds(s[i]);
        for (std::size_t k = i + 1; k <= j; ++k) bounds.add(s[k]);
        if (bounds.dispersion() > config.dispersion_threshold) {
            ++i;
            continue;
        }
        while (j + 1 < n && s[j + 1].t - s[j].t <= config.max_gap &&
               bounds.dispersion_with(s[j + 1]) <= config.dispersion_threshold) {
            bounds.add(s[++j]);
        }
        out.fixations.push_back(make_fixation(s, i, j, bounds.dispersion(), pupil_baseline));
        i = j + 1;
    }

    for (std::size_t k = 0; k + 1 < out.fixations.size(); ++k) {
        const std::size_t from = out.fixations[k].last_sample;
        const std::size_t to = out.fixations[k + 1].first_sample;
        if (distance(s[from], s[to]) <= config.dispersion_threshold) continue;
        if (!(s[to].t > s[from].t)) continue;
        out.saccades.push_back(saccade_metrics(s.subspan(from, to - from + 1)));
    }
    return out;
}

SaccadeEvent saccade_metrics(std::span<const GazeSample> w) {
    if (w.size() < 2) throw Error(Errc::DegenerateWindow, "saccade window needs at least 2 samples");
    SaccadeEvent e;
    e.start = w.front().t;
    e.end = w.back().t;
    e.duration = e.end - e.start;
    if (!(e.duration > 0.0)) throw Error(Errc::DegenerateWindow, "saccade window has zero time span");
    e.amplitude = distance(w.front(), w.back());

    std::vector<double> speed, mid;
    speed.reserve(w.size() - 1);
    mid.reserve(w.size() - 1);
    for (std::size_t k = 0; k + 1 < w.size(); ++k) {
        const double dt = w[k + 1].t - w[k].t;
        if (!(dt > 0.0)) continue;
        speed.push_back(distance(w[k], w[k + 1]) / dt);
        mid.push_back(0.5 * (w[k].t + w[k + 1].t));
    }
    e.peak_velocity = speed.empty() ? 0.0 : *std::max_element(speed.begin(), speed.end());
    if (speed.size() >= 2) {
        double sum = 0.0;
        for (std::size_t k = 0; k + 1 < speed.size(); ++k) {
            sum += std::abs(speed[k + 1] - speed[k]) / (mid[k + 1] - mid[k]);
        }
        e.mean_acceleration = sum / static_cast<double>(speed.size() - 1);
    }
    return e;
}

double amplitude_to_degrees(double normalized_amplitude, const ViewingGeometry& g) {
    if (!(g.screen_width_cm > 0.0) || !(g.viewing_distance_cm > 0.0)) {
        throw Error(Errc::InvalidConfig, "viewing geometry must be positive");
    }
    const double cm = normalized_amplitude * g.screen_width_cm;
    return 2.0 * std::atan(cm / (2.0 * g.viewing_distance_cm)) * 180.0 / std::numbers::pi;
}

}  // namespace gazeaffect::events
