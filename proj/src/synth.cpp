#include "gazeaffect/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

#include "gazeaffect/error.hpp"
#include "gazeaffect/features.hpp"
#include "gazeaffect/roi.hpp"
#include "gazeaffect/stats.hpp"

namespace gazeaffect::synth {

namespace {

constexpr double kJitterSd = 0.0015;
constexpr double kSaccadeSeconds = 0.03;
constexpr double kPupilNoiseSd = 0.005;
constexpr double kLogAmplitudeMean = -2.5;  // about 0.08 mm
constexpr double kLogAmplitudeSd = 0.35;
// Share of the valence-independent amplitude variance that is stable per participant.
constexpr double kAmplitudeParticipantShare = 0.5;
// Sd of each participant's stable log-weight preference per region.
constexpr double kDwellPreferenceSd = 0.35;
constexpr std::array<double, kRegionCount> kBaseDwell = {0.38, 0.08, 0.17, 0.27, 0.10};

std::string padded(const char* prefix, std::size_t value, int width) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s%0*zu", prefix, width, value);
    return buf;
}

int to_rating(double latent) { return static_cast<int>(std::clamp(std::round(latent), 1.0, 9.0)); }

struct Participant {
    ParticipantProfile profile;
    std::array<double, kTraitCount> z{};
    double u_valence = 0.0;
    double u_arousal = 0.0;
    double pupil_baseline = 3.5;
    double lux = 300.0;
    double temperature = 22.0;
    double amplitude_trait = 0.0;
    std::array<double, kRegionCount> dwell_preference{};
};

struct Clip {
    Emotion stimulus = Emotion::Neutral;
    double duration = 3.0;
    double brightness = 0.5;
};

class Gaze {
public:
    Gaze(const roi::RegionHulls& hulls, const roi::RegionMap& map) : hulls_(hulls), map_(map) {
        for (std::size_t r = 0; r < kFaceRegionCount; ++r) {
            const auto& v = hulls.regions[r].polygon.vertices;
            Point c{0, 0};
            for (const auto& p : v) {
                c.x += p.x;
                c.y += p.y;
            }
            centroid_[r] = {c.x / static_cast<double>(v.size()), c.y / static_cast<double>(v.size())};
        }
    }

    // A point that labels as `region` on the canonical face.
    Point target(Region region, std::mt19937_64& rng) const {
        std::uniform_real_distribution<double> u(0.0, 1.0);
        const auto r = static_cast<std::size_t>(region);
        for (int attempt = 0; attempt < 200; ++attempt) {
            Point p;
            if (region == Region::Outside) {
                p = {0.25 + 0.5 * u(rng), 0.22 + 0.6 * u(rng)};
            } else {
                const auto& v = hulls_.regions[r].polygon.vertices;
                const Point& a = v[static_cast<std::size_t>(u(rng) * static_cast<double>(v.size())) % v.size()];
                const double s = 0.7 * u(rng);
                p = {centroid_[r].x + s * (a.x - centroid_[r].x), centroid_[r].y + s * (a.y - centroid_[r].y)};
            }
            if (roi::label_gaze(p, hulls_, map_) == region) return p;
        }
        return region == Region::Outside ? Point{0.5, 0.2} : centroid_[r];
    }

private:
    const roi::RegionHulls& hulls_;
    const roi::RegionMap& map_;
    std::array<Point, kFaceRegionCount> centroid_{};
};

std::vector<GazeSample> synthesize_trace(const Gaze& gaze, double duration, double rate,
                                         const std::array<double, kRegionCount>& dwell, double pupil_level,
                                         double amplitude, std::mt19937_64& rng) {
    const auto n = static_cast<std::size_t>(std::floor(duration * rate + 1e-9));
    std::vector<GazeSample> out(n);
    std::normal_distribution<double> jitter(0.0, kJitterSd);
    std::normal_distribution<double> pupil_noise(0.0, kPupilNoiseSd);
    std::lognormal_distribution<double> fix_len(std::log(0.28), 0.35);
    std::discrete_distribution<std::size_t> pick(dwell.begin(), dwell.end());
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const std::size_t saccade_samples = std::max<std::size_t>(3, static_cast<std::size_t>(std::lround(kSaccadeSeconds * rate)));

    const double freq = 0.4 + 0.8 * u(rng);
    const double phase = 2.0 * std::numbers::pi * u(rng);

    std::size_t k = 0;
    std::size_t first_fixation_end = 0;
    Point here = gaze.target(static_cast<Region>(pick(rng)), rng);
    bool first = true;
    while (k < n) {
        if (!first) {
            const Point next = gaze.target(static_cast<Region>(pick(rng)), rng);
            for (std::size_t s = 1; s <= saccade_samples && k < n; ++s, ++k) {
                const double tau = static_cast<double>(s) / static_cast<double>(saccade_samples + 1);
                const double w = 0.5 * (1.0 - std::cos(std::numbers::pi * tau));
                out[k].x = here.x + w * (next.x - here.x);
                out[k].y = here.y + w * (next.y - here.y);
            }
            here = next;
        }
        const double len = std::clamp(fix_len(rng), 0.12, 0.7);
        const auto count = static_cast<std::size_t>(std::ceil(len * rate));
        for (std::size_t s = 0; s < count && k < n; ++s, ++k) {
            out[k].x = here.x + jitter(rng);
            out[k].y = here.y + jitter(rng);
        }
        if (first) first_fixation_end = k;
        first = false;
    }
    for (std::size_t i = 0; i < n; ++i) {
        auto& s = out[i];
        s.t = static_cast<double>(i) / rate;
        s.pupil = pupil_level + amplitude * std::sin(2.0 * std::numbers::pi * freq * s.t + phase) + pupil_noise(rng);
        s.valid = true;
    }
    // Blinks: invalid runs of 100-150 ms after the first fixation.
    const double r = u(rng);
    const int blinks = r < 0.6 ? 0 : (r < 0.9 ? 1 : 2);
    for (int b = 0; b < blinks; ++b) {
        const auto len = static_cast<std::size_t>((0.10 + 0.05 * u(rng)) * rate);
        const std::size_t lo = first_fixation_end + 1;
        if (n <= lo + len + 1) break;
        const std::size_t start = lo + static_cast<std::size_t>(u(rng) * static_cast<double>(n - lo - len - 1));
        for (std::size_t i = start; i < start + len && i < n; ++i) {
            out[i].valid = false;
            out[i].x = out[i].y = out[i].pupil = 0.0;
        }
    }
    return out;
}

}  // namespace

PlantedEffects PlantedEffects::none() {
    PlantedEffects e;
    e.trait_felt_valence = {};
    e.happy_conscientiousness_perceived_valence = 0.0;
    e.pupil_mean_arousal = 0.0;
    e.pupil_mean_valence = 0.0;
    e.pupil_var_valence = 0.0;
    e.region_tilt = 0.0;
    e.sigma_u = 0.0;
    return e;
}

PlantedEffects PlantedEffects::from_config(const config::Document& doc) {
    PlantedEffects e;
    for (std::size_t k = 0; k < kTraitCount; ++k) {
        const std::string key = "effects." + std::string(trait_name(static_cast<Trait>(k))) + "_felt_valence";
        e.trait_felt_valence[k] = doc.number(key, e.trait_felt_valence[k]);
    }
    e.happy_conscientiousness_perceived_valence = doc.number(
        "effects.happy_conscientiousness_perceived_valence", e.happy_conscientiousness_perceived_valence);
    e.pupil_mean_arousal = doc.number("effects.pupil_mean_arousal", e.pupil_mean_arousal);
    e.pupil_mean_valence = doc.number("effects.pupil_mean_valence", e.pupil_mean_valence);
    e.pupil_var_valence = doc.number("effects.pupil_var_valence", e.pupil_var_valence);
    e.mouth_felt_valence = doc.number("effects.mouth_felt_valence", e.mouth_felt_valence);
    e.eye_felt_valence = doc.number("effects.eye_felt_valence", e.eye_felt_valence);
    e.region_tilt = doc.number("effects.region_tilt", e.region_tilt);
    e.sigma_u = doc.number("effects.sigma_u", e.sigma_u);
    e.pupil_mean_sd = doc.number("effects.pupil_mean_sd", e.pupil_mean_sd);
    if (auto s = doc.numbers("effects.sigma_e")) {
        if (s->size() != kLabelDimCount) throw Error(Errc::InvalidConfig, "effects.sigma_e needs 4 values");
        std::copy(s->begin(), s->end(), e.sigma_e.begin());
    }
    for (std::size_t i = 0; i < kEmotionCount; ++i) {
        const std::string key = "effects.base_" + std::string(emotion_name(kAllEmotions[i]));
        if (auto b = doc.numbers(key)) {
            if (b->size() != 2) throw Error(Errc::InvalidConfig, key + " needs [valence, arousal]");
            e.stimulus_base[i] = {(*b)[0], (*b)[1]};
        }
    }
    e.independent_labels = doc.boolean("effects.independent_labels", e.independent_labels);
    e.deterministic_stimulus_labels =
        doc.boolean("effects.deterministic_stimulus_labels", e.deterministic_stimulus_labels);
    e.validate();
    return e;
}

void PlantedEffects::validate() const {
    auto corr = [](double r, const char* name) {
        if (!(r > -1.0 && r < 1.0)) throw Error(Errc::InvalidConfig, std::string(name) + " must lie in (-1, 1)");
    };
    double sum_sq = 0.0;
    for (double r : trait_felt_valence) {
        corr(r, "trait correlation");
        sum_sq += r * r;
    }
    if (sum_sq >= 1.0) throw Error(Errc::InvalidConfig, "trait correlations must have squared sum below 1");
    corr(happy_conscientiousness_perceived_valence, "happy_conscientiousness_perceived_valence");
    corr(pupil_var_valence, "pupil_var_valence");
    if (!(sigma_u >= 0.0) || !(pupil_mean_sd >= 0.0) || !(region_tilt >= 0.0))
        throw Error(Errc::InvalidConfig, "standard deviations must be >= 0");
    for (double s : sigma_e)
        if (!(s >= 0.0)) throw Error(Errc::InvalidConfig, "sigma_e entries must be >= 0");
    if (independent_labels && deterministic_stimulus_labels)
        throw Error(Errc::InvalidConfig, "independent_labels and deterministic_stimulus_labels are exclusive");
}

CohortSpec CohortSpec::from_config(const config::Document& doc) {
    CohortSpec s;
    auto count = [&](std::string_view key, std::size_t fallback) {
        const double v = doc.number(key, static_cast<double>(fallback));
        if (v < 0 || v != std::floor(v)) throw Error(Errc::InvalidSpec, std::string(key) + " must be a count");
        return static_cast<std::size_t>(v);
    };
    s.n_participants = count("cohort.n_participants", s.n_participants);
    s.trials_per_participant = count("cohort.trials_per_participant", s.trials_per_participant);
    s.sample_rate = doc.number("cohort.sample_rate", s.sample_rate);
    s.duration_min = doc.number("cohort.duration_min", s.duration_min);
    s.duration_max = doc.number("cohort.duration_max", s.duration_max);
    s.landmark_rate = doc.number("cohort.landmark_rate", s.landmark_rate);
    s.seed = count("cohort.seed", s.seed);
    s.validate();
    return s;
}

void CohortSpec::validate() const {
    if (n_participants < 1 || trials_per_participant < 1)
        throw Error(Errc::InvalidSpec, "participant and trial counts must be >= 1");
    if (!(sample_rate > 0.0) || !(landmark_rate > 0.0)) throw Error(Errc::InvalidSpec, "rates must be > 0");
    if (!(duration_min > 0.0) || !(duration_max >= duration_min))
        throw Error(Errc::InvalidSpec, "duration range must satisfy 0 < min <= max");
    if (duration_min * sample_rate < 30.0)
        throw Error(Errc::InvalidSpec, "trials need at least 30 samples at the shortest duration");
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t sub) {
    return splitmix64(splitmix64(splitmix64(seed) ^ stream) ^ (sub * 0xD1B54A32D192ED03ULL));
}

LandmarkFrame canonical_face() {
    LandmarkFrame f;
    auto ring = [&](std::size_t first, std::size_t count, double cx, double cy, double rx, double ry) {
        for (std::size_t k = 0; k < count; ++k) {
            const double a = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(count);
            f.points[first + k] = {cx + rx * std::cos(a), cy + ry * std::sin(a)};
        }
    };
    ring(0, 17, 0.5, 0.5, 0.22, 0.28);      // jaw line
    ring(17, 5, 0.41, 0.345, 0.055, 0.008);  // brows
    ring(22, 5, 0.59, 0.345, 0.055, 0.008);
    ring(27, 9, 0.5, 0.49, 0.028, 0.055);    // nose
    ring(36, 6, 0.41, 0.41, 0.045, 0.016);   // eyes
    ring(42, 6, 0.59, 0.41, 0.045, 0.016);
    ring(48, 20, 0.5, 0.63, 0.075, 0.032);   // mouth
    return f;
}

Dataset generate_cohort(const CohortSpec& spec, const PlantedEffects& effects) {
    spec.validate();
    effects.validate();
    Dataset ds;
    const roi::RegionMap map = roi::RegionMap::standard68();
    const LandmarkFrame face = canonical_face();
    const roi::RegionHulls hulls = roi::build_hulls(face, map);
    const Gaze gaze(hulls, map);

    // Clip properties are shared across participants.
    std::vector<Clip> clips(spec.trials_per_participant);
    for (std::size_t c = 0; c < clips.size(); ++c) {
        std::mt19937_64 rng(substream_seed(spec.seed, 0, c + 1));
        std::uniform_real_distribution<double> u(0.0, 1.0);
        clips[c].stimulus = kAllEmotions[c % kEmotionCount];
        clips[c].duration = spec.duration_min + (spec.duration_max - spec.duration_min) * u(rng);
        clips[c].duration = std::round(clips[c].duration * 1000.0) / 1000.0;
        clips[c].brightness = std::clamp(0.5 + 0.12 * std::normal_distribution<double>()(rng), 0.05, 0.95);
    }

    double trait_r2 = 0.0;
    for (double r : effects.trait_felt_valence) trait_r2 += r * r;
    const double se_pv = effects.sigma_e[0], se_pa = effects.sigma_e[1];
    const double se_fv = effects.sigma_e[2], se_fa = effects.sigma_e[3];
    const double su2 = effects.sigma_u * effects.sigma_u;
    const double fv_sd = std::sqrt((su2 + se_fv * se_fv) / (1.0 - trait_r2));
    std::array<double, kTraitCount> trait_slope{};
    for (std::size_t k = 0; k < kTraitCount; ++k) trait_slope[k] = effects.trait_felt_valence[k] * fv_sd;
    const double rh = effects.happy_conscientiousness_perceived_valence;
    const double happy_slope = rh * std::sqrt((su2 + se_pv * se_pv) / (1.0 - rh * rh));
    const double pv_sd = std::sqrt(su2 + se_pv * se_pv);
    const double r_pv = effects.pupil_var_valence;

    for (std::size_t j = 0; j < spec.n_participants; ++j) {
        std::mt19937_64 prng(substream_seed(spec.seed, j + 1, 0));
        std::normal_distribution<double> z(0.0, 1.0);
        Participant part;
        part.profile.participant_id = padded("P", j + 1, 3);
        for (std::size_t k = 0; k < kTraitCount; ++k) {
            part.z[k] = z(prng);
            part.profile.big5_raw[k] = std::clamp(std::round((25.0 + 7.0 * part.z[k]) * 10.0) / 10.0, 0.0, 50.0);
        }
        part.u_valence = effects.sigma_u * z(prng);
        part.u_arousal = effects.sigma_u * z(prng);
        part.pupil_baseline = 3.5 + 0.4 * z(prng);
        part.lux = 300.0 + 40.0 * z(prng);
        part.temperature = 22.0 + 1.0 * z(prng);
        part.amplitude_trait = z(prng);
        for (double& w : part.dwell_preference) w = kDwellPreferenceSd * z(prng);
        ds.participants.push_back(part.profile);

        for (std::size_t c = 0; c < clips.size(); ++c) {
            std::mt19937_64 rng(substream_seed(spec.seed, j + 1, c + 1));
            std::normal_distribution<double> n01(0.0, 1.0);
            const Clip& clip = clips[c];
            const auto s = static_cast<std::size_t>(clip.stimulus);
            const double base_v = effects.stimulus_base[s][0];
            const double base_a = effects.stimulus_base[s][1];

            TrialRecord tr;
            tr.trial_id = part.profile.participant_id + "_" + padded("T", c + 1, 3);
            tr.participant_id = part.profile.participant_id;
            tr.clip_id = padded("C", c + 1, 3);
            tr.stimulus = clip.stimulus;
            tr.duration = clip.duration;
            tr.env = {std::round((part.lux + 10.0 * n01(rng)) * 100.0) / 100.0,
                      std::round((part.temperature + 0.2 * n01(rng)) * 100.0) / 100.0, clip.brightness};

            const double pupil_mean = effects.pupil_mean_sd * n01(rng);
            double trait_term = 0.0;
            for (std::size_t k = 0; k < kTraitCount; ++k) trait_term += trait_slope[k] * part.z[k];
            const double happy_term =
                clip.stimulus == Emotion::Happy ? happy_slope * part.z[static_cast<std::size_t>(Trait::Conscientiousness)] : 0.0;
            const double pv_dev = part.u_valence + happy_term + se_pv * n01(rng);
            const double fv_dev = part.u_valence + trait_term + se_fv * n01(rng);
            const double pa_dev = part.u_arousal + se_pa * n01(rng);
            const double fa_dev = part.u_arousal + se_fa * n01(rng);

            if (effects.independent_labels) {
                std::uniform_int_distribution<int> any(1, 9);
                for (auto& r : tr.labels.ratings) r = any(rng);
            } else if (effects.deterministic_stimulus_labels) {
                const int rating = features::class_representative(static_cast<features::LabelClass>(s % 3));
                tr.labels.ratings = {rating, rating, rating, rating};
            } else {
                tr.labels[LabelDim::PerceivedValence] =
                    to_rating(base_v + pv_dev + effects.pupil_mean_valence * pupil_mean);
                tr.labels[LabelDim::FeltValence] = to_rating(base_v + fv_dev + effects.pupil_mean_valence * pupil_mean);
                tr.labels[LabelDim::PerceivedArousal] =
                    to_rating(base_a + pa_dev + effects.pupil_mean_arousal * pupil_mean);
                tr.labels[LabelDim::FeltArousal] = to_rating(base_a + fa_dev + effects.pupil_mean_arousal * pupil_mean);
            }

            // Pupil fluctuation amplitude falls with perceived valence; dwell tilts with felt valence.
            const double z_pv = pv_sd > 0.0 ? pv_dev / pv_sd : 0.0;
            const double z_fv = fv_sd > 0.0 ? fv_dev / fv_sd : 0.0;
            const double other = std::sqrt(kAmplitudeParticipantShare) * part.amplitude_trait +
                                 std::sqrt(1.0 - kAmplitudeParticipantShare) * n01(rng);
            const double log_amp =
                kLogAmplitudeMean + kLogAmplitudeSd * (r_pv * z_pv + std::sqrt(1.0 - r_pv * r_pv) * other);
            std::array<double, kRegionCount> dwell = kBaseDwell;
            for (std::size_t r = 0; r < kRegionCount; ++r) dwell[r] *= std::exp(part.dwell_preference[r]);
            dwell[static_cast<std::size_t>(Region::Mouth)] *=
                std::exp(effects.mouth_felt_valence * effects.region_tilt * z_fv);
            dwell[static_cast<std::size_t>(Region::Eyes)] *=
                std::exp(effects.eye_felt_valence * effects.region_tilt * z_fv);

            tr.samples = synthesize_trace(gaze, clip.duration, spec.sample_rate, dwell,
                                          part.pupil_baseline + pupil_mean, std::exp(log_amp), rng);

            std::normal_distribution<double> head(0.0, 0.001);
            for (double t = 0.0; t < clip.duration; t += 1.0 / spec.landmark_rate) {
                LandmarkFrame frame = face;
                frame.trial_id = tr.trial_id;
                frame.frame_time = std::round(t * 1e6) / 1e6;
                const double dx = head(rng), dy = head(rng);
                for (auto& p : frame.points) {
                    p.x += dx;
                    p.y += dy;
                }
                ds.landmarks.push_back(frame);
            }
            ds.trials.push_back(std::move(tr));
        }
    }
    return ds;
}

CohortSummary describe_cohort(const Dataset& dataset) {
    CohortSummary s;
    s.participants = dataset.participants.size();
    s.trials = dataset.trials.size();
    for (auto& row : s.trait_label_r) row.fill(std::numeric_limits<double>::quiet_NaN());
    if (dataset.trials.empty()) return s;

    std::map<std::string, std::array<std::size_t, kEmotionCount>> per_participant;
    std::vector<FeatureRow> rows;
    for (const auto& tr : dataset.trials) {
        ++s.emotion_counts[static_cast<std::size_t>(tr.stimulus)];
        ++per_participant[tr.participant_id][static_cast<std::size_t>(tr.stimulus)];
        for (LabelDim d : kAllLabelDims)
            ++s.class_counts[static_cast<std::size_t>(d)][static_cast<std::size_t>(features::bin_label(tr.labels[d]))];
        FeatureRow row;
        row.trial_id = tr.trial_id;
        row.participant_id = tr.participant_id;
        row.stimulus = tr.stimulus;
        row.labels = tr.labels;
        if (const auto* p = dataset.find_participant(tr.participant_id))
            row.features.big5_scaled = features::scale_personality(p->big5_raw);
        rows.push_back(std::move(row));
    }
    s.min_emotion_per_participant = std::numeric_limits<std::size_t>::max();
    for (const auto& [id, counts] : per_participant)
        for (std::size_t c : counts) {
            s.min_emotion_per_participant = std::min(s.min_emotion_per_participant, c);
            s.max_emotion_per_participant = std::max(s.max_emotion_per_participant, c);
        }
    for (std::size_t k = 0; k < kTraitCount; ++k)
        for (LabelDim d : kAllLabelDims) {
            try {
                s.trait_label_r[k][static_cast<std::size_t>(d)] =
                    stats::participant_correlation(rows, stats::trait_metric(static_cast<Trait>(k)),
                                                   stats::label_metric(d))
                        .r;
            } catch (const Error&) {
            }
        }
    return s;
}

std::string format_summary(const CohortSummary& s) {
    std::ostringstream out;
    out << "participants " << s.participants << "\ntrials " << s.trials << "\n";
    out << "stimulus counts";
    for (std::size_t e = 0; e < kEmotionCount; ++e) out << " " << emotion_name(kAllEmotions[e]) << "=" << s.emotion_counts[e];
    out << "\nper-participant emotion count range " << s.min_emotion_per_participant << ".."
        << s.max_emotion_per_participant << "\n";
    for (LabelDim d : kAllLabelDims) {
        const auto& c = s.class_counts[static_cast<std::size_t>(d)];
        out << label_dim_name(d) << " low=" << c[0] << " medium=" << c[1] << " high=" << c[2] << "\n";
    }
    out << "participant-level r (trait x label)\n";
    char buf[32];
    for (std::size_t k = 0; k < kTraitCount; ++k) {
        out << "  " << trait_name(static_cast<Trait>(k));
        for (double r : s.trait_label_r[k]) {
            std::snprintf(buf, sizeof buf, " %+.3f", r);
            out << buf;
        }
        out << "\n";
    }
    return out.str();
}

stats::LmeData simulate_lme_panel(std::size_t participants, std::size_t trials, double beta0, double beta1,
                                  double sigma_u, double sigma_e, double x_sd, std::uint64_t seed) {
    stats::LmeData d;
    d.n_groups = participants;
    d.x.reserve(participants * trials);
    for (std::size_t j = 0; j < participants; ++j) {
        std::mt19937_64 rng(substream_seed(seed, j + 1, 0));
        std::normal_distribution<double> z(0.0, 1.0);
        const double u = sigma_u * z(rng);
        for (std::size_t i = 0; i < trials; ++i) {
            const double x = x_sd * z(rng);
            d.x.push_back(x);
            d.y.push_back(beta0 + beta1 * x + u + sigma_e * z(rng));
            d.group.push_back(j);
        }
    }
    return d;
}

}  // namespace gazeaffect::synth
