#include "gazeaffect/pipeline.hpp"

#include <unordered_map>

#include "gazeaffect/error.hpp"
#include "gazeaffect/features.hpp"

namespace gazeaffect::pipeline {

ExtractionConfig ExtractionConfig::from_config(const config::Document& doc) {
    ExtractionConfig c;
    c.detector.dispersion_threshold = doc.number("detector.dispersion_threshold", c.detector.dispersion_threshold);
    c.detector.min_duration = doc.number("detector.min_duration", c.detector.min_duration);
    c.detector.max_gap = doc.number("detector.max_gap", c.detector.max_gap);
    c.regions = roi::RegionMap::from_config(doc);
    return c;
}

Extraction extract(const Dataset& ds, const ExtractionConfig& cfg, io::Warnings* warnings) {
    Extraction out;

    std::unordered_map<std::string, std::vector<TrialRecord>> by_participant;
    for (const auto& tr : ds.trials) by_participant[tr.participant_id].push_back(tr);
    for (const auto& p : ds.participants) {
        auto it = by_participant.find(p.participant_id);
        if (it == by_participant.end()) continue;
        out.baselines[p.participant_id] = events::compute_baseline(it->second).baseline;
    }

    std::unordered_map<std::string, std::vector<LandmarkFrame>> frames;
    for (const auto& f : ds.landmarks) frames[f.trial_id].push_back(f);

    for (const auto& tr : ds.trials) {
        const ParticipantProfile* profile = ds.find_participant(tr.participant_id);
        if (profile == nullptr) throw Error(Errc::OrphanTrial, tr.trial_id);
        const double baseline = out.baselines.at(tr.participant_id);

        FeatureRow row;
        row.trial_id = tr.trial_id;
        row.participant_id = tr.participant_id;
        row.clip_id = tr.clip_id;
        row.stimulus = tr.stimulus;
        row.labels = tr.labels;

        TrialEvents te;
        te.trial_id = tr.trial_id;
        StepSequence seq;
        for (std::size_t k = 0; k < kSequenceSteps; ++k) {
            seq.times[k] = tr.duration * (static_cast<double>(k) / static_cast<double>(kSequenceSteps - 1));
        }

        const std::vector<GazeSample> valid = events::quality_filter(tr.samples);
        if (valid.size() < 2) {
            if (warnings) warnings->push_back("trial " + tr.trial_id + ": fewer than 2 valid samples");
            row.features = features::build_trial_features({}, {}, roi::region_proportions({}), tr.env, *profile,
                                                          tr.stimulus);
        } else {
            te.events = events::detect_fixations(valid, cfg.detector, baseline);

            roi::TrialHullIndex hulls;
            if (auto it = frames.find(tr.trial_id); it != frames.end()) {
                hulls = roi::TrialHullIndex(it->second, cfg.regions);
            } else if (warnings) {
                warnings->push_back("trial " + tr.trial_id + ": no landmark frames, gaze labeled outside");
            }
            auto label = [&](Point p, double t) {
                return hulls.empty() ? Region::Outside : roi::label_gaze(p, hulls.nearest(t), cfg.regions);
            };
            std::vector<Region> sample_regions;
            sample_regions.reserve(valid.size());
            for (const auto& s : valid) sample_regions.push_back(label({s.x, s.y}, s.t));
            for (const auto& f : te.events.fixations) {
                te.fixation_regions.push_back(label(f.centroid, 0.5 * (f.start + f.end)));
            }

            std::vector<double> corrected;
            corrected.reserve(valid.size());
            for (const auto& s : valid) corrected.push_back(s.pupil - baseline);

            row.features = features::build_trial_features(te.events, corrected,
                                                          roi::region_proportions(te.fixation_regions), tr.env,
                                                          *profile, tr.stimulus);
            seq = features::resample_sequence(
                features::build_signals(valid, baseline, te.events, sample_regions, tr.duration));
        }
        out.table.rows.push_back(std::move(row));
        out.table.sequences.push_back(seq);
        out.events.push_back(std::move(te));
    }
    return out;
}

void write_events(const Extraction& ex, const std::filesystem::path& path) {
    std::string out =
        "trial_id,kind,start,end,duration,centroid_x,centroid_y,dispersion,mean_pupil_corrected,region,"
        "amplitude,peak_velocity,mean_acceleration\n";
    auto g = io::format_g17;
    for (const auto& te : ex.events) {
        for (std::size_t i = 0; i < te.events.fixations.size(); ++i) {
            const auto& f = te.events.fixations[i];
            out += te.trial_id + ",fixation," + g(f.start) + ',' + g(f.end) + ',' + g(f.duration) + ',' +
                   g(f.centroid.x) + ',' + g(f.centroid.y) + ',' + g(f.dispersion) + ',' +
                   g(f.mean_pupil_corrected) + ',' + std::string(region_name(te.fixation_regions[i])) + ",,,\n";
        }
        for (const auto& s : te.events.saccades) {
            out += te.trial_id + ",saccade," + g(s.start) + ',' + g(s.end) + ',' + g(s.duration) + ",,,,,," +
                   g(s.amplitude) + ',' + g(s.peak_velocity) + ',' + g(s.mean_acceleration) + '\n';
        }
    }
    io::write_file_atomic(path, out);
}

}  // namespace gazeaffect::pipeline
