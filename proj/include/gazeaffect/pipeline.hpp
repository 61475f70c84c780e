#pragma once

#include <map>
#include <string>
#include <vector>

#include "gazeaffect/config.hpp"
#include "gazeaffect/data_io.hpp"
#include "gazeaffect/feature_types.hpp"
#include "gazeaffect/gaze_events.hpp"
#include "gazeaffect/roi.hpp"

namespace gazeaffect::pipeline {

struct ExtractionConfig {
    events::DetectorConfig detector;
    roi::RegionMap regions = roi::RegionMap::standard68();

    /// Reads `[detector]` and `[regions]` sections.
    static ExtractionConfig from_config(const config::Document& doc);
};

struct TrialEvents {
    std::string trial_id;
    events::EventSet events;
    std::vector<Region> fixation_regions;
};

struct Extraction {
    FeatureTable table;
    std::vector<TrialEvents> events;        // parallel to table.rows
    std::map<std::string, double> baselines;  // participant -> mm
};

/// Raw dataset to static features and 15-step sequences: quality filter, per
/// participant pupil baseline, I-DT events, ROI labels, trial features, resampling.
/// Trials with fewer than 2 valid samples keep zero features/sequences and flags.
Extraction extract(const Dataset& dataset, const ExtractionConfig& config, io::Warnings* warnings = nullptr);

/// events.csv: trial_id, kind, start, end, then kind-specific metrics.
void write_events(const Extraction& extraction, const std::filesystem::path& path);

}  // namespace gazeaffect::pipeline
