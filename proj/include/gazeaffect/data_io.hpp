#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "gazeaffect/feature_types.hpp"
#include "gazeaffect/types.hpp"

namespace gazeaffect::io {

namespace fs = std::filesystem;

/// Non-fatal parse diagnostics are appended here when a sink is given.
using Warnings = std::vector<std::string>;

/// File names inside a dataset directory.
inline constexpr const char* kGazeFile = "gaze.csv";
inline constexpr const char* kLabelsFile = "labels.csv";
inline constexpr const char* kParticipantsFile = "participants.csv";
inline constexpr const char* kEnvFile = "env.csv";
inline constexpr const char* kLandmarksFile = "landmarks.jsonl";
inline constexpr const char* kFeaturesFile = "features.csv";
inline constexpr const char* kSequencesFile = "sequences.csv";
inline constexpr const char* kEventsFile = "events.csv";

/// Groups rows by trial_id (first-appearance order). Samples keep file order;
/// a decreasing t inside a trial is a NonMonotonicTime error.
std::vector<TrialRecord> parse_gaze_log(const fs::path& path, Warnings* warnings = nullptr);

/// Frames are sorted by frame_time per trial (a warning is emitted if the file was not).
/// When `known_trials` is non-empty, frames for other trial ids raise MissingTrial.
std::vector<LandmarkFrame> parse_landmarks(const fs::path& path,
                                           const std::vector<std::string>& known_trials = {},
                                           Warnings* warnings = nullptr);

std::vector<ParticipantProfile> parse_participants(const fs::path& path, Warnings* warnings = nullptr);

/// Loads gaze.csv, labels.csv, participants.csv, env.csv and (if present) landmarks.jsonl.
/// Trials referencing unknown participants are rejected (OrphanTrial).
Dataset load_dataset(const fs::path& dir, Warnings* warnings = nullptr, bool allow_any_duration = false);

void write_dataset(const Dataset& dataset, const fs::path& dir);

void write_gaze_log(const std::vector<TrialRecord>& trials, const fs::path& path);
void write_landmarks(const std::vector<LandmarkFrame>& frames, const fs::path& path);

/// One row per trial; floats with 17 significant digits; fixed column order.
void write_features(const FeatureTable& table, const fs::path& path);
FeatureTable read_features(const fs::path& path);

/// 15 rows per trial: trial_id, step, time, then the 10 channels.
void write_sequences(const FeatureTable& table, const fs::path& path);
/// Attaches sequences to `table` (matched by trial_id). Every row must have one.
void read_sequences(FeatureTable& table, const fs::path& path);

/// Shortest representation that parses back to the same double.
std::string format_roundtrip(double v);
/// printf("%.17g").
std::string format_g17(double v);

/// Writes `content` to `path` via a temporary sibling and rename.
void write_file_atomic(const fs::path& path, const std::string& content);
std::string read_file(const fs::path& path);

}  // namespace gazeaffect::io
