#include "gazeaffect/data_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string_view>
#include <unordered_map>

#include <json.hpp>

#include "gazeaffect/error.hpp"

namespace gazeaffect::io {

namespace {

using json = nlohmann::json;

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return out;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

/// Header-indexed view over a whole CSV file.
class CsvFile {
public:
    CsvFile(const fs::path& path, Warnings* warnings, std::vector<std::string_view> known_columns)
        : path_(path), text_(read_file(path)) {
        std::string_view rest = text_;
        std::size_t line_no = 0;
        bool have_header = false;
        while (!rest.empty()) {
            std::size_t nl = rest.find('\n');
            std::string_view line = rest.substr(0, nl);
            rest = nl == std::string_view::npos ? std::string_view{} : rest.substr(nl + 1);
            ++line_no;
            line = trim(line);
            if (line.empty()) continue;
            if (!have_header) {
                auto cols = split_fields(line);
                for (std::size_t i = 0; i < cols.size(); ++i) {
                    std::string name(trim(cols[i]));
                    columns_[name] = i;
                    if (std::find(known_columns.begin(), known_columns.end(), name) == known_columns.end() &&
                        warnings != nullptr) {
                        warnings->push_back(path.filename().string() + ": ignoring unknown column '" + name + "'");
                    }
                }
                width_ = cols.size();
                have_header = true;
                continue;
            }
            rows_.push_back({line_no, split_fields(line)});
        }
        if (!have_header) {
            throw Error(Errc::MalformedRow, path.string() + ": missing header row");
        }
    }

    struct Row {
        std::size_t line;
        std::vector<std::string_view> fields;
    };

    const std::vector<Row>& rows() const { return rows_; }

    std::size_t require(std::string_view name) const {
        auto it = columns_.find(std::string(name));
        if (it == columns_.end()) {
            throw Error(Errc::MalformedRow, path_.string() + ": header lacks column '" + std::string(name) + "'");
        }
        return it->second;
    }

    std::optional<std::size_t> optional_column(std::string_view name) const {
        auto it = columns_.find(std::string(name));
        if (it == columns_.end()) return std::nullopt;
        return it->second;
    }

    std::string_view field(const Row& row, std::size_t col) const {
        if (row.fields.size() != width_) {
            fail(row, "expected " + std::to_string(width_) + " fields, got " + std::to_string(row.fields.size()));
        }
        return trim(row.fields[col]);
    }

    double number(const Row& row, std::size_t col) const {
        std::string_view s = field(row, col);
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) {
            fail(row, "not a finite number: '" + std::string(s) + "'");
        }
        return v;
    }

    int integer(const Row& row, std::size_t col) const {
        std::string_view s = field(row, col);
        int v = 0;
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc{} || ptr != s.data() + s.size()) {
            fail(row, "not an integer: '" + std::string(s) + "'");
        }
        return v;
    }

    bool boolean(const Row& row, std::size_t col) const {
        std::string_view s = field(row, col);
        if (s == "1" || s == "true") return true;
        if (s == "0" || s == "false") return false;
        fail(row, "not a boolean: '" + std::string(s) + "'");
    }

    [[noreturn]] void fail(const Row& row, const std::string& msg) const {
        throw Error(Errc::MalformedRow, path_.string() + ":" + std::to_string(row.line) + ": " + msg);
    }

    const fs::path& path() const { return path_; }

private:
    fs::path path_;
    std::string text_;
    std::unordered_map<std::string, std::size_t> columns_;
    std::size_t width_ = 0;
    std::vector<Row> rows_;
};

void check_id(const std::string& id) {
    if (id.empty() || id.find_first_of(",\n\r") != std::string::npos) {
        throw Error(Errc::IoFailure, "identifier not serializable: '" + id + "'");
    }
}

struct LabelRow {
    std::string participant_id;
    std::string clip_id;
    Emotion stimulus;
    double duration;
    LabelRecord labels;
};

std::map<std::string, LabelRow> parse_labels(const fs::path& path, Warnings* warnings) {
    std::vector<std::string_view> known = {"trial_id", "participant_id", "clip_id", "stimulus", "duration"};
    for (LabelDim d : kAllLabelDims) known.push_back(label_dim_name(d));
    CsvFile csv(path, warnings, known);
    const auto c_trial = csv.require("trial_id");
    const auto c_part = csv.require("participant_id");
    const auto c_stim = csv.require("stimulus");
    const auto c_dur = csv.require("duration");
    const auto c_clip = csv.optional_column("clip_id");
    std::array<std::size_t, kLabelDimCount> c_label{};
    for (LabelDim d : kAllLabelDims) c_label[static_cast<std::size_t>(d)] = csv.require(label_dim_name(d));

    std::map<std::string, LabelRow> out;
    for (const auto& row : csv.rows()) {
        LabelRow lr;
        std::string trial(csv.field(row, c_trial));
        lr.participant_id = std::string(csv.field(row, c_part));
        if (c_clip) {
            lr.clip_id = std::string(csv.field(row, *c_clip));
            if (lr.clip_id == "-") lr.clip_id.clear();
        }
        try {
            lr.stimulus = parse_emotion(csv.field(row, c_stim));
        } catch (const Error&) {
            throw Error(Errc::UnknownEmotion, path.string() + ":" + std::to_string(row.line) + ": " +
                                                  std::string(csv.field(row, c_stim)));
        }
        lr.duration = csv.number(row, c_dur);
        for (std::size_t k = 0; k < kLabelDimCount; ++k) {
            int r = csv.integer(row, c_label[k]);
            if (r < 1 || r > 9) csv.fail(row, "rating outside 1..9: " + std::to_string(r));
            lr.labels.ratings[k] = r;
        }
        if (!out.emplace(trial, std::move(lr)).second) csv.fail(row, "duplicate trial_id '" + trial + "'");
    }
    return out;
}

std::map<std::string, Environment> parse_env(const fs::path& path, Warnings* warnings) {
    CsvFile csv(path, warnings, {"trial_id", "ambient_lux", "temperature_celsius", "stimulus_brightness"});
    const auto c_trial = csv.require("trial_id");
    const auto c_lux = csv.require("ambient_lux");
    const auto c_temp = csv.require("temperature_celsius");
    const auto c_bright = csv.require("stimulus_brightness");
    std::map<std::string, Environment> out;
    for (const auto& row : csv.rows()) {
        Environment e{csv.number(row, c_lux), csv.number(row, c_temp), csv.number(row, c_bright)};
        out[std::string(csv.field(row, c_trial))] = e;
    }
    return out;
}

}  // namespace

std::string format_roundtrip(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

std::string format_g17(double v) {
    char buf[64];
    int n = std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf, static_cast<std::size_t>(n));
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::IoFailure, "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file_atomic(const fs::path& path, const std::string& content) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(Errc::IoFailure, "cannot write " + path.string());
        out << content;
        if (!out) throw Error(Errc::IoFailure, "write failed for " + path.string());
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) throw Error(Errc::IoFailure, "cannot rename into " + path.string() + ": " + ec.message());
}

std::vector<TrialRecord> parse_gaze_log(const fs::path& path, Warnings* warnings) {
    CsvFile csv(path, warnings, {"trial_id", "participant_id", "t", "x", "y", "pupil", "valid"});
    const auto c_trial = csv.require("trial_id");
    const auto c_part = csv.require("participant_id");
    const auto c_t = csv.require("t");
    const auto c_x = csv.require("x");
    const auto c_y = csv.require("y");
    const auto c_pupil = csv.require("pupil");
    const auto c_valid = csv.require("valid");

    std::vector<TrialRecord> trials;
    std::unordered_map<std::string, std::size_t> index;
    for (const auto& row : csv.rows()) {
        std::string_view trial_id = csv.field(row, c_trial);
        std::string_view part_id = csv.field(row, c_part);
        GazeSample s;
        s.t = csv.number(row, c_t);
        s.x = csv.number(row, c_x);
        s.y = csv.number(row, c_y);
        s.pupil = csv.number(row, c_pupil);
        s.valid = csv.boolean(row, c_valid);
        if (s.valid && !(s.pupil > 0.0)) csv.fail(row, "valid sample with non-positive pupil");

        auto [it, inserted] = index.try_emplace(std::string(trial_id), trials.size());
        if (inserted) {
            TrialRecord tr;
            tr.trial_id = std::string(trial_id);
            tr.participant_id = std::string(part_id);
            trials.push_back(std::move(tr));
        }
        TrialRecord& tr = trials[it->second];
        if (tr.participant_id != part_id) csv.fail(row, "trial changes participant_id");
        if (!tr.samples.empty() && s.t < tr.samples.back().t) {
            throw Error(Errc::NonMonotonicTime,
                        path.string() + ":" + std::to_string(row.line) + ": t decreases in trial " + tr.trial_id);
        }
        tr.samples.push_back(s);
    }
    return trials;
}

std::vector<LandmarkFrame> parse_landmarks(const fs::path& path, const std::vector<std::string>& known_trials,
                                           Warnings* warnings) {
    std::string text = read_file(path);
    std::set<std::string> known(known_trials.begin(), known_trials.end());
    std::vector<LandmarkFrame> frames;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const std::string where = path.string() + ":" + std::to_string(line_no);
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw Error(Errc::MalformedRow, where + ": " + e.what());
        }
        LandmarkFrame f;
        try {
            f.trial_id = j.at("trial_id").get<std::string>();
            f.frame_time = j.at("frame_time").get<double>();
            const auto& pts = j.at("points");
            if (!pts.is_array() || pts.size() != kLandmarkCount) {
                throw Error(Errc::WrongPointCount, where + ": expected 68 points, got " +
                                                       std::to_string(pts.is_array() ? pts.size() : 0));
            }
            for (std::size_t i = 0; i < kLandmarkCount; ++i) {
                const auto& p = pts[i];
                if (!p.is_array() || p.size() != 2) throw Error(Errc::MalformedRow, where + ": point is not [x,y]");
                f.points[i] = {p[0].get<double>(), p[1].get<double>()};
                if (!std::isfinite(f.points[i].x) || !std::isfinite(f.points[i].y)) {
                    throw Error(Errc::MalformedRow, where + ": non-finite coordinate");
                }
            }
        } catch (const json::exception& e) {
            throw Error(Errc::MalformedRow, where + ": " + e.what());
        }
        if (!known.empty() && !known.count(f.trial_id)) {
            throw Error(Errc::MissingTrial, where + ": unknown trial '" + f.trial_id + "'");
        }
        frames.push_back(std::move(f));
    }

    // Group by trial in first-appearance order, time-sorted within each trial.
    std::unordered_map<std::string, std::size_t> first_seen;
    for (const auto& f : frames) first_seen.try_emplace(f.trial_id, first_seen.size());
    bool was_sorted = true;
    for (std::size_t i = 1; i < frames.size(); ++i) {
        if (frames[i].trial_id == frames[i - 1].trial_id && frames[i].frame_time < frames[i - 1].frame_time) {
            was_sorted = false;
        }
    }
    std::stable_sort(frames.begin(), frames.end(), [&](const LandmarkFrame& a, const LandmarkFrame& b) {
        std::size_t ka = first_seen[a.trial_id], kb = first_seen[b.trial_id];
        if (ka != kb) return ka < kb;
        return a.frame_time < b.frame_time;
    });
    if (!was_sorted && warnings != nullptr) {
        warnings->push_back(path.filename().string() + ": frames reordered by frame_time");
    }
    return frames;
}

std::vector<ParticipantProfile> parse_participants(const fs::path& path, Warnings* warnings) {
    std::vector<std::string_view> known = {"participant_id"};
    for (std::size_t k = 0; k < kTraitCount; ++k) known.push_back(trait_name(static_cast<Trait>(k)));
    CsvFile csv(path, warnings, known);
    const auto c_id = csv.require("participant_id");
    std::array<std::size_t, kTraitCount> c_trait{};
    for (std::size_t k = 0; k < kTraitCount; ++k) c_trait[k] = csv.require(trait_name(static_cast<Trait>(k)));
    std::vector<ParticipantProfile> out;
    for (const auto& row : csv.rows()) {
        ParticipantProfile p;
        p.participant_id = std::string(csv.field(row, c_id));
        for (std::size_t k = 0; k < kTraitCount; ++k) {
            double v = csv.number(row, c_trait[k]);
            if (v < 0.0 || v > 50.0) {
                throw Error(Errc::OutOfRangeTrait,
                            path.string() + ":" + std::to_string(row.line) + ": trait outside [0,50]");
            }
            p.big5_raw[k] = v;
        }
        out.push_back(std::move(p));
    }
    return out;
}

Dataset load_dataset(const fs::path& dir, Warnings* warnings, bool allow_any_duration) {
    for (const char* name : {kGazeFile, kLabelsFile, kParticipantsFile}) {
        if (!fs::exists(dir / name)) throw Error(Errc::MissingInput, (dir / name).string());
    }
    Dataset ds;
    ds.participants = parse_participants(dir / kParticipantsFile, warnings);
    ds.trials = parse_gaze_log(dir / kGazeFile, warnings);
    auto labels = parse_labels(dir / kLabelsFile, warnings);
    std::map<std::string, Environment> env;
    if (fs::exists(dir / kEnvFile)) {
        env = parse_env(dir / kEnvFile, warnings);
    } else if (warnings != nullptr) {
        warnings->push_back("env.csv absent; environment variables set to 0");
    }

    std::set<std::string> participant_ids;
    for (const auto& p : ds.participants) participant_ids.insert(p.participant_id);

    std::vector<std::string> trial_ids;
    for (auto& tr : ds.trials) {
        if (!participant_ids.count(tr.participant_id)) {
            throw Error(Errc::OrphanTrial, "trial " + tr.trial_id + " references unknown participant " +
                                               tr.participant_id);
        }
        auto it = labels.find(tr.trial_id);
        if (it == labels.end()) throw Error(Errc::MissingTrial, "no labels.csv row for trial " + tr.trial_id);
        const LabelRow& lr = it->second;
        if (lr.participant_id != tr.participant_id) {
            throw Error(Errc::MalformedRow, "labels.csv participant mismatch for trial " + tr.trial_id);
        }
        if (!allow_any_duration && (lr.duration < 2.0 || lr.duration > 4.0)) {
            throw Error(Errc::MalformedRow, "trial " + tr.trial_id + " duration outside [2,4] s");
        }
        tr.clip_id = lr.clip_id;
        tr.stimulus = lr.stimulus;
        tr.duration = lr.duration;
        tr.labels = lr.labels;
        if (auto e = env.find(tr.trial_id); e != env.end()) {
            tr.env = e->second;
        } else if (!env.empty()) {
            throw Error(Errc::MissingTrial, "no env.csv row for trial " + tr.trial_id);
        }
        trial_ids.push_back(tr.trial_id);
        labels.erase(it);
    }
    if (!labels.empty()) {
        throw Error(Errc::MissingTrial, "labels.csv trial " + labels.begin()->first + " has no gaze samples");
    }
    if (fs::exists(dir / kLandmarksFile)) {
        ds.landmarks = parse_landmarks(dir / kLandmarksFile, trial_ids, warnings);
    }
    return ds;
}

void write_gaze_log(const std::vector<TrialRecord>& trials, const fs::path& path) {
    std::string out = "trial_id,participant_id,t,x,y,pupil,valid\n";
    for (const auto& tr : trials) {
        check_id(tr.trial_id);
        check_id(tr.participant_id);
        for (const auto& s : tr.samples) {
            out += tr.trial_id;
            out += ',';
            out += tr.participant_id;
            for (double v : {s.t, s.x, s.y, s.pupil}) {
                out += ',';
                out += format_roundtrip(v);
            }
            out += s.valid ? ",1\n" : ",0\n";
        }
    }
    write_file_atomic(path, out);
}

void write_landmarks(const std::vector<LandmarkFrame>& frames, const fs::path& path) {
    std::string out;
    for (const auto& f : frames) {
        out += "{\"trial_id\":" + json(f.trial_id).dump() + ",\"frame_time\":" + format_roundtrip(f.frame_time) +
               ",\"points\":[";
        for (std::size_t i = 0; i < kLandmarkCount; ++i) {
            if (i) out += ',';
            out += '[' + format_roundtrip(f.points[i].x) + ',' + format_roundtrip(f.points[i].y) + ']';
        }
        out += "]}\n";
    }
    write_file_atomic(path, out);
}

void write_dataset(const Dataset& dataset, const fs::path& dir) {
    fs::create_directories(dir);
    {
        std::string out = "participant_id";
        for (std::size_t k = 0; k < kTraitCount; ++k) out += "," + std::string(trait_name(static_cast<Trait>(k)));
        out += '\n';
        for (const auto& p : dataset.participants) {
            check_id(p.participant_id);
            out += p.participant_id;
            for (double v : p.big5_raw) out += "," + format_roundtrip(v);
            out += '\n';
        }
        write_file_atomic(dir / kParticipantsFile, out);
    }
    write_gaze_log(dataset.trials, dir / kGazeFile);
    {
        std::string out = "trial_id,participant_id,clip_id,stimulus,duration";
        for (LabelDim d : kAllLabelDims) out += "," + std::string(label_dim_name(d));
        out += '\n';
        std::string env = "trial_id,ambient_lux,temperature_celsius,stimulus_brightness\n";
        for (const auto& tr : dataset.trials) {
            out += tr.trial_id + ',' + tr.participant_id + ',' + (tr.clip_id.empty() ? "-" : tr.clip_id) + ',' +
                   std::string(emotion_name(tr.stimulus)) + ',' + format_roundtrip(tr.duration);
            for (int r : tr.labels.ratings) out += "," + std::to_string(r);
            out += '\n';
            env += tr.trial_id + ',' + format_roundtrip(tr.env.ambient_lux) + ',' +
                   format_roundtrip(tr.env.temperature_celsius) + ',' +
                   format_roundtrip(tr.env.stimulus_brightness) + '\n';
        }
        write_file_atomic(dir / kLabelsFile, out);
        write_file_atomic(dir / kEnvFile, env);
    }
    write_landmarks(dataset.landmarks, dir / kLandmarksFile);
}

namespace {

constexpr std::array<std::string_view, 4> kFlagNames = {"missing_fixations", "missing_saccades", "missing_pupil",
                                                        "degenerate_regions"};

}  // namespace

void write_features(const FeatureTable& table, const fs::path& path) {
    std::string out = "trial_id,participant_id,clip_id,stimulus";
    for (LabelDim d : kAllLabelDims) out += "," + std::string(label_dim_name(d));
    for (auto name : TrialFeatures::value_names()) out += "," + std::string(name);
    for (auto name : kFlagNames) out += "," + std::string(name);
    out += '\n';
    for (const auto& row : table.rows) {
        check_id(row.trial_id);
        check_id(row.participant_id);
        out += row.trial_id + ',' + row.participant_id + ',' + (row.clip_id.empty() ? "-" : row.clip_id) + ',' +
               std::string(emotion_name(row.stimulus));
        for (int r : row.labels.ratings) out += "," + std::to_string(r);
        for (double v : row.features.values()) out += "," + format_g17(v);
        const auto& f = row.features;
        for (bool b : {f.missing_fixations, f.missing_saccades, f.missing_pupil, f.degenerate_regions}) {
            out += b ? ",1" : ",0";
        }
        out += '\n';
    }
    write_file_atomic(path, out);
}

FeatureTable read_features(const fs::path& path) {
    if (!fs::exists(path)) throw Error(Errc::MissingInput, path.string());
    std::vector<std::string_view> known = {"trial_id", "participant_id", "clip_id", "stimulus"};
    for (LabelDim d : kAllLabelDims) known.push_back(label_dim_name(d));
    for (auto n : TrialFeatures::value_names()) known.push_back(n);
    for (auto n : kFlagNames) known.push_back(n);
    CsvFile csv(path, nullptr, known);
    const auto c_trial = csv.require("trial_id");
    const auto c_part = csv.require("participant_id");
    const auto c_clip = csv.require("clip_id");
    const auto c_stim = csv.require("stimulus");
    std::array<std::size_t, kLabelDimCount> c_label{};
    for (LabelDim d : kAllLabelDims) c_label[static_cast<std::size_t>(d)] = csv.require(label_dim_name(d));
    std::array<std::size_t, TrialFeatures::kValueCount> c_val{};
    for (std::size_t k = 0; k < TrialFeatures::kValueCount; ++k) c_val[k] = csv.require(TrialFeatures::value_names()[k]);
    std::array<std::size_t, kFlagNames.size()> c_flag{};
    for (std::size_t k = 0; k < kFlagNames.size(); ++k) c_flag[k] = csv.require(kFlagNames[k]);

    FeatureTable table;
    for (const auto& row : csv.rows()) {
        FeatureRow fr;
        fr.trial_id = std::string(csv.field(row, c_trial));
        fr.participant_id = std::string(csv.field(row, c_part));
        std::string clip(csv.field(row, c_clip));
        fr.clip_id = clip == "-" ? std::string{} : clip;
        fr.stimulus = parse_emotion(csv.field(row, c_stim));
        for (std::size_t k = 0; k < kLabelDimCount; ++k) fr.labels.ratings[k] = csv.integer(row, c_label[k]);
        std::array<double, TrialFeatures::kValueCount> vals{};
        for (std::size_t k = 0; k < vals.size(); ++k) vals[k] = csv.number(row, c_val[k]);
        fr.features = TrialFeatures::from_values(vals);
        fr.features.missing_fixations = csv.boolean(row, c_flag[0]);
        fr.features.missing_saccades = csv.boolean(row, c_flag[1]);
        fr.features.missing_pupil = csv.boolean(row, c_flag[2]);
        fr.features.degenerate_regions = csv.boolean(row, c_flag[3]);
        table.rows.push_back(std::move(fr));
    }
    return table;
}

void write_sequences(const FeatureTable& table, const fs::path& path) {
    if (table.sequences.size() != table.rows.size()) {
        throw Error(Errc::ShapeMismatch, "sequence count does not match feature rows");
    }
    std::string out = "trial_id,step,time";
    for (auto n : sequence_channel_names()) out += "," + std::string(n);
    out += '\n';
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& seq = table.sequences[i];
        for (std::size_t k = 0; k < kSequenceSteps; ++k) {
            out += table.rows[i].trial_id + ',' + std::to_string(k) + ',' + format_g17(seq.times[k]);
            for (double v : seq.steps[k]) out += "," + format_g17(v);
            out += '\n';
        }
    }
    write_file_atomic(path, out);
}

void read_sequences(FeatureTable& table, const fs::path& path) {
    if (!fs::exists(path)) throw Error(Errc::MissingInput, path.string());
    std::vector<std::string_view> known = {"trial_id", "step", "time"};
    for (auto n : sequence_channel_names()) known.push_back(n);
    CsvFile csv(path, nullptr, known);
    const auto c_trial = csv.require("trial_id");
    const auto c_step = csv.require("step");
    const auto c_time = csv.require("time");
    std::array<std::size_t, kSequenceChannels> c_ch{};
    for (std::size_t k = 0; k < kSequenceChannels; ++k) c_ch[k] = csv.require(sequence_channel_names()[k]);

    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < table.rows.size(); ++i) index[table.rows[i].trial_id] = i;
    table.sequences.assign(table.rows.size(), StepSequence{});
    std::vector<std::size_t> filled(table.rows.size(), 0);
    for (const auto& row : csv.rows()) {
        auto it = index.find(std::string(csv.field(row, c_trial)));
        if (it == index.end()) continue;
        int step = csv.integer(row, c_step);
        if (step < 0 || step >= static_cast<int>(kSequenceSteps)) csv.fail(row, "step outside 0..14");
        auto& seq = table.sequences[it->second];
        seq.times[static_cast<std::size_t>(step)] = csv.number(row, c_time);
        for (std::size_t k = 0; k < kSequenceChannels; ++k) {
            seq.steps[static_cast<std::size_t>(step)][k] = csv.number(row, c_ch[k]);
        }
        ++filled[it->second];
    }
    for (std::size_t i = 0; i < filled.size(); ++i) {
        if (filled[i] != kSequenceSteps) {
            throw Error(Errc::MissingTrial, "sequences.csv lacks 15 steps for trial " + table.rows[i].trial_id);
        }
    }
}

}  // namespace gazeaffect::io
