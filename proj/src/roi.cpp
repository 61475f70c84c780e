#include "gazeaffect/roi.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gazeaffect/error.hpp"

namespace gazeaffect::roi {

namespace {

double cross(Point o, Point a, Point b) { return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x); }

constexpr int kDiskSides = 16;

bool on_segment(Point a, Point b, Point p, double eps) {
    const double len = std::hypot(b.x - a.x, b.y - a.y);
    if (len == 0.0) return std::hypot(p.x - a.x, p.y - a.y) <= eps;
    if (std::abs(cross(a, b, p)) / len > eps) return false;
    const double proj = ((p.x - a.x) * (b.x - a.x) + (p.y - a.y) * (b.y - a.y)) / len;
    return proj >= -eps && proj <= len + eps;
}

}  // namespace

bool ConvexPolygon::contains(Point p, double eps) const {
    const auto& v = vertices;
    if (v.empty()) return false;
    if (v.size() == 1) return std::hypot(p.x - v[0].x, p.y - v[0].y) <= eps;
    if (v.size() == 2) return on_segment(v[0], v[1], p, eps);
    for (std::size_t i = 0; i < v.size(); ++i) {
        const Point a = v[i];
        const Point b = v[(i + 1) % v.size()];
        const double len = std::hypot(b.x - a.x, b.y - a.y);
        if (cross(a, b, p) < -eps * len) return false;
    }
    return true;
}

bool ConvexPolygon::is_convex() const {
    const auto& v = vertices;
    if (v.size() < 3) return false;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (cross(v[i], v[(i + 1) % v.size()], v[(i + 2) % v.size()]) <= 0.0) return false;
    }
    return true;
}

std::vector<Point> convex_hull(std::span<const Point> points) {
    std::vector<Point> pts(points.begin(), points.end());
    std::sort(pts.begin(), pts.end(), [](Point a, Point b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
    pts.erase(std::unique(pts.begin(), pts.end(), [](Point a, Point b) { return a.x == b.x && a.y == b.y; }),
              pts.end());
    if (pts.size() < 3) return pts;
    std::vector<Point> hull(2 * pts.size());
    std::size_t k = 0;
    for (const Point& p : pts) {
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0.0) --k;
        hull[k++] = p;
    }
    for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
        while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    return hull;
}

ConvexPolygon dilated_hull(std::span<const Point> points, double margin, bool* degenerate) {
    if (points.empty()) throw Error(Errc::InvalidConfig, "region has no landmark points");
    std::vector<Point> hull = convex_hull(points);
    const bool is_degenerate = hull.size() < 3;
    if (degenerate) *degenerate = is_degenerate;
    if (margin <= 0.0) return ConvexPolygon{hull};

    // Align the disk polygon with the segment so a degenerate region becomes a
    // capsule whose long sides sit exactly `margin` from the segment.
    double phase = 0.0;
    if (hull.size() == 2) phase = std::atan2(hull[1].y - hull[0].y, hull[1].x - hull[0].x);
    const double step = 2.0 * std::numbers::pi / kDiskSides;
    const double radius = margin / std::cos(step / 2.0);
    std::vector<Point> candidates;
    candidates.reserve(hull.size() * kDiskSides);
    for (const Point& v : hull) {
        for (int k = 0; k < kDiskSides; ++k) {
            const double a = phase + (k + 0.5) * step;
            candidates.push_back({v.x + radius * std::cos(a), v.y + radius * std::sin(a)});
        }
    }
    return ConvexPolygon{convex_hull(candidates)};
}

RegionMap RegionMap::standard68() {
    RegionMap m;
    auto range = [](std::size_t lo, std::size_t hi) {
        std::vector<std::size_t> v;
        for (std::size_t i = lo; i <= hi; ++i) v.push_back(i);
        return v;
    };
    m.indices[static_cast<std::size_t>(Region::Eyes)] = range(36, 47);
    m.indices[static_cast<std::size_t>(Region::Eyebrows)] = range(17, 26);
    m.indices[static_cast<std::size_t>(Region::Nose)] = range(27, 35);
    m.indices[static_cast<std::size_t>(Region::Mouth)] = range(48, 67);
    return m;
}

RegionMap RegionMap::from_config(const config::Document& doc) {
    RegionMap m = standard68();
    m.margin = doc.number("regions.margin", m.margin);
    if (m.margin < 0.0) throw Error(Errc::InvalidConfig, "regions.margin must be >= 0");
    for (std::size_t r = 0; r < kFaceRegionCount; ++r) {
        const std::string key = "regions." + std::string(region_name(static_cast<Region>(r)));
        if (auto idx = doc.numbers(key)) {
            std::vector<std::size_t> out;
            for (double d : *idx) {
                if (d < 0 || d >= static_cast<double>(kLandmarkCount) || d != std::floor(d)) {
                    throw Error(Errc::InvalidConfig, key + ": landmark index out of range");
                }
                out.push_back(static_cast<std::size_t>(d));
            }
            if (out.empty()) throw Error(Errc::InvalidConfig, key + ": empty index list");
            m.indices[r] = std::move(out);
        }
    }
    if (auto prio = doc.strings("regions.priority")) {
        if (prio->size() != kFaceRegionCount) throw Error(Errc::InvalidConfig, "regions.priority needs 4 regions");
        std::array<bool, kFaceRegionCount> seen{};
        for (std::size_t i = 0; i < kFaceRegionCount; ++i) {
            bool found = false;
            for (std::size_t r = 0; r < kFaceRegionCount; ++r) {
                if (region_name(static_cast<Region>(r)) == (*prio)[i] && !seen[r]) {
                    m.priority[i] = static_cast<Region>(r);
                    seen[r] = found = true;
                }
            }
            if (!found) throw Error(Errc::InvalidConfig, "regions.priority: bad entry '" + (*prio)[i] + "'");
        }
    }
    return m;
}

RegionHulls build_hulls(const LandmarkFrame& frame, const RegionMap& map) {
    RegionHulls out;
    out.frame_time = frame.frame_time;
    for (std::size_t r = 0; r < kFaceRegionCount; ++r) {
        std::vector<Point> pts;
        for (std::size_t idx : map.indices[r]) pts.push_back(frame.points.at(idx));
        out.regions[r].polygon = dilated_hull(pts, map.margin, &out.regions[r].degenerate);
    }
    return out;
}

Region label_gaze(Point p, const RegionHulls& hulls, const RegionMap& map) {
    for (Region r : map.priority) {
        if (hulls.regions[static_cast<std::size_t>(r)].polygon.contains(p)) return r;
    }
    return Region::Outside;
}

RegionProportions region_proportions(std::span<const Region> labels) {
    RegionProportions out;
    if (labels.empty()) {
        out.proportions.fill(1.0 / static_cast<double>(kRegionCount));
        out.degenerate = true;
        return out;
    }
    std::array<std::size_t, kRegionCount> counts{};
    for (Region r : labels) ++counts[static_cast<std::size_t>(r)];
    for (std::size_t r = 0; r < kRegionCount; ++r) {
        out.proportions[r] = static_cast<double>(counts[r]) / static_cast<double>(labels.size());
    }
    return out;
}

TrialHullIndex::TrialHullIndex(std::span<const LandmarkFrame> frames, const RegionMap& map) {
    hulls_.reserve(frames.size());
    for (const auto& f : frames) hulls_.push_back(build_hulls(f, map));
    std::stable_sort(hulls_.begin(), hulls_.end(),
                     [](const RegionHulls& a, const RegionHulls& b) { return a.frame_time < b.frame_time; });
}

const RegionHulls& TrialHullIndex::nearest(double t) const {
    if (hulls_.empty()) throw Error(Errc::MissingTrial, "no landmark frames for trial");
    auto it = std::lower_bound(hulls_.begin(), hulls_.end(), t,
                               [](const RegionHulls& h, double v) { return h.frame_time < v; });
    if (it == hulls_.begin()) return *it;
    if (it == hulls_.end()) return hulls_.back();
    auto prev = std::prev(it);
    return (t - prev->frame_time) <= (it->frame_time - t) ? *prev : *it;
}

}  // namespace gazeaffect::roi
