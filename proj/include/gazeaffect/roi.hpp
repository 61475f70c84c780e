#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "gazeaffect/config.hpp"
#include "gazeaffect/feature_types.hpp"
#include "gazeaffect/types.hpp"

namespace gazeaffect::roi {

/// Counter-clockwise convex polygon. Fewer than 3 vertices means a point or segment.
struct ConvexPolygon {
    std::vector<Point> vertices;

    /// Boundary counts as inside (tolerance `eps` in normalized units).
    bool contains(Point p, double eps = 1e-12) const;
    bool is_convex() const;
};

/// Andrew's monotone chain; CCW, collinear boundary points dropped.
std::vector<Point> convex_hull(std::span<const Point> points);

/// Outward dilation of the hull of `points` by `margin` (Minkowski sum with a
/// circumscribed 16-gon, so every point within `margin` of the hull is inside).
/// For collinear input the 16-gon is aligned with the segment, giving a capsule
/// of width exactly 2*margin.
ConvexPolygon dilated_hull(std::span<const Point> points, double margin, bool* degenerate = nullptr);

struct RegionHull {
    ConvexPolygon polygon;
    bool degenerate = false;
};

struct RegionHulls {
    std::array<RegionHull, kFaceRegionCount> regions;  // indexed by Region (eyes..mouth)
    double frame_time = 0.0;
};

/// Region -> landmark indices, lookup priority and dilation margin.
struct RegionMap {
    std::array<std::vector<std::size_t>, kFaceRegionCount> indices;
    std::array<Region, kFaceRegionCount> priority{Region::Eyes, Region::Eyebrows, Region::Nose, Region::Mouth};
    double margin = 0.02;

    /// 68-point convention: eyes 36-47, eyebrows 17-26, nose 27-35, mouth 48-67.
    static RegionMap standard68();
    /// Reads `[regions]` (margin, priority, eyes/eyebrows/nose/mouth index arrays).
    /// Missing keys fall back to standard68().
    static RegionMap from_config(const config::Document& doc);
};

RegionHulls build_hulls(const LandmarkFrame& frame, const RegionMap& map);

/// First containing region in priority order, else Outside.
Region label_gaze(Point p, const RegionHulls& hulls, const RegionMap& map);

struct RegionProportions {
    std::array<double, kRegionCount> proportions{};
    bool degenerate = false;  // no fixations: uniform vector
};

RegionProportions region_proportions(std::span<const Region> fixation_labels);

/// Hulls for one trial's frames with nearest-in-time lookup.
class TrialHullIndex {
public:
    TrialHullIndex() = default;
    TrialHullIndex(std::span<const LandmarkFrame> frames, const RegionMap& map);

    bool empty() const { return hulls_.empty(); }
    /// Frame whose frame_time is nearest `t` (ties go to the earlier frame).
    const RegionHulls& nearest(double t) const;

private:
    std::vector<RegionHulls> hulls_;
};

}  // namespace gazeaffect::roi
