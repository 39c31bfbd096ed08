#pragma once

#include <optional>
#include <vector>

#include <Eigen/Geometry>

#include "gaitguide/core.hpp"

namespace gaitguide {

struct Pose2 {
    Vec2 position{0.0, 0.0};
    double heading = 0.0;
};

struct Segment {
    Vec2 a;
    Vec2 b;

    double length() const { return (b - a).norm(); }
};

/// 2D world of wall/obstacle segments plus the polygons where GPS fixes are
/// available.
struct WorldModel {
    std::vector<Segment> segments;
    std::vector<std::vector<Vec2>> gps_regions;
    Eigen::AlignedBox2d bounds;

    void add_segment(const Vec2& a, const Vec2& b) { segments.push_back({a, b}); }
    void add_box(const Vec2& lo, const Vec2& hi);
    /// Recompute bounds as the segment hull padded by margin.
    void fit_bounds(double margin = 1.0);
    bool valid() const;
};

double point_segment_distance(const Vec2& p, const Segment& s);

/// Shortest distance from a point to any world segment (infinite if none).
double min_clearance(const WorldModel& world, const Vec2& p);

bool point_in_polygon(const std::vector<Vec2>& poly, const Vec2& p);

bool gps_available(const WorldModel& world, const Vec2& p);

/// Ray/segment intersection parameter t >= 0 along the unit direction, if any.
std::optional<double> ray_segment_intersection(const Vec2& origin, const Vec2& dir,
                                               const Segment& s);

}  // namespace gaitguide
