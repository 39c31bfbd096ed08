#include "gaitguide/world.hpp"

#include <cmath>
#include <limits>

namespace gaitguide {

void WorldModel::add_box(const Vec2& lo, const Vec2& hi) {
    add_segment(Vec2(lo.x(), lo.y()), Vec2(hi.x(), lo.y()));
    add_segment(Vec2(hi.x(), lo.y()), Vec2(hi.x(), hi.y()));
    add_segment(Vec2(hi.x(), hi.y()), Vec2(lo.x(), hi.y()));
    add_segment(Vec2(lo.x(), hi.y()), Vec2(lo.x(), lo.y()));
}

void WorldModel::fit_bounds(double margin) {
    bounds.setEmpty();
    for (const Segment& s : segments) {
        bounds.extend(s.a);
        bounds.extend(s.b);
    }
    if (!bounds.isEmpty()) {
        bounds.extend(bounds.min() - Vec2(margin, margin));
        bounds.extend(bounds.max() + Vec2(margin, margin));
    }
}

bool WorldModel::valid() const {
    for (const Segment& s : segments) {
        if (!(s.length() > 1e-6)) return false;
    }
    return true;
}

double point_segment_distance(const Vec2& p, const Segment& s) {
    const Vec2 d = s.b - s.a;
    const double len2 = d.squaredNorm();
    if (len2 <= 0.0) return (p - s.a).norm();
    const double u = std::clamp((p - s.a).dot(d) / len2, 0.0, 1.0);
    return (p - (s.a + u * d)).norm();
}

double min_clearance(const WorldModel& world, const Vec2& p) {
    double best = std::numeric_limits<double>::infinity();
    for (const Segment& s : world.segments) {
        best = std::min(best, point_segment_distance(p, s));
    }
    return best;
}

bool point_in_polygon(const std::vector<Vec2>& poly, const Vec2& p) {
    // Crossing-number test; boundary points count as inside.
    bool inside = false;
    const std::size_t n = poly.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const Vec2& a = poly[j];
        const Vec2& b = poly[i];
        if (point_segment_distance(p, {a, b}) < 1e-12) return true;
        if ((b.y() > p.y()) != (a.y() > p.y())) {
            const double x_cross = b.x() + (p.y() - b.y()) * (a.x() - b.x()) / (a.y() - b.y());
            if (p.x() < x_cross) inside = !inside;
        }
    }
    return inside;
}

bool gps_available(const WorldModel& world, const Vec2& p) {
    for (const auto& region : world.gps_regions) {
        if (region.size() >= 3 && point_in_polygon(region, p)) return true;
    }
    return false;
}

std::optional<double> ray_segment_intersection(const Vec2& origin, const Vec2& dir,
                                               const Segment& s) {
    const Vec2 v1 = s.a - origin;
    const Vec2 v2 = s.b - s.a;
    const double denom = dir.x() * v2.y() - dir.y() * v2.x();
    if (denom == 0.0) return std::nullopt;  // parallel or degenerate
    const double t = (v1.x() * v2.y() - v1.y() * v2.x()) / denom;
    const double u = (v1.x() * dir.y() - v1.y() * dir.x()) / denom;
    if (t < 0.0 || u < 0.0 || u > 1.0) return std::nullopt;
    return t;
}

}  // namespace gaitguide
