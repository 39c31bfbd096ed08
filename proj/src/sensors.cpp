#include "gaitguide/sensors.hpp"

#include <cmath>

namespace gaitguide {

ScanFrame simulate_lidar(const Pose2& true_pose, const WorldModel& world, int n_beams,
                         std::uint64_t rng_seed, double sigma, double stamp) {
    if (!world.bounds.isEmpty() && !world.bounds.contains(true_pose.position)) {
        throw PoseOutOfBounds("simulate_lidar: pose outside world bounds");
    }
    ScanFrame scan;
    scan.stamp = stamp;
    scan.n_beams = n_beams;
    scan.ranges = Eigen::ArrayXd::Constant(n_beams, ScanFrame::kNoReturn);

    Rng rng(rng_seed);
    for (int i = 0; i < n_beams; ++i) {
        const double angle = true_pose.heading + scan.beam_angle(i);
        const Vec2 dir(std::cos(angle), std::sin(angle));
        double best = ScanFrame::kNoReturn;
        for (const Segment& s : world.segments) {
            if (auto t = ray_segment_intersection(true_pose.position, dir, s)) {
                best = std::min(best, *t);
            }
        }
        // Draw noise for every beam so the substream layout does not depend
        // on the world geometry.
        const double noise = sigma > 0.0 ? sigma * rng.gaussian() : 0.0;
        if (best <= kLidarMaxRange) {
            scan.ranges[i] = std::clamp(best + noise, 1e-6, kLidarMaxRange);
        }
    }
    return scan;
}

std::optional<Vec2> simulate_gps(const Vec2& true_position, const WorldModel& world,
                                 std::uint64_t rng_seed, double sigma) {
    if (!gps_available(world, true_position)) return std::nullopt;
    Rng rng(rng_seed);
    if (sigma <= 0.0) return true_position;
    return Vec2(true_position.x() + sigma * rng.gaussian(),
                true_position.y() + sigma * rng.gaussian());
}

}  // namespace gaitguide
