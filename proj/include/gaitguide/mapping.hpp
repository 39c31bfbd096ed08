#pragma once

#include <stdexcept>
#include <string>

#include "gaitguide/sensors.hpp"

namespace gaitguide {

class DegenerateScan : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Log-odds occupancy grid. Cell (ix, iy) covers
/// [origin + (ix, iy) * res, origin + (ix+1, iy+1) * res).
struct OccupancyGrid {
    static constexpr float kClamp = 5.0f;
    static constexpr float kLogOddsHit = 0.85f;
    static constexpr float kLogOddsFree = 0.4f;

    double resolution = 0.10;
    Vec2 origin{0.0, 0.0};
    Eigen::ArrayXXf log_odds;  // indexed (ix, iy)

    static OccupancyGrid for_bounds(const Eigen::AlignedBox2d& bounds, double resolution = 0.10);

    int nx() const { return static_cast<int>(log_odds.rows()); }
    int ny() const { return static_cast<int>(log_odds.cols()); }
    bool inside(int ix, int iy) const {
        return ix >= 0 && iy >= 0 && ix < nx() && iy < ny();
    }
    Eigen::Vector2i cell_of(const Vec2& p) const {
        return {static_cast<int>(std::floor((p.x() - origin.x()) / resolution)),
                static_cast<int>(std::floor((p.y() - origin.y()) / resolution))};
    }
    Vec2 center_of(int ix, int iy) const {
        return origin + resolution * Vec2(ix + 0.5, iy + 0.5);
    }
    float at(const Vec2& p) const {
        const Eigen::Vector2i c = cell_of(p);
        return inside(c.x(), c.y()) ? log_odds(c.x(), c.y()) : 0.0f;
    }
};

/// Fold one scan into the grid: every traversed cell loses kLogOddsFree,
/// every hit cell gains kLogOddsHit, clamped to +-kClamp. Beams without a
/// return clear free space out to the maximum range.
void update_occupancy(OccupancyGrid& grid, const Pose2& pose_hat, const ScanFrame& scan);

struct LocalizeResult {
    Pose2 pose;
    double confidence = 0.0;  // normalized score margin in [0, 1]
};

/// Correlative scan matching: exhaustive search over a fixed perturbation
/// window around the prior (dx, dy in +-0.2 m step 0.05, dtheta in +-10 deg
/// step 2 deg), scoring summed log-odds at beam endpoints. Ties prefer the
/// smallest (|dtheta|, |dx|+|dy|). beam_step subsamples beams for speed.
LocalizeResult localize(const OccupancyGrid& grid, const Pose2& prior, const ScanFrame& scan,
                        int beam_step = 1);

/// P5 PGM export: 255 free, 0 occupied, 128 unknown (|log-odds| < 0.1), plus
/// a sidecar "<path>.meta" with resolution and origin.
void write_pgm(const OccupancyGrid& grid, const std::string& path);

}  // namespace gaitguide
