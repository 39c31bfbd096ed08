#include "gaitguide/mapping.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <vector>

namespace gaitguide {

OccupancyGrid OccupancyGrid::for_bounds(const Eigen::AlignedBox2d& bounds, double resolution) {
    OccupancyGrid grid;
    grid.resolution = resolution;
    grid.origin = bounds.min();
    const int nx = std::max(1, static_cast<int>(std::ceil(bounds.sizes().x() / resolution)));
    const int ny = std::max(1, static_cast<int>(std::ceil(bounds.sizes().y() / resolution)));
    grid.log_odds = Eigen::ArrayXXf::Zero(nx, ny);
    return grid;
}

namespace {

inline void bump(OccupancyGrid& grid, int ix, int iy, float delta) {
    if (!grid.inside(ix, iy)) return;
    float& v = grid.log_odds(ix, iy);
    v = std::clamp(v + delta, -OccupancyGrid::kClamp, OccupancyGrid::kClamp);
}

}  // namespace

void update_occupancy(OccupancyGrid& grid, const Pose2& pose_hat, const ScanFrame& scan) {
    const Eigen::Vector2i start = grid.cell_of(pose_hat.position);
    for (int i = 0; i < scan.n_beams; ++i) {
        const double r = scan.ranges[i];
        const bool hit = std::isfinite(r);
        const double reach = hit ? r : kLidarMaxRange;
        const double angle = pose_hat.heading + scan.beam_angle(i);
        const Vec2 end = pose_hat.position + reach * Vec2(std::cos(angle), std::sin(angle));
        const Eigen::Vector2i stop = grid.cell_of(end);

        // Bresenham from the sensor cell to the endpoint cell.
        int x = start.x(), y = start.y();
        const int dx = std::abs(stop.x() - x), dy = -std::abs(stop.y() - y);
        const int sx = x < stop.x() ? 1 : -1, sy = y < stop.y() ? 1 : -1;
        int err = dx + dy;
        while (x != stop.x() || y != stop.y()) {
            bump(grid, x, y, -OccupancyGrid::kLogOddsFree);
            const int e2 = 2 * err;
            if (e2 >= dy) {
                err += dy;
                x += sx;
            }
            if (e2 <= dx) {
                err += dx;
                y += sy;
            }
        }
        if (hit) {
            bump(grid, stop.x(), stop.y(), OccupancyGrid::kLogOddsHit);
        } else {
            bump(grid, stop.x(), stop.y(), -OccupancyGrid::kLogOddsFree);
        }
    }
}

LocalizeResult localize(const OccupancyGrid& grid, const Pose2& prior, const ScanFrame& scan,
                        int beam_step) {
    if (scan.n_beams < 10 || scan.valid_count() < 10) {
        throw DegenerateScan("localize: fewer than 10 valid beams");
    }
    beam_step = std::max(1, beam_step);

    struct Candidate {
        double score = -std::numeric_limits<double>::infinity();
        double dth = 0.0, dx = 0.0, dy = 0.0;
    };

    static constexpr double kXyHalf = 0.2, kXyStep = 0.05;
    static constexpr double kThHalfDeg = 10.0, kThStepDeg = 2.0;

    Candidate best;
    double sum = 0.0, worst = std::numeric_limits<double>::infinity();
    int count = 0;

    std::vector<Vec2> endpoints;  // beam endpoints relative to the sensor
    endpoints.reserve(static_cast<std::size_t>(scan.n_beams / beam_step) + 1);

    for (int it = -static_cast<int>(kThHalfDeg / kThStepDeg);
         it <= static_cast<int>(kThHalfDeg / kThStepDeg); ++it) {
        const double dth = deg2rad(it * kThStepDeg);
        endpoints.clear();
        for (int i = 0; i < scan.n_beams; i += beam_step) {
            const double r = scan.ranges[i];
            if (!std::isfinite(r)) continue;
            const double angle = prior.heading + dth + scan.beam_angle(i);
            endpoints.emplace_back(r * std::cos(angle), r * std::sin(angle));
        }
        for (int ix = -static_cast<int>(kXyHalf / kXyStep);
             ix <= static_cast<int>(kXyHalf / kXyStep); ++ix) {
            for (int iy = -static_cast<int>(kXyHalf / kXyStep);
                 iy <= static_cast<int>(kXyHalf / kXyStep); ++iy) {
                const Vec2 offset = prior.position + Vec2(ix * kXyStep, iy * kXyStep);
                double score = 0.0;
                for (const Vec2& e : endpoints) {
                    score += grid.at(offset + e);
                }
                sum += score;
                worst = std::min(worst, score);
                ++count;

                const double dx = ix * kXyStep, dy = iy * kXyStep;
                const bool better =
                    score > best.score ||
                    (score == best.score &&
                     std::make_tuple(std::abs(dth), std::abs(dx) + std::abs(dy), dth, dx, dy) <
                         std::make_tuple(std::abs(best.dth), std::abs(best.dx) + std::abs(best.dy),
                                         best.dth, best.dx, best.dy));
                if (better) best = {score, dth, dx, dy};
            }
        }
    }

    LocalizeResult out;
    out.pose.position = prior.position + Vec2(best.dx, best.dy);
    out.pose.heading = wrap_angle(prior.heading + best.dth);
    const double mean = sum / count;
    const double spread = best.score - worst;
    out.confidence = spread > 0.0 ? std::clamp((best.score - mean) / spread, 0.0, 1.0) : 0.0;
    return out;
}

void write_pgm(const OccupancyGrid& grid, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("write_pgm: cannot open " + path);
    f << "P5\n" << grid.nx() << " " << grid.ny() << "\n255\n";
    // Row 0 of the image is the top of the map (max y).
    for (int iy = grid.ny() - 1; iy >= 0; --iy) {
        for (int ix = 0; ix < grid.nx(); ++ix) {
            const float lo = grid.log_odds(ix, iy);
            unsigned char v = 128;
            if (lo > 0.1f) v = 0;
            else if (lo < -0.1f) v = 255;
            f.put(static_cast<char>(v));
        }
    }
    std::ofstream meta(path + ".meta");
    if (!meta) throw std::runtime_error("write_pgm: cannot open " + path + ".meta");
    meta << "resolution " << grid.resolution << "\n"
         << "origin " << grid.origin.x() << " " << grid.origin.y() << "\n"
         << "size " << grid.nx() << " " << grid.ny() << "\n";
}

}  // namespace gaitguide
