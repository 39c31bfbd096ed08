#include "gaitguide/planner.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

namespace gaitguide {

namespace {

constexpr double kSqrt2 = 1.41421356237309504880;

struct StepCost {
    int straight = 0;
    int diag = 0;

    double value() const { return straight + diag * kSqrt2; }
};

/// Occupied cells (log-odds > 0) dilated by the inflation radius.
std::vector<char> inflate(const OccupancyGrid& grid, double radius) {
    const int nx = grid.nx(), ny = grid.ny();
    std::vector<char> blocked(static_cast<std::size_t>(nx) * ny, 0);
    const int r_cells = static_cast<int>(std::ceil(radius / grid.resolution));
    std::vector<std::pair<int, int>> disk;
    for (int dx = -r_cells; dx <= r_cells; ++dx) {
        for (int dy = -r_cells; dy <= r_cells; ++dy) {
            if (std::hypot(dx, dy) * grid.resolution <= radius + 1e-12) {
                disk.emplace_back(dx, dy);
            }
        }
    }
    for (int ix = 0; ix < nx; ++ix) {
        for (int iy = 0; iy < ny; ++iy) {
            if (grid.log_odds(ix, iy) > 0.0f) {
                for (const auto& [dx, dy] : disk) {
                    const int x = ix + dx, y = iy + dy;
                    if (x >= 0 && y >= 0 && x < nx && y < ny) {
                        blocked[static_cast<std::size_t>(x) * ny + y] = 1;
                    }
                }
            }
        }
    }
    return blocked;
}

}  // namespace

PlanResult plan_path(const OccupancyGrid& grid, const Vec2& start, const Vec2& goal,
                     double inflation_radius) {
    PlanResult result;
    const int nx = grid.nx(), ny = grid.ny();
    const Eigen::Vector2i sc = grid.cell_of(start), gc = grid.cell_of(goal);
    if (!grid.inside(sc.x(), sc.y())) {
        result.status = PlanStatus::StartBlocked;
        return result;
    }
    if (!grid.inside(gc.x(), gc.y())) {
        result.status = PlanStatus::GoalBlocked;
        return result;
    }

    const std::vector<char> blocked = inflate(grid, inflation_radius);
    auto is_blocked = [&](int x, int y) {
        return blocked[static_cast<std::size_t>(x) * ny + y] != 0;
    };
    if (is_blocked(sc.x(), sc.y())) {
        result.status = PlanStatus::StartBlocked;
        return result;
    }
    if (is_blocked(gc.x(), gc.y())) {
        result.status = PlanStatus::GoalBlocked;
        return result;
    }

    const std::size_t n_cells = static_cast<std::size_t>(nx) * ny;
    std::vector<StepCost> g(n_cells);
    std::vector<char> closed(n_cells, 0), open_seen(n_cells, 0);
    std::vector<int> parent(n_cells, -1);
    auto idx = [&](int x, int y) { return static_cast<std::size_t>(x) * ny + y; };
    auto row_major = [&](std::size_t i) {
        // Row-major order for tie-breaking: y major, then x.
        const int x = static_cast<int>(i) / ny, y = static_cast<int>(i) % ny;
        return static_cast<std::size_t>(y) * nx + x;
    };

    struct Node {
        double f;
        double g_value;
        std::size_t order;  // row-major cell order
        std::size_t cell;
    };
    auto worse = [](const Node& a, const Node& b) {
        if (a.f != b.f) return a.f > b.f;
        if (a.g_value != b.g_value) return a.g_value < b.g_value;  // prefer higher g
        return a.order > b.order;
    };
    std::priority_queue<Node, std::vector<Node>, decltype(worse)> open(worse);

    auto heuristic = [&](int x, int y) {
        return std::hypot(static_cast<double>(x - gc.x()), static_cast<double>(y - gc.y()));
    };

    const std::size_t start_idx = idx(sc.x(), sc.y());
    g[start_idx] = {};
    open_seen[start_idx] = 1;
    open.push({heuristic(sc.x(), sc.y()), 0.0, row_major(start_idx), start_idx});

    static constexpr int kDx[8] = {1, -1, 0, 0, 1, 1, -1, -1};
    static constexpr int kDy[8] = {0, 0, 1, -1, 1, -1, 1, -1};

    bool found = false;
    while (!open.empty()) {
        const Node top = open.top();
        open.pop();
        if (closed[top.cell]) continue;
        closed[top.cell] = 1;
        const int cx = static_cast<int>(top.cell) / ny, cy = static_cast<int>(top.cell) % ny;
        if (cx == gc.x() && cy == gc.y()) {
            found = true;
            break;
        }
        for (int k = 0; k < 8; ++k) {
            const int x = cx + kDx[k], y = cy + kDy[k];
            if (x < 0 || y < 0 || x >= nx || y >= ny) continue;
            if (is_blocked(x, y)) continue;
            const bool diagonal = k >= 4;
            if (diagonal && (is_blocked(cx, y) || is_blocked(x, cy))) {
                continue;  // no corner cutting
            }
            const std::size_t ni = idx(x, y);
            if (closed[ni]) continue;
            StepCost cand = g[top.cell];
            if (diagonal) {
                ++cand.diag;
            } else {
                ++cand.straight;
            }
            if (!open_seen[ni] || cand.value() < g[ni].value()) {
                g[ni] = cand;
                parent[ni] = static_cast<int>(top.cell);
                open_seen[ni] = 1;
                open.push({cand.value() + heuristic(x, y), cand.value(), row_major(ni), ni});
            }
        }
    }

    if (!found) {
        result.status = PlanStatus::NoPath;
        return result;
    }

    std::vector<Vec2> rev;
    for (int i = static_cast<int>(idx(gc.x(), gc.y())); i >= 0; i = parent[i]) {
        rev.push_back(grid.center_of(i / ny, i % ny));
        if (static_cast<std::size_t>(i) == start_idx) break;
    }
    std::reverse(rev.begin(), rev.end());
    result.path.waypoints = std::move(rev);
    result.path.total_cost = g[idx(gc.x(), gc.y())].value() * grid.resolution;
    result.status = PlanStatus::Ok;
    return result;
}

std::optional<double> avoid_obstacles(const ScanFrame& scan, double desired_heading,
                                      double d_safe, double corridor) {
    if (scan.n_beams < 10) {
        throw DegenerateScan("avoid_obstacles: malformed scan");
    }

    struct Threat {
        double angle;
        double halfwidth;
    };
    std::vector<Threat> threats;
    for (int i = 0; i < scan.n_beams; ++i) {
        const double r = scan.ranges[i];
        if (!std::isfinite(r) || r >= d_safe) continue;
        const double ratio = std::min(1.0, 0.5 * corridor / std::max(r, 1e-3));
        threats.push_back({scan.beam_angle(i), std::asin(ratio)});
    }

    auto admissible = [&](double h) {
        for (const Threat& th : threats) {
            if (std::abs(wrap_angle(th.angle - h)) <= th.halfwidth) return false;
        }
        return true;
    };

    if (admissible(desired_heading)) return desired_heading;

    const double prefer = desired_heading >= 0.0 ? 1.0 : -1.0;
    bool have = false;
    double best = 0.0, best_diff = std::numeric_limits<double>::infinity();
    for (int i = 0; i < scan.n_beams; ++i) {
        const double h = scan.beam_angle(i);
        if (!admissible(h)) continue;
        const double diff = std::abs(wrap_angle(h - desired_heading));
        const bool tie = have && std::abs(diff - best_diff) < 1e-12;
        const bool wins =
            !have || (tie ? wrap_angle(h - desired_heading) * prefer >
                                wrap_angle(best - desired_heading) * prefer
                          : diff < best_diff);
        if (wins) {
            have = true;
            best = h;
            best_diff = diff;
        }
    }
    if (!have) return std::nullopt;
    return best;
}

FollowResult WaypointFollower::update(const Vec2& position, double capture_radius) {
    FollowResult out;
    if (path_.waypoints.empty()) {
        out.arrived = true;
        return out;
    }
    while (index_ + 1 < path_.waypoints.size() &&
           (path_.waypoints[index_] - position).norm() <= capture_radius) {
        ++index_;
    }
    const Vec2& target = path_.waypoints[index_];
    out.index = index_;
    if (index_ + 1 == path_.waypoints.size() &&
        (target - position).norm() <= capture_radius) {
        out.arrived = true;
    }
    const Vec2 d = target - position;
    out.heading = d.norm() > 1e-12 ? std::atan2(d.y(), d.x()) : 0.0;
    return out;
}

}  // namespace gaitguide
