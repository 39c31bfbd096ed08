#pragma once

#include <optional>
#include <vector>

#include "gaitguide/mapping.hpp"

namespace gaitguide {

struct PlannedPath {
    std::vector<Vec2> waypoints;  // cell centers, 8-connected
    double total_cost = 0.0;      // meters

    bool empty() const { return waypoints.empty(); }
};

enum class PlanStatus : int { Ok = 0, NoPath, StartBlocked, GoalBlocked };

struct PlanResult {
    PlanStatus status = PlanStatus::NoPath;
    PlannedPath path;

    bool ok() const { return status == PlanStatus::Ok; }
};

/// Optimal A* over the 8-connected grid. Cells with positive log-odds are
/// treated as occupied and inflated by inflation_radius; diagonal moves may
/// not cut occupied corners. Costs are exact counts of straight and diagonal
/// steps, so the result is bit-comparable with an independent Dijkstra.
PlanResult plan_path(const OccupancyGrid& grid, const Vec2& start, const Vec2& goal,
                     double inflation_radius = 0.35);

/// Gap-based reactive heading selection. Angles are relative to the scan
/// frame. A candidate heading is admissible when every beam that could
/// intrude on a corridor of the given width within d_safe stays clear of it;
/// the admissible heading closest to desired_heading wins, ties resolving
/// toward the sign of the desired offset. Returns nullopt when fully blocked.
std::optional<double> avoid_obstacles(const ScanFrame& scan, double desired_heading,
                                      double d_safe = 1.0, double corridor = 0.6);

struct FollowResult {
    bool arrived = false;
    double heading = 0.0;
    std::size_t index = 0;
};

/// Pure-pursuit style waypoint chasing with a monotone index.
class WaypointFollower {
public:
    explicit WaypointFollower(PlannedPath path = {}) : path_(std::move(path)) {}

    void reset(PlannedPath path) {
        path_ = std::move(path);
        index_ = 0;
    }
    const PlannedPath& path() const { return path_; }

    FollowResult update(const Vec2& position, double capture_radius = 0.5);

private:
    PlannedPath path_;
    std::size_t index_ = 0;
};

}  // namespace gaitguide
