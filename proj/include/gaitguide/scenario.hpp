#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "gaitguide/guidance.hpp"
#include "gaitguide/world.hpp"

namespace gaitguide {

class ScenarioInvalid : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class ScenarioKind : int {
    Turn90 = 0,
    StraightWalk,
    SteerToAngle,
    ObstacleCourse,
    Hallway,
    OutdoorRoute,
};

enum class ControllerKind : int { Guided = 0, CaneContact, AudioOnly };

const char* kind_token(ScenarioKind k);
const char* controller_token(ControllerKind k);

struct NoiseParams {
    double rope_sigma = 0.0;      // m
    double imu_sigma_deg = 0.0;   // deg, white
    double imu_drift_deg_s = 0.0; // deg/s bias ramp
    double lidar_sigma = 0.0;     // m
    double gps_sigma = 0.8;       // m per axis
};

/// Declarative experiment definition; (config, seed) fully determines a run.
struct ScenarioConfig {
    ScenarioKind kind = ScenarioKind::StraightWalk;
    ControllerKind controller = ControllerKind::Guided;
    std::uint64_t seed = 1;
    double dt = 0.01;
    double duration_cap = 30.0;
    double lead_in = 3.0;         // straight walking before the maneuver engages
    double sensor_warmup = 1.2;   // standing interval while the recognizer baselines

    // pedestrian
    double base_stride = 0.45;
    double cadence = 1.7777777778;
    double hip_width = 0.30;
    Vec2 start_pos{0.0, 0.0};
    double start_heading = 0.0;

    ControllerConfig control;
    NoiseParams noise;

    // goal / maneuver
    double turn_deg = 90.0;  // Turn90 and SteerToAngle target, relative
    Vec2 goal{0.0, 0.0};
    bool has_goal = false;
    double capture_radius = 0.5;
    std::vector<Vec2> route;  // OutdoorRoute waypoints (goal appended last)

    // perception / planner features
    bool slam_enabled = false;
    int lidar_period_ticks = 10;
    int gps_period_ticks = 10;
    int n_beams = 360;
    int localize_beam_step = 2;
    double d_safe = 1.0;
    double corridor = 0.6;
    double replan_interval = 1.0;

    WorldModel world;

    // obstacle-course generation
    double room_w = 10.0;
    double room_h = 6.0;
    int obstacles_min = 5;
    int obstacles_max = 8;

    void validate() const;  // throws ScenarioInvalid
};

/// Raw key/value line of a scenario file, order-preserving.
struct ScenarioEntry {
    std::string section;
    std::string key;
    std::string value;
};

std::vector<ScenarioEntry> parse_scenario_entries(std::istream& in);
ScenarioConfig build_scenario(const std::vector<ScenarioEntry>& entries);

ScenarioConfig parse_scenario(std::istream& in);
ScenarioConfig load_scenario(const std::string& path);
void save_scenario(const ScenarioConfig& cfg, std::ostream& out);

/// Apply a "section.key=value" override onto raw entries (replaces the last
/// matching entry or appends a new one).
void apply_override(std::vector<ScenarioEntry>& entries, const std::string& spec);

/// Room walls plus seeded boxes with generous pairwise gaps; obstacles keep
/// clear of the start/goal discs.
WorldModel obstacle_course_world(const ScenarioConfig& cfg, std::uint64_t seed);

/// Built-in default configuration for each scenario kind (the same content
/// as the files under scenarios/).
ScenarioConfig default_scenario(ScenarioKind kind);

}  // namespace gaitguide
