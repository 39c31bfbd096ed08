#include "gaitguide/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace gaitguide {

namespace {

constexpr const char* kHeaderLine = "gaitguide-scenario v1";

const char* kKindTokens[] = {"turn90",          "straight_walk", "steer_to_angle",
                             "obstacle_course", "hallway",       "outdoor_route"};
const char* kControllerTokens[] = {"guided", "cane", "audio"};

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<double> parse_numbers(const std::string& value, const std::string& what,
                                  std::size_t expect_min) {
    std::istringstream ss(value);
    std::vector<double> out;
    double v;
    while (ss >> v) out.push_back(v);
    if (out.size() < expect_min) {
        throw ScenarioInvalid("scenario: bad numeric list for " + what + ": '" + value + "'");
    }
    return out;
}

double parse_number(const std::string& value, const std::string& what) {
    return parse_numbers(value, what, 1)[0];
}

bool parse_flag(const std::string& value, const std::string& what) {
    if (value == "on" || value == "true" || value == "1") return true;
    if (value == "off" || value == "false" || value == "0") return false;
    throw ScenarioInvalid("scenario: bad flag for " + what + ": '" + value + "'");
}

}  // namespace

const char* kind_token(ScenarioKind k) { return kKindTokens[static_cast<int>(k)]; }
const char* controller_token(ControllerKind k) { return kControllerTokens[static_cast<int>(k)]; }

void ScenarioConfig::validate() const {
    if (!(duration_cap > 0.0)) throw ScenarioInvalid("scenario: duration_cap must be positive");
    if (!(dt > 0.0)) throw ScenarioInvalid("scenario: dt must be positive");
    if (!(base_stride > 0.0) || !(cadence > 0.0) || !(hip_width > 0.0)) {
        throw ScenarioInvalid("scenario: pedestrian parameters must be positive");
    }
    if (!(control.kp > 0.0) || !(control.deadband > 0.0) || !(control.mod_max > 0.0)) {
        throw ScenarioInvalid("scenario: controller parameters must be positive");
    }
    if (!(control.deadband < control.audio_threshold)) {
        throw ScenarioInvalid("scenario: deadband must stay below audio_threshold");
    }
    if (!world.valid()) throw ScenarioInvalid("scenario: degenerate world segment");
    const bool needs_goal = kind == ScenarioKind::ObstacleCourse ||
                            kind == ScenarioKind::Hallway || kind == ScenarioKind::OutdoorRoute;
    if (needs_goal && !has_goal) throw ScenarioInvalid("scenario: this kind needs a goal point");
    if (kind == ScenarioKind::ObstacleCourse &&
        (obstacles_min < 0 || obstacles_max < obstacles_min)) {
        throw ScenarioInvalid("scenario: bad obstacle count range");
    }
}

std::vector<ScenarioEntry> parse_scenario_entries(std::istream& in) {
    std::string line;
    bool saw_header = false;
    std::string section;
    std::vector<ScenarioEntry> entries;
    while (std::getline(in, line)) {
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) continue;
        if (!saw_header) {
            if (line != kHeaderLine) {
                throw ScenarioInvalid("scenario: missing '" + std::string(kHeaderLine) +
                                      "' header");
            }
            saw_header = true;
            continue;
        }
        if (line.front() == '[') {
            if (line.back() != ']') throw ScenarioInvalid("scenario: malformed section: " + line);
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ScenarioInvalid("scenario: expected key = value, got: " + line);
        }
        entries.push_back({section, trim(line.substr(0, eq)), trim(line.substr(eq + 1))});
    }
    if (!saw_header) throw ScenarioInvalid("scenario: empty file");
    return entries;
}

ScenarioConfig build_scenario(const std::vector<ScenarioEntry>& entries) {
    ScenarioConfig cfg;
    cfg.world.gps_regions.clear();
    bool bounds_given = false;
    for (const ScenarioEntry& e : entries) {
        const std::string id = e.section + "." + e.key;
        if (id == "scenario.kind") {
            bool ok = false;
            for (int i = 0; i < 6; ++i) {
                if (e.value == kKindTokens[i]) {
                    cfg.kind = static_cast<ScenarioKind>(i);
                    ok = true;
                }
            }
            if (!ok) throw ScenarioInvalid("scenario: unknown kind '" + e.value + "'");
        } else if (id == "scenario.controller") {
            bool ok = false;
            for (int i = 0; i < 3; ++i) {
                if (e.value == kControllerTokens[i]) {
                    cfg.controller = static_cast<ControllerKind>(i);
                    ok = true;
                }
            }
            if (!ok) throw ScenarioInvalid("scenario: unknown controller '" + e.value + "'");
        } else if (id == "scenario.seed") {
            cfg.seed = static_cast<std::uint64_t>(parse_number(e.value, id));
        } else if (id == "scenario.dt") {
            cfg.dt = parse_number(e.value, id);
        } else if (id == "scenario.duration_cap") {
            cfg.duration_cap = parse_number(e.value, id);
        } else if (id == "scenario.lead_in") {
            cfg.lead_in = parse_number(e.value, id);
        } else if (id == "scenario.sensor_warmup") {
            cfg.sensor_warmup = parse_number(e.value, id);
        } else if (id == "pedestrian.base_stride") {
            cfg.base_stride = parse_number(e.value, id);
        } else if (id == "pedestrian.cadence") {
            cfg.cadence = parse_number(e.value, id);
        } else if (id == "pedestrian.hip_width") {
            cfg.hip_width = parse_number(e.value, id);
        } else if (id == "pedestrian.start") {
            const auto v = parse_numbers(e.value, id, 3);
            cfg.start_pos = Vec2(v[0], v[1]);
            cfg.start_heading = v[2];
        } else if (id == "controller.kp") {
            cfg.control.kp = parse_number(e.value, id);
        } else if (id == "controller.deadband_deg") {
            cfg.control.deadband = deg2rad(parse_number(e.value, id));
        } else if (id == "controller.audio_threshold_deg") {
            cfg.control.audio_threshold = deg2rad(parse_number(e.value, id));
        } else if (id == "controller.mod_max") {
            cfg.control.mod_max = parse_number(e.value, id);
        } else if (id == "noise.rope_sigma") {
            cfg.noise.rope_sigma = parse_number(e.value, id);
        } else if (id == "noise.imu_sigma_deg") {
            cfg.noise.imu_sigma_deg = parse_number(e.value, id);
        } else if (id == "noise.imu_drift_deg_s") {
            cfg.noise.imu_drift_deg_s = parse_number(e.value, id);
        } else if (id == "noise.lidar_sigma") {
            cfg.noise.lidar_sigma = parse_number(e.value, id);
        } else if (id == "noise.gps_sigma") {
            cfg.noise.gps_sigma = parse_number(e.value, id);
        } else if (id == "goal.turn_deg") {
            cfg.turn_deg = parse_number(e.value, id);
        } else if (id == "goal.point") {
            const auto v = parse_numbers(e.value, id, 2);
            cfg.goal = Vec2(v[0], v[1]);
            cfg.has_goal = true;
        } else if (id == "goal.capture_radius") {
            cfg.capture_radius = parse_number(e.value, id);
        } else if (id == "features.slam") {
            cfg.slam_enabled = parse_flag(e.value, id);
        } else if (id == "features.lidar_period_ticks") {
            cfg.lidar_period_ticks = static_cast<int>(parse_number(e.value, id));
        } else if (id == "features.gps_period_ticks") {
            cfg.gps_period_ticks = static_cast<int>(parse_number(e.value, id));
        } else if (id == "features.n_beams") {
            cfg.n_beams = static_cast<int>(parse_number(e.value, id));
        } else if (id == "features.localize_beam_step") {
            cfg.localize_beam_step = static_cast<int>(parse_number(e.value, id));
        } else if (id == "features.d_safe") {
            cfg.d_safe = parse_number(e.value, id);
        } else if (id == "features.corridor") {
            cfg.corridor = parse_number(e.value, id);
        } else if (id == "features.replan_interval") {
            cfg.replan_interval = parse_number(e.value, id);
        } else if (id == "world.segment") {
            const auto v = parse_numbers(e.value, id, 4);
            cfg.world.add_segment(Vec2(v[0], v[1]), Vec2(v[2], v[3]));
        } else if (id == "world.box") {
            const auto v = parse_numbers(e.value, id, 4);
            cfg.world.add_box(Vec2(v[0], v[1]), Vec2(v[2], v[3]));
        } else if (id == "world.gps_region") {
            const auto v = parse_numbers(e.value, id, 6);
            if (v.size() % 2 != 0) throw ScenarioInvalid("scenario: odd gps_region vertex list");
            std::vector<Vec2> poly;
            for (std::size_t i = 0; i < v.size(); i += 2) poly.emplace_back(v[i], v[i + 1]);
            cfg.world.gps_regions.push_back(std::move(poly));
        } else if (id == "world.bounds") {
            const auto v = parse_numbers(e.value, id, 4);
            cfg.world.bounds.setEmpty();
            cfg.world.bounds.extend(Vec2(v[0], v[1]));
            cfg.world.bounds.extend(Vec2(v[2], v[3]));
            bounds_given = true;
        } else if (id == "world.room") {
            const auto v = parse_numbers(e.value, id, 2);
            cfg.room_w = v[0];
            cfg.room_h = v[1];
        } else if (id == "world.obstacles_min") {
            cfg.obstacles_min = static_cast<int>(parse_number(e.value, id));
        } else if (id == "world.obstacles_max") {
            cfg.obstacles_max = static_cast<int>(parse_number(e.value, id));
        } else if (id == "route.waypoint") {
            const auto v = parse_numbers(e.value, id, 2);
            cfg.route.emplace_back(v[0], v[1]);
        } else {
            throw ScenarioInvalid("scenario: unknown key '" + id + "'");
        }
    }
    if (!bounds_given) cfg.world.fit_bounds();
    cfg.validate();
    return cfg;
}

ScenarioConfig parse_scenario(std::istream& in) {
    return build_scenario(parse_scenario_entries(in));
}

ScenarioConfig load_scenario(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ScenarioInvalid("scenario: cannot open " + path);
    return parse_scenario(f);
}

void apply_override(std::vector<ScenarioEntry>& entries, const std::string& spec) {
    const auto eq = spec.find('=');
    const auto dot = spec.find('.');
    if (eq == std::string::npos || dot == std::string::npos || dot > eq) {
        throw ScenarioInvalid("override: expected section.key=value, got '" + spec + "'");
    }
    const std::string section = spec.substr(0, dot);
    const std::string key = spec.substr(dot + 1, eq - dot - 1);
    const std::string value = spec.substr(eq + 1);
    for (auto it = entries.rbegin(); it != entries.rend(); ++it) {
        if (it->section == section && it->key == key) {
            it->value = value;
            return;
        }
    }
    entries.push_back({section, key, value});
}

void save_scenario(const ScenarioConfig& cfg, std::ostream& out) {
    out.precision(12);
    out << kHeaderLine << "\n\n";
    out << "[scenario]\n";
    out << "kind = " << kind_token(cfg.kind) << "\n";
    out << "controller = " << controller_token(cfg.controller) << "\n";
    out << "seed = " << cfg.seed << "\n";
    out << "dt = " << cfg.dt << "\n";
    out << "duration_cap = " << cfg.duration_cap << "\n";
    out << "lead_in = " << cfg.lead_in << "\n";
    out << "sensor_warmup = " << cfg.sensor_warmup << "\n\n";
    out << "[pedestrian]\n";
    out << "base_stride = " << cfg.base_stride << "\n";
    out << "cadence = " << cfg.cadence << "\n";
    out << "hip_width = " << cfg.hip_width << "\n";
    out << "start = " << cfg.start_pos.x() << " " << cfg.start_pos.y() << " "
        << cfg.start_heading << "\n\n";
    out << "[controller]\n";
    out << "kp = " << cfg.control.kp << "\n";
    out << "deadband_deg = " << rad2deg(cfg.control.deadband) << "\n";
    out << "audio_threshold_deg = " << rad2deg(cfg.control.audio_threshold) << "\n";
    out << "mod_max = " << cfg.control.mod_max << "\n\n";
    out << "[noise]\n";
    out << "rope_sigma = " << cfg.noise.rope_sigma << "\n";
    out << "imu_sigma_deg = " << cfg.noise.imu_sigma_deg << "\n";
    out << "imu_drift_deg_s = " << cfg.noise.imu_drift_deg_s << "\n";
    out << "lidar_sigma = " << cfg.noise.lidar_sigma << "\n";
    out << "gps_sigma = " << cfg.noise.gps_sigma << "\n\n";
    out << "[goal]\n";
    out << "turn_deg = " << cfg.turn_deg << "\n";
    if (cfg.has_goal) {
        out << "point = " << cfg.goal.x() << " " << cfg.goal.y() << "\n";
    }
    out << "capture_radius = " << cfg.capture_radius << "\n\n";
    out << "[features]\n";
    out << "slam = " << (cfg.slam_enabled ? "on" : "off") << "\n";
    out << "lidar_period_ticks = " << cfg.lidar_period_ticks << "\n";
    out << "gps_period_ticks = " << cfg.gps_period_ticks << "\n";
    out << "n_beams = " << cfg.n_beams << "\n";
    out << "localize_beam_step = " << cfg.localize_beam_step << "\n";
    out << "d_safe = " << cfg.d_safe << "\n";
    out << "corridor = " << cfg.corridor << "\n";
    out << "replan_interval = " << cfg.replan_interval << "\n\n";
    out << "[world]\n";
    for (const Segment& s : cfg.world.segments) {
        out << "segment = " << s.a.x() << " " << s.a.y() << " " << s.b.x() << " " << s.b.y()
            << "\n";
    }
    for (const auto& region : cfg.world.gps_regions) {
        out << "gps_region =";
        for (const Vec2& v : region) out << " " << v.x() << " " << v.y();
        out << "\n";
    }
    if (!cfg.world.bounds.isEmpty()) {
        out << "bounds = " << cfg.world.bounds.min().x() << " " << cfg.world.bounds.min().y()
            << " " << cfg.world.bounds.max().x() << " " << cfg.world.bounds.max().y() << "\n";
    }
    if (cfg.kind == ScenarioKind::ObstacleCourse) {
        out << "room = " << cfg.room_w << " " << cfg.room_h << "\n";
        out << "obstacles_min = " << cfg.obstacles_min << "\n";
        out << "obstacles_max = " << cfg.obstacles_max << "\n";
    }
    if (!cfg.route.empty()) {
        out << "\n[route]\n";
        for (const Vec2& w : cfg.route) {
            out << "waypoint = " << w.x() << " " << w.y() << "\n";
        }
    }
}

WorldModel obstacle_course_world(const ScenarioConfig& cfg, std::uint64_t seed) {
    WorldModel world = cfg.world;
    Rng rng(mix_seed(seed, 0x0b57ac1eULL));
    const int span = cfg.obstacles_max - cfg.obstacles_min + 1;
    const int target = cfg.obstacles_min + static_cast<int>(rng.next_u64() % span);

    struct Box {
        Vec2 lo, hi;
    };
    std::vector<Box> placed;
    const double margin_wall = 1.3;   // obstacle edge to wall
    const double margin_pair = 1.35;  // obstacle edge to obstacle edge
    const double margin_pose = 1.2;   // obstacle edge to start/goal

    for (int n = 0; n < target; ++n) {
        for (int attempt = 0; attempt < 200; ++attempt) {
            const double hw = rng.uniform(0.15, 0.30);
            const double hh = rng.uniform(0.15, 0.30);
            const double cx = rng.uniform(margin_wall + hw, cfg.room_w - margin_wall - hw);
            const double cy = rng.uniform(margin_wall + hh, cfg.room_h - margin_wall - hh);
            const Box box{Vec2(cx - hw, cy - hh), Vec2(cx + hw, cy + hh)};

            auto edge_gap = [&](const Box& other) {
                const double gx = std::max({other.lo.x() - box.hi.x(), box.lo.x() - other.hi.x(), 0.0});
                const double gy = std::max({other.lo.y() - box.hi.y(), box.lo.y() - other.hi.y(), 0.0});
                if (gx == 0.0 && gy == 0.0) return 0.0;
                return std::hypot(gx, gy);
            };
            auto pose_gap = [&](const Vec2& p) {
                const double gx = std::max({box.lo.x() - p.x(), p.x() - box.hi.x(), 0.0});
                const double gy = std::max({box.lo.y() - p.y(), p.y() - box.hi.y(), 0.0});
                return std::hypot(gx, gy);
            };

            bool ok = pose_gap(cfg.start_pos) >= margin_pose && pose_gap(cfg.goal) >= margin_pose;
            for (const Box& other : placed) {
                ok = ok && edge_gap(other) >= margin_pair;
            }
            if (ok) {
                placed.push_back(box);
                break;
            }
        }
    }
    for (const Box& box : placed) {
        world.add_box(box.lo, box.hi);
    }
    if (world.bounds.isEmpty()) world.fit_bounds();
    return world;
}

ScenarioConfig default_scenario(ScenarioKind kind) {
    ScenarioConfig cfg;
    cfg.kind = kind;
    cfg.seed = 1;
    switch (kind) {
        case ScenarioKind::Turn90: {
            cfg.duration_cap = 10.0;
            cfg.lead_in = 3.0;
            cfg.turn_deg = 90.0;
            cfg.start_pos = Vec2(0.0, 0.0);
            cfg.world.bounds.setEmpty();
            cfg.world.bounds.extend(Vec2(-50.0, -50.0));
            cfg.world.bounds.extend(Vec2(50.0, 50.0));
            break;
        }
        case ScenarioKind::StraightWalk: {
            cfg.duration_cap = 23.0;  // 20 s of regulation after the warm-up
            cfg.lead_in = 3.0;
            cfg.turn_deg = 0.0;
            cfg.start_pos = Vec2(0.0, 0.0);
            cfg.world.bounds.setEmpty();
            cfg.world.bounds.extend(Vec2(-5.0, -25.0));
            cfg.world.bounds.extend(Vec2(25.0, 25.0));
            break;
        }
        case ScenarioKind::SteerToAngle: {
            cfg.duration_cap = 13.0;  // 10 s of steering after the warm-up
            cfg.lead_in = 3.0;
            cfg.turn_deg = 90.0;
            cfg.noise.imu_sigma_deg = 1.0;
            cfg.start_pos = Vec2(0.0, 0.0);
            cfg.world.bounds.setEmpty();
            cfg.world.bounds.extend(Vec2(-30.0, -30.0));
            cfg.world.bounds.extend(Vec2(30.0, 30.0));
            break;
        }
        case ScenarioKind::ObstacleCourse: {
            cfg.duration_cap = 90.0;
            cfg.lead_in = 0.0;
            cfg.room_w = 10.0;
            cfg.room_h = 6.0;
            cfg.world.add_box(Vec2(0.0, 0.0), Vec2(10.0, 6.0));
            cfg.start_pos = Vec2(1.0, 3.0);
            cfg.goal = Vec2(9.0, 3.0);
            cfg.has_goal = true;
            cfg.slam_enabled = true;
            cfg.localize_beam_step = 4;
            cfg.noise.lidar_sigma = 0.01;
            break;
        }
        case ScenarioKind::Hallway: {
            cfg.duration_cap = 120.0;
            cfg.lead_in = 0.0;
            // L-shaped corridor, 2 m wide: 20 m east leg, 8 m north leg.
            cfg.world.add_segment(Vec2(0, 0), Vec2(20, 0));
            cfg.world.add_segment(Vec2(20, 0), Vec2(20, 10));
            cfg.world.add_segment(Vec2(20, 10), Vec2(18, 10));
            cfg.world.add_segment(Vec2(18, 10), Vec2(18, 2));
            cfg.world.add_segment(Vec2(18, 2), Vec2(0, 2));
            cfg.world.add_segment(Vec2(0, 2), Vec2(0, 0));
            cfg.start_pos = Vec2(1.0, 1.0);
            cfg.goal = Vec2(19.0, 9.0);
            cfg.has_goal = true;
            cfg.slam_enabled = true;
            cfg.noise.lidar_sigma = 0.01;
            cfg.d_safe = 0.7;  // a 2 m corridor leaves at most ~1 m of clearance
            break;
        }
        case ScenarioKind::OutdoorRoute: {
            cfg.duration_cap = 120.0;
            cfg.lead_in = 0.0;
            // Open yard with a fence line along the route and a building block.
            cfg.world.add_segment(Vec2(0, 0.9), Vec2(18, 0.9));
            cfg.world.add_box(Vec2(5, 4), Vec2(13, 12));
            cfg.world.add_segment(Vec2(17.1, 1), Vec2(17.1, 14));
            cfg.world.gps_regions.push_back(
                {Vec2(-2, -2), Vec2(22, -2), Vec2(22, 16), Vec2(-2, 16)});
            cfg.start_pos = Vec2(1.0, 2.0);
            cfg.route = {Vec2(16.0, 2.0)};
            cfg.goal = Vec2(16.0, 13.0);
            cfg.has_goal = true;
            cfg.noise.lidar_sigma = 0.01;
            cfg.d_safe = 0.7;
            break;
        }
    }
    if (cfg.world.bounds.isEmpty()) cfg.world.fit_bounds();
    cfg.validate();
    return cfg;
}

}  // namespace gaitguide
