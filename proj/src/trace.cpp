#include "gaitguide/trace.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace gaitguide {

const char* const kTraceHeader =
    "t,true_x,true_y,true_heading,est_x,est_y,est_heading,mode,L_left,L_right,"
    "phase_left,phase_right,tension_left,tension_right,mod_left,mod_right,audio,"
    "min_scan_range,step_count";

const char* mode_token(NavMode m) { return m == NavMode::OutdoorGps ? "gps" : "slam"; }

const char* tension_token(TensionMode m) {
    switch (m) {
        case TensionMode::Relaxed: return "relaxed";
        case TensionMode::Damped: return "damped";
        case TensionMode::Assist: return "assist";
    }
    return "relaxed";
}

const char* audio_token(AudioCue a) {
    switch (a) {
        case AudioCue::None: return "none";
        case AudioCue::TurnLeft: return "left";
        case AudioCue::TurnRight: return "right";
        case AudioCue::Obstacle: return "obstacle";
    }
    return "none";
}

namespace {

NavMode mode_from(const std::string& s) {
    return s == "gps" ? NavMode::OutdoorGps : NavMode::IndoorSlam;
}

TensionMode tension_from(const std::string& s) {
    if (s == "assist") return TensionMode::Assist;
    if (s == "damped") return TensionMode::Damped;
    return TensionMode::Relaxed;
}

AudioCue audio_from(const std::string& s) {
    if (s == "left") return AudioCue::TurnLeft;
    if (s == "right") return AudioCue::TurnRight;
    if (s == "obstacle") return AudioCue::Obstacle;
    return AudioCue::None;
}

GaitPhase phase_from(const std::string& s) {
    for (int i = 0; i < 8; ++i) {
        if (s == phase_token(static_cast<GaitPhase>(i))) return static_cast<GaitPhase>(i);
    }
    return GaitPhase::InitialContact;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

RunMetrics metrics_from_trace(const Trace& trace) {
    RunMetrics m;
    const TraceMeta& meta = trace.meta;
    if (trace.rows.empty()) return m;

    m.steps = trace.rows.back().step_count;

    const Vec2 start(meta.start_x, meta.start_y);
    const Vec2 dir(std::cos(meta.start_heading), std::sin(meta.start_heading));
    double lat_sq = 0.0;
    Vec2 prev(trace.rows.front().true_x, trace.rows.front().true_y);
    for (const TraceRow& row : trace.rows) {
        const Vec2 p(row.true_x, row.true_y);
        m.path_length += (p - prev).norm();
        prev = p;
        const Vec2 rel = p - start;
        const double lateral = dir.x() * rel.y() - dir.y() * rel.x();
        lat_sq += lateral * lateral;
        if (row.min_scan_range < kCollisionClearance) ++m.collision_count;
    }
    m.lateral_rmse = std::sqrt(lat_sq / static_cast<double>(trace.rows.size()));

    const double last_t = trace.rows.back().t;
    const bool turn_kind =
        meta.kind == ScenarioKind::Turn90 || meta.kind == ScenarioKind::SteerToAngle;
    const double band = deg2rad(kTurnArrivalBandDeg);

    if (turn_kind) {
        const double final_err =
            wrap_angle(trace.rows.back().true_heading - meta.target_heading);
        m.final_heading_error_deg = std::abs(rad2deg(final_err));
        m.arrived = std::abs(final_err) <= band;
        m.completion_time = last_t - meta.lead_in;
        for (const TraceRow& row : trace.rows) {
            if (row.t >= meta.lead_in &&
                std::abs(wrap_angle(row.true_heading - meta.target_heading)) <= band) {
                m.completion_time = row.t - meta.lead_in;
                break;
            }
        }
        m.timed_out = !m.arrived;
    } else if (meta.has_goal) {
        const Vec2 goal(meta.goal_x, meta.goal_y);
        m.final_heading_error_deg = 0.0;
        m.completion_time = last_t;
        for (const TraceRow& row : trace.rows) {
            if ((Vec2(row.est_x, row.est_y) - goal).norm() <= meta.capture_radius) {
                m.arrived = true;
                m.completion_time = row.t;
                break;
            }
        }
        m.timed_out = !m.arrived;
    } else {
        // Straight walk: regulation quality over the full duration.
        m.final_heading_error_deg = std::abs(
            rad2deg(wrap_angle(trace.rows.back().true_heading - meta.target_heading)));
        m.arrived = true;
        m.completion_time = last_t;
    }
    return m;
}

void write_trace_csv(const Trace& trace, std::ostream& out) {
    const TraceMeta& meta = trace.meta;
    out << "# gaitguide-trace v1\n";
    out << "# kind " << kind_token(meta.kind) << "\n";
    out << "# controller " << controller_token(meta.controller) << "\n";
    out << "# seed " << meta.seed << "\n";
    out << "# dt " << fmt(meta.dt) << "\n";
    out << "# duration_cap " << fmt(meta.duration_cap) << "\n";
    out << "# lead_in " << fmt(meta.lead_in) << "\n";
    out << "# start " << fmt(meta.start_x) << " " << fmt(meta.start_y) << " "
        << fmt(meta.start_heading) << "\n";
    out << "# target_heading " << fmt(meta.target_heading) << "\n";
    if (meta.has_goal) {
        out << "# goal " << fmt(meta.goal_x) << " " << fmt(meta.goal_y) << "\n";
    }
    out << "# capture_radius " << fmt(meta.capture_radius) << "\n";
    out << kTraceHeader << "\n";
    for (const TraceRow& r : trace.rows) {
        out << fmt(r.t) << ',' << fmt(r.true_x) << ',' << fmt(r.true_y) << ','
            << fmt(r.true_heading) << ',' << fmt(r.est_x) << ',' << fmt(r.est_y) << ','
            << fmt(r.est_heading) << ',' << mode_token(r.mode) << ',' << fmt(r.L_left) << ','
            << fmt(r.L_right) << ',' << phase_token(r.phase_left) << ','
            << phase_token(r.phase_right) << ',' << tension_token(r.tension_left) << ','
            << tension_token(r.tension_right) << ',' << fmt(r.mod_left) << ','
            << fmt(r.mod_right) << ',' << audio_token(r.audio) << ',' << fmt(r.min_scan_range)
            << ',' << r.step_count << '\n';
    }
}

void write_trace_csv(const Trace& trace, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("trace: cannot open " + path);
    write_trace_csv(trace, f);
}

Trace read_trace_csv(std::istream& in) {
    Trace trace;
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream ss(line.substr(1));
            std::string key;
            ss >> key;
            if (key == "kind") {
                std::string v;
                ss >> v;
                for (int i = 0; i < 6; ++i) {
                    if (v == kind_token(static_cast<ScenarioKind>(i))) {
                        trace.meta.kind = static_cast<ScenarioKind>(i);
                    }
                }
            } else if (key == "controller") {
                std::string v;
                ss >> v;
                for (int i = 0; i < 3; ++i) {
                    if (v == controller_token(static_cast<ControllerKind>(i))) {
                        trace.meta.controller = static_cast<ControllerKind>(i);
                    }
                }
            } else if (key == "seed") {
                ss >> trace.meta.seed;
            } else if (key == "dt") {
                ss >> trace.meta.dt;
            } else if (key == "duration_cap") {
                ss >> trace.meta.duration_cap;
            } else if (key == "lead_in") {
                ss >> trace.meta.lead_in;
            } else if (key == "start") {
                ss >> trace.meta.start_x >> trace.meta.start_y >> trace.meta.start_heading;
            } else if (key == "target_heading") {
                ss >> trace.meta.target_heading;
            } else if (key == "goal") {
                ss >> trace.meta.goal_x >> trace.meta.goal_y;
                trace.meta.has_goal = true;
            } else if (key == "capture_radius") {
                ss >> trace.meta.capture_radius;
            }
            continue;
        }
        if (!header_seen) {
            if (line != kTraceHeader) {
                throw std::runtime_error("trace: unexpected header row: " + line);
            }
            header_seen = true;
            continue;
        }
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ss(line);
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (cells.size() != 19) {
            throw std::runtime_error("trace: expected 19 columns, got " +
                                     std::to_string(cells.size()));
        }
        TraceRow r;
        r.t = std::stod(cells[0]);
        r.true_x = std::stod(cells[1]);
        r.true_y = std::stod(cells[2]);
        r.true_heading = std::stod(cells[3]);
        r.est_x = std::stod(cells[4]);
        r.est_y = std::stod(cells[5]);
        r.est_heading = std::stod(cells[6]);
        r.mode = mode_from(cells[7]);
        r.L_left = std::stod(cells[8]);
        r.L_right = std::stod(cells[9]);
        r.phase_left = phase_from(cells[10]);
        r.phase_right = phase_from(cells[11]);
        r.tension_left = tension_from(cells[12]);
        r.tension_right = tension_from(cells[13]);
        r.mod_left = std::stod(cells[14]);
        r.mod_right = std::stod(cells[15]);
        r.audio = audio_from(cells[16]);
        r.min_scan_range = std::stod(cells[17]);
        r.step_count = std::stoull(cells[18]);
        trace.rows.push_back(r);
    }
    if (!header_seen) throw std::runtime_error("trace: no header row found");
    return trace;
}

Trace read_trace_csv_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("trace: cannot open " + path);
    return read_trace_csv(f);
}

}  // namespace gaitguide
