#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gaitguide/guidance.hpp"
#include "gaitguide/nav.hpp"
#include "gaitguide/scenario.hpp"

namespace gaitguide {

/// Clearance below which a tick counts as environmental contact.
inline constexpr double kCollisionClearance = 0.25;
/// Heading band that counts as having completed a commanded turn.
inline constexpr double kTurnArrivalBandDeg = 5.0;

struct TraceRow {
    double t = 0.0;
    double true_x = 0.0, true_y = 0.0, true_heading = 0.0;
    double est_x = 0.0, est_y = 0.0, est_heading = 0.0;
    NavMode mode = NavMode::IndoorSlam;
    double L_left = 0.0, L_right = 0.0;
    GaitPhase phase_left = GaitPhase::InitialContact;
    GaitPhase phase_right = GaitPhase::InitialContact;
    TensionMode tension_left = TensionMode::Relaxed;
    TensionMode tension_right = TensionMode::Relaxed;
    double mod_left = 0.0, mod_right = 0.0;
    AudioCue audio = AudioCue::None;
    double min_scan_range = 0.0;
    std::uint64_t step_count = 0;
};

/// Everything needed to recompute metrics from the rows alone.
struct TraceMeta {
    ScenarioKind kind = ScenarioKind::StraightWalk;
    ControllerKind controller = ControllerKind::Guided;
    std::uint64_t seed = 1;
    double dt = 0.01;
    double duration_cap = 30.0;
    double lead_in = 3.0;
    double start_x = 0.0, start_y = 0.0, start_heading = 0.0;
    double target_heading = 0.0;  // absolute, for turn kinds
    bool has_goal = false;
    double goal_x = 0.0, goal_y = 0.0;
    double capture_radius = 0.5;
};

struct Trace {
    TraceMeta meta;
    std::vector<TraceRow> rows;
};

struct RunMetrics {
    double completion_time = 0.0;      // s (turn kinds: measured from lead_in)
    double path_length = 0.0;          // m
    double lateral_rmse = 0.0;         // m, vs the start-heading reference ray
    double final_heading_error_deg = 0.0;  // signed
    std::uint64_t collision_count = 0;     // ticks with clearance < 0.25 m
    std::uint64_t steps = 0;
    bool arrived = false;
    bool timed_out = false;
};

/// Metrics are a pure function of the trace; run_scenario itself uses this.
RunMetrics metrics_from_trace(const Trace& trace);

extern const char* const kTraceHeader;

void write_trace_csv(const Trace& trace, std::ostream& out);
void write_trace_csv(const Trace& trace, const std::string& path);
Trace read_trace_csv(std::istream& in);
Trace read_trace_csv_file(const std::string& path);

const char* mode_token(NavMode m);
const char* tension_token(TensionMode m);
const char* audio_token(AudioCue a);

}  // namespace gaitguide
