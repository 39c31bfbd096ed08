#pragma once

#include <optional>

#include "gaitguide/mapping.hpp"
#include "gaitguide/planner.hpp"
#include "gaitguide/trace.hpp"

namespace gaitguide {

struct RunResult {
    RunMetrics metrics;
    Trace trace;
    std::optional<OccupancyGrid> grid;  // present when SLAM ran
    PlannedPath planned_path;           // last route the planner committed to
};

/// Deterministic fixed-step closed-loop run of one scenario:
/// gait model -> rope samples -> recognizer -> sensors/belief -> planner ->
/// guidance -> actuation. Identical (config, seed) gives identical traces.
RunResult run_scenario(const ScenarioConfig& cfg);

struct BatchRow {
    std::uint64_t seed = 0;
    RunMetrics metrics;
    bool failed = false;       // the run threw; error kept in the report
    std::string error;
};

struct BatchReport {
    ScenarioKind kind = ScenarioKind::StraightWalk;
    ControllerKind controller = ControllerKind::Guided;
    std::vector<BatchRow> rows;  // ordered by seed
    double mean_completion = 0.0;
    double stddev_completion = 0.0;
    double mean_path_length = 0.0;
    double rmse_final_heading_deg = 0.0;
    double arrived_fraction = 0.0;
    double collision_free_fraction = 0.0;  // arrived with zero contact ticks
    bool pass = false;                     // kind-specific rule, see docs
};

/// Run [seed_first, seed_last] with up to `jobs` concurrent workers. Results
/// and aggregates are ordered by seed, so the report is independent of the
/// worker count.
BatchReport run_batch(const ScenarioConfig& cfg, std::uint64_t seed_first,
                      std::uint64_t seed_last, int jobs = 0);

void write_batch_csv(const BatchReport& report, std::ostream& out);
void print_batch_summary(const BatchReport& report, std::ostream& out);

}  // namespace gaitguide
