#include "gaitguide/simulate.hpp"

#include <atomic>
#include <deque>
#include <cmath>
#include <ostream>
#include <thread>

namespace gaitguide {

namespace {

// Substream identifiers for deriving independent RNG streams from the seed.
constexpr std::uint64_t kRopeStream = 0xa1;
constexpr std::uint64_t kImuStream = 0xa2;
constexpr std::uint64_t kLidarStream = 0xa3;
constexpr std::uint64_t kGpsStream = 0xa4;
constexpr std::uint64_t kAudioStream = 0xa5;

// CaneContact baseline: touch-range sensing, slow sweep speed near contact.
constexpr double kCaneReach = 1.2;        // m
constexpr double kCaneSlowSpeed = 0.55;   // m/s near walls
constexpr double kCaneStandoff = 0.45;    // m reactive standoff
constexpr double kAudioEventPeriod = 2.0; // s between spoken corrections
constexpr double kAudioExecSigmaDeg = 4.0;

constexpr double kLocalizeConfidenceGate = 0.15;
constexpr double kClearanceCap = 999.0;
constexpr double kHaltTurnRate = 1.5;       // rad/s while stopped and blocked
constexpr double kEmergencyStandoff = 0.55; // stop-and-turn when this close ahead

ScanFrame clamp_scan_range(const ScanFrame& scan, double reach) {
    ScanFrame out = scan;
    for (int i = 0; i < out.n_beams; ++i) {
        if (std::isfinite(out.ranges[i]) && out.ranges[i] > reach) {
            out.ranges[i] = ScanFrame::kNoReturn;
        }
    }
    return out;
}

double bearing_to(const Vec2& from, const Vec2& to) {
    const Vec2 d = to - from;
    return d.norm() > 1e-12 ? std::atan2(d.y(), d.x()) : 0.0;
}

/// Bodies do not pass through walls: clamp a motion segment at the first
/// wall contact, keeping a small standoff.
Vec2 clamp_motion(const WorldModel& world, const Vec2& from, const Vec2& to) {
    const Vec2 d = to - from;
    const double len = d.norm();
    if (len <= 1e-12) return to;
    const Vec2 dir = d / len;
    double nearest = std::numeric_limits<double>::infinity();
    for (const Segment& s : world.segments) {
        if (auto t = ray_segment_intersection(from, dir, s)) {
            nearest = std::min(nearest, *t);
        }
    }
    constexpr double kBodyStandoff = 0.05;
    if (nearest - kBodyStandoff >= len) return to;
    return from + std::max(0.0, nearest - kBodyStandoff) * dir;
}

/// Short heading history so steps can be integrated along the heading that
/// was current at the (backdated) step event time.
class HeadingHistory {
public:
    void push(double t, double heading) {
        buf_.emplace_back(t, heading);
        while (buf_.size() > 2 && buf_.front().first < t - 2.0) buf_.pop_front();
    }
    double at(double t) const {
        for (auto it = buf_.rbegin(); it != buf_.rend(); ++it) {
            if (it->first <= t) return it->second;
        }
        return buf_.empty() ? 0.0 : buf_.front().second;
    }

private:
    std::deque<std::pair<double, double>> buf_;
};

/// Does any forward waypoint sit within the inflation radius of an occupied cell?
bool path_blocked(const OccupancyGrid& grid, const PlannedPath& path, std::size_t from_index,
                  double inflation_radius) {
    const int r_cells = static_cast<int>(std::ceil(inflation_radius / grid.resolution));
    for (std::size_t i = from_index; i < path.waypoints.size(); ++i) {
        const Eigen::Vector2i c = grid.cell_of(path.waypoints[i]);
        for (int dx = -r_cells; dx <= r_cells; ++dx) {
            for (int dy = -r_cells; dy <= r_cells; ++dy) {
                const int x = c.x() + dx, y = c.y() + dy;
                if (!grid.inside(x, y) || grid.log_odds(x, y) <= 0.0f) continue;
                if (std::hypot(dx, dy) * grid.resolution <= inflation_radius) return true;
            }
        }
    }
    return false;
}

}  // namespace

RunResult run_scenario(const ScenarioConfig& cfg) {
    cfg.validate();

    const WorldModel world = cfg.kind == ScenarioKind::ObstacleCourse
                                 ? obstacle_course_world(cfg, cfg.seed)
                                 : cfg.world;
    const bool has_geometry = !world.segments.empty();
    const bool goal_kind = cfg.kind == ScenarioKind::ObstacleCourse ||
                           cfg.kind == ScenarioKind::Hallway ||
                           cfg.kind == ScenarioKind::OutdoorRoute;
    const bool slam = cfg.slam_enabled && has_geometry && cfg.controller == ControllerKind::Guided;

    const double dt = cfg.dt;
    const int n_ticks = static_cast<int>(std::lround(cfg.duration_cap / dt));
    const double target_heading =
        wrap_angle(cfg.start_heading + deg2rad(cfg.turn_deg));

    const RopeGeometry geom = RopeGeometry::standard();
    PedestrianState walker = make_standing(cfg.start_pos, cfg.start_heading, cfg.base_stride,
                                           cfg.cadence, cfg.hip_width);
    bool walking = false;

    RecognizerConfig rcfg;
    rcfg.sample_rate_hz = 1.0 / dt;
    rcfg.default_stride_m = cfg.base_stride;
    GaitRecognizer recognizer(rcfg, geom);
    bool calibrated = false;

    ImuSim imu(mix_seed(cfg.seed, kImuStream), cfg.noise.imu_sigma_deg,
               cfg.noise.imu_drift_deg_s);
    Rng audio_rng(mix_seed(cfg.seed, kAudioStream));

    NavEstimate nav;
    nav.pose_hat = {cfg.start_pos, cfg.start_heading};

    RunResult result;
    if (slam) {
        result.grid = OccupancyGrid::for_bounds(world.bounds);
    }
    bool map_primed = false;

    WaypointFollower follower;
    bool have_path = false;
    if (cfg.kind == ScenarioKind::OutdoorRoute) {
        PlannedPath route;
        route.waypoints = cfg.route;
        route.waypoints.push_back(cfg.goal);
        follower.reset(std::move(route));
        result.planned_path = follower.path();
        have_path = true;
    } else if (cfg.kind == ScenarioKind::ObstacleCourse) {
        PlannedPath route;
        route.waypoints = {cfg.goal};
        follower.reset(std::move(route));
        have_path = true;
    }
    double last_plan_t = -1e18;

    Trace& trace = result.trace;
    trace.meta.kind = cfg.kind;
    trace.meta.controller = cfg.controller;
    trace.meta.seed = cfg.seed;
    trace.meta.dt = dt;
    trace.meta.duration_cap = cfg.duration_cap;
    trace.meta.lead_in = cfg.lead_in;
    trace.meta.start_x = cfg.start_pos.x();
    trace.meta.start_y = cfg.start_pos.y();
    trace.meta.start_heading = cfg.start_heading;
    trace.meta.target_heading = target_heading;
    trace.meta.has_goal = cfg.has_goal;
    trace.meta.goal_x = cfg.goal.x();
    trace.meta.goal_y = cfg.goal.y();
    trace.meta.capture_radius = cfg.capture_radius;
    trace.rows.reserve(static_cast<std::size_t>(n_ticks));

    ScanFrame scan;
    bool have_scan = false;
    int blocked_streak = 0;
    long blocked_ticks = 0;
    HeadingHistory heading_history;
    std::size_t steps_consumed = 0;
    double audio_target = std::numeric_limits<double>::quiet_NaN();
    double next_audio_t = 0.0;

    for (int k = 0; k < n_ticks; ++k) {
        const double t = k * dt;
        // Stand still while the recognizer builds its baseline so that the
        // pedometer never misses the opening steps.
        const bool standing = t < cfg.sensor_warmup;
        if (!standing && !walking) {
            walker = make_walker(walker.position, walker.heading, cfg.base_stride, cfg.cadence,
                                 cfg.hip_width);
            walking = true;
        }

        // --- sense ---
        const RopeSample rope = emit_rope_samples(walker, geom, t, cfg.noise.rope_sigma,
                                                  mix_seed(cfg.seed, kRopeStream));
        GaitEstimate est = recognizer.ingest(rope);
        if (!calibrated && est.step_count() >= 4) {
            recognizer.calibrate(cfg.base_stride, geom);
            calibrated = true;
            est = recognizer.estimate();
        }
        const double imu_heading = imu.read(walker.heading, dt);

        const bool scan_tick = has_geometry && (k % cfg.lidar_period_ticks == 0);
        if (scan_tick) {
            scan = simulate_lidar({walker.position, walker.heading}, world, cfg.n_beams,
                                  mix_seed(mix_seed(cfg.seed, kLidarStream),
                                           static_cast<std::uint64_t>(k)),
                                  cfg.noise.lidar_sigma, t);
            have_scan = true;
        }

        if (k % cfg.gps_period_ticks == 0) {
            const auto fix = simulate_gps(walker.position, world,
                                          mix_seed(mix_seed(cfg.seed, kGpsStream),
                                                   static_cast<std::uint64_t>(k)),
                                          cfg.noise.gps_sigma);
            nav = mode_switch(nav, fix.has_value());
            if (fix && nav.mode == NavMode::OutdoorGps) {
                nav = blend_gps(nav, *fix);
            }
        }
        heading_history.push(t, imu_heading);
        // Integrate each detected step along the heading that was current at
        // its (backdated) event time; stale headings otherwise smear the
        // reckoning during maneuvers.
        while (steps_consumed < recognizer.step_log().size()) {
            const StepDetection& detection = recognizer.step_log()[steps_consumed++];
            GaitEstimate one_step;
            one_step.stride_hat = est.stride_hat;
            one_step.left.step_count = nav.step_count_used + 1;
            nav = dead_reckon(nav, one_step, heading_history.at(detection.t));
        }
        nav.pose_hat.heading = imu_heading;

        if (slam && nav.mode == NavMode::IndoorSlam && scan_tick) {
            if (map_primed) {
                try {
                    const LocalizeResult loc =
                        localize(*result.grid, nav.pose_hat, scan, cfg.localize_beam_step);
                    if (loc.confidence > kLocalizeConfidenceGate) {
                        nav.pose_hat.position = loc.pose.position;
                        nav.confidence = loc.confidence;
                    }
                } catch (const DegenerateScan&) {
                }
            }
            update_occupancy(*result.grid, {nav.pose_hat.position, imu_heading}, scan);
            map_primed = true;
        }

        // --- decide ---
        double desired;
        bool arrived_now = false;
        if (goal_kind) {
            if (cfg.kind == ScenarioKind::Hallway && slam && map_primed &&
                t - last_plan_t >= cfg.replan_interval) {
                const bool need =
                    !have_path || path_blocked(*result.grid, follower.path(), 0, 0.35);
                if (need) {
                    const PlanResult plan =
                        plan_path(*result.grid, nav.pose_hat.position, cfg.goal, 0.35);
                    if (plan.ok()) {
                        follower.reset(plan.path);
                        result.planned_path = follower.path();
                        have_path = true;
                    }
                    last_plan_t = t;
                }
            }
            desired = have_path
                          ? follower.update(nav.pose_hat.position, cfg.capture_radius).heading
                          : bearing_to(nav.pose_hat.position, cfg.goal);
            arrived_now = (nav.pose_hat.position - cfg.goal).norm() <= cfg.capture_radius;
        } else {
            desired = t < cfg.lead_in ? cfg.start_heading : target_heading;
        }

        bool halt = false;
        AudioCue obstacle_audio = AudioCue::None;
        double cadence_target = cfg.cadence;
        double escape_heading = walker.heading;

        if (goal_kind && have_scan && cfg.controller != ControllerKind::AudioOnly) {
            const bool cane = cfg.controller == ControllerKind::CaneContact;
            const ScanFrame view = cane ? clamp_scan_range(scan, kCaneReach) : scan;
            const double standoff =
                cane ? kCaneStandoff
                     : std::max(0.45, cfg.d_safe - 0.15 * blocked_streak);
            const double rel_desired = wrap_angle(desired - imu_heading);
            const auto steer = avoid_obstacles(view, rel_desired, standoff, cfg.corridor);
            // The heading only changes at step events, so the body keeps
            // moving along its current bearing for up to a stride; the
            // differential-stride turning radius (~stride/max heading step)
            // also exceeds the near field. When the current bearing stops
            // being safe at close range, do what a walker does: stop, turn
            // on the spot toward a clear direction, then continue.
            const double current_rel = wrap_angle(walker.heading - imu_heading);
            const double near_standoff = std::min(kEmergencyStandoff, 0.9 * standoff);
            const auto near_ok = avoid_obstacles(view, current_rel, near_standoff, cfg.corridor);
            const bool bearing_safe = near_ok && std::abs(*near_ok - current_rel) < 1e-9;

            if (steer && bearing_safe) {
                desired = wrap_angle(imu_heading + *steer);
                blocked_ticks = 0;
                if (scan_tick) blocked_streak = 0;
                const auto far_ok = avoid_obstacles(view, current_rel, standoff, cfg.corridor);
                if (!far_ok || std::abs(*far_ok - current_rel) > 1e-9) {
                    // Obstacle between the near and full standoff: slow down.
                    cadence_target = kCaneSlowSpeed / cfg.base_stride;
                }
            } else if (steer) {
                halt = true;
                obstacle_audio = AudioCue::Obstacle;
                escape_heading = wrap_angle(imu_heading + *steer);
            } else {
                // Fully blocked: stop and turn on the spot toward the most
                // open direction; if that alone does not clear the view,
                // creep out slowly along it.
                ++blocked_ticks;
                obstacle_audio = AudioCue::Obstacle;
                if (scan_tick) ++blocked_streak;
                double best_range = -1.0;
                double best_angle = rel_desired;
                for (int b = 0; b < view.n_beams; ++b) {
                    const double r =
                        std::isfinite(view.ranges[b]) ? view.ranges[b] : kLidarMaxRange;
                    const bool closer_to_goal =
                        std::abs(wrap_angle(view.beam_angle(b) - rel_desired)) <
                        std::abs(wrap_angle(best_angle - rel_desired));
                    if (r > best_range || (r == best_range && closer_to_goal)) {
                        best_range = r;
                        best_angle = view.beam_angle(b);
                    }
                }
                escape_heading = wrap_angle(imu_heading + best_angle);
                if (blocked_ticks * dt <= 1.0) {
                    halt = true;
                } else {
                    desired = escape_heading;
                    cadence_target = kCaneSlowSpeed / cfg.base_stride;
                }
            }
            if (cane && view.min_range() < kCaneReach) {
                cadence_target = kCaneSlowSpeed / cfg.base_stride;
            }
        }

        GuidanceCommand cmd;
        StrideIntent intent;
        if (standing) {
            TraceRow row;
            row.t = t;
            row.true_x = walker.position.x();
            row.true_y = walker.position.y();
            row.true_heading = walker.heading;
            row.est_x = nav.pose_hat.position.x();
            row.est_y = nav.pose_hat.position.y();
            row.est_heading = imu_heading;
            row.mode = nav.mode;
            row.L_left = rope.left_len;
            row.L_right = rope.right_len;
            row.phase_left = walker.left.phase;
            row.phase_right = walker.right.phase;
            row.min_scan_range = std::min(min_clearance(world, walker.position), kClearanceCap);
            row.step_count = est.step_count();
            trace.rows.push_back(row);
            continue;
        }
        switch (cfg.controller) {
            case ControllerKind::Guided: {
                const double err = wrap_angle(desired - imu_heading);
                cmd = steering_update(cfg.control, err, est);
                intent = stride_intent(cfg.control, err);
                break;
            }
            case ControllerKind::AudioOnly: {
                if (t >= next_audio_t) {
                    audio_target =
                        wrap_angle(desired + deg2rad(kAudioExecSigmaDeg) * audio_rng.gaussian());
                    next_audio_t = t + kAudioEventPeriod;
                }
                if (std::isfinite(audio_target)) {
                    intent = stride_intent(cfg.control, wrap_angle(audio_target - imu_heading));
                }
                break;
            }
            case ControllerKind::CaneContact: {
                intent = stride_intent(cfg.control, wrap_angle(desired - imu_heading));
                break;
            }
        }
        if (obstacle_audio == AudioCue::Obstacle) cmd.audio = AudioCue::Obstacle;

        // --- record ---
        TraceRow row;
        row.t = t;
        row.true_x = walker.position.x();
        row.true_y = walker.position.y();
        row.true_heading = walker.heading;
        row.est_x = nav.pose_hat.position.x();
        row.est_y = nav.pose_hat.position.y();
        row.est_heading = imu_heading;
        row.mode = nav.mode;
        row.L_left = rope.left_len;
        row.L_right = rope.right_len;
        row.phase_left = walker.left.phase;
        row.phase_right = walker.right.phase;
        row.tension_left = cmd.left_tension;
        row.tension_right = cmd.right_tension;
        row.mod_left = cmd.left_mod;
        row.mod_right = cmd.right_mod;
        row.audio = cmd.audio;
        row.min_scan_range = std::min(min_clearance(world, walker.position), kClearanceCap);
        row.step_count = est.step_count();
        trace.rows.push_back(row);

        if (arrived_now) break;

        // --- act ---
        walker.cadence = cadence_target;
        if (!halt) {
            const Vec2 before = walker.position;
            walker = advance_gait(walker, dt, intent.left, intent.right, cfg.control.mod_max)
                         .state;
            walker.position = clamp_motion(world, before, walker.position);
        } else {
            // Rotate in place toward the escape direction (capped turn rate).
            const double turn = wrap_angle(escape_heading - walker.heading);
            const double step = std::clamp(turn, -kHaltTurnRate * dt, kHaltTurnRate * dt);
            walker.heading = wrap_angle(walker.heading + step);
        }
    }

    result.metrics = metrics_from_trace(trace);
    return result;
}

BatchReport run_batch(const ScenarioConfig& cfg, std::uint64_t seed_first,
                      std::uint64_t seed_last, int jobs) {
    if (seed_last < seed_first) throw ScenarioInvalid("batch: empty seed range");
    const std::size_t n = static_cast<std::size_t>(seed_last - seed_first + 1);
    BatchReport report;
    report.kind = cfg.kind;
    report.controller = cfg.controller;
    report.rows.resize(n);

    if (jobs <= 0) {
        jobs = static_cast<int>(std::min<unsigned>(std::thread::hardware_concurrency(), 8));
        if (jobs <= 0) jobs = 1;
    }

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            BatchRow& row = report.rows[i];
            row.seed = seed_first + i;
            ScenarioConfig run_cfg = cfg;
            run_cfg.seed = row.seed;
            try {
                row.metrics = run_scenario(run_cfg).metrics;
            } catch (const std::exception& e) {
                row.failed = true;
                row.error = e.what();
            }
        }
    };
    std::vector<std::thread> pool;
    for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
    worker();
    for (std::thread& th : pool) th.join();

    double sum_c = 0.0, sum_c2 = 0.0, sum_p = 0.0, sum_e2 = 0.0;
    std::size_t ok = 0, arrived = 0, clean = 0;
    for (const BatchRow& row : report.rows) {
        if (row.failed) continue;
        ++ok;
        sum_c += row.metrics.completion_time;
        sum_c2 += row.metrics.completion_time * row.metrics.completion_time;
        sum_p += row.metrics.path_length;
        sum_e2 += row.metrics.final_heading_error_deg * row.metrics.final_heading_error_deg;
        if (row.metrics.arrived) ++arrived;
        if (row.metrics.arrived && row.metrics.collision_count == 0) ++clean;
    }
    if (ok > 0) {
        const double nd = static_cast<double>(ok);
        report.mean_completion = sum_c / nd;
        report.stddev_completion =
            std::sqrt(std::max(0.0, sum_c2 / nd - report.mean_completion * report.mean_completion));
        report.mean_path_length = sum_p / nd;
        report.rmse_final_heading_deg = std::sqrt(sum_e2 / nd);
        report.arrived_fraction = static_cast<double>(arrived) / static_cast<double>(n);
        report.collision_free_fraction = static_cast<double>(clean) / static_cast<double>(n);
    }

    switch (cfg.kind) {
        case ScenarioKind::Turn90:
            report.pass = ok == n && arrived == n && report.mean_completion <= 2.5;
            break;
        case ScenarioKind::ObstacleCourse:
            report.pass = report.collision_free_fraction >= 0.95;
            break;
        case ScenarioKind::StraightWalk:
            report.pass = ok == n;
            break;
        default:
            report.pass = ok == n && arrived == n;
            break;
    }
    return report;
}

void write_batch_csv(const BatchReport& report, std::ostream& out) {
    out << "# gaitguide-batch v1\n";
    out << "# kind " << kind_token(report.kind) << "\n";
    out << "# controller " << controller_token(report.controller) << "\n";
    out << "seed,arrived,timed_out,failed,completion_time,path_length,lateral_rmse,"
           "final_heading_error_deg,collision_count,steps\n";
    out.precision(17);
    for (const BatchRow& row : report.rows) {
        out << row.seed << ',' << row.metrics.arrived << ',' << row.metrics.timed_out << ','
            << row.failed << ',' << row.metrics.completion_time << ','
            << row.metrics.path_length << ',' << row.metrics.lateral_rmse << ','
            << row.metrics.final_heading_error_deg << ',' << row.metrics.collision_count << ','
            << row.metrics.steps << '\n';
    }
    out << "# mean_completion " << report.mean_completion << "\n";
    out << "# stddev_completion " << report.stddev_completion << "\n";
    out << "# mean_path_length " << report.mean_path_length << "\n";
    out << "# rmse_final_heading_deg " << report.rmse_final_heading_deg << "\n";
    out << "# arrived_fraction " << report.arrived_fraction << "\n";
    out << "# collision_free_fraction " << report.collision_free_fraction << "\n";
    out << "# pass " << (report.pass ? 1 : 0) << "\n";
}

void print_batch_summary(const BatchReport& report, std::ostream& out) {
    out << "batch " << kind_token(report.kind) << " / " << controller_token(report.controller)
        << ": " << report.rows.size() << " runs\n";
    out.precision(4);
    out << "  arrived " << 100.0 * report.arrived_fraction << "%, collision-free "
        << 100.0 * report.collision_free_fraction << "%\n";
    out << "  completion " << report.mean_completion << " s +- " << report.stddev_completion
        << " s,  path " << report.mean_path_length << " m\n";
    out << "  final-heading RMSE " << report.rmse_final_heading_deg << " deg\n";
    out << "  rule: " << (report.pass ? "PASS" : "FAIL") << "\n";
}

}  // namespace gaitguide
