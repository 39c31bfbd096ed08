// Acceptance suite: end-to-end checks of the simulator against its target
// behaviors, one PASS/FAIL line per criterion. Returns the number of failed
// criteria.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <queue>
#include <sstream>
#include <string>
#include <vector>

#include "gaitguide/artifacts.hpp"
#include "gaitguide/simulate.hpp"
#include "synthetic_walk.hpp"

using namespace gaitguide;

namespace {

int g_failures = 0;

void report(const std::string& name, bool pass, const std::string& detail) {
    std::printf("%s  %-28s %s\n", pass ? "PASS" : "FAIL", name.c_str(), detail.c_str());
    if (!pass) ++g_failures;
}

std::string fmt(const char* f, ...) {
    va_list args;
    va_start(args, f);
    char buf[512];
    std::vsnprintf(buf, sizeof(buf), f, args);
    va_end(args);
    return buf;
}

double wall_seconds(const std::function<void()>& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    const auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double>(t1 - t0).count();
}

// --- criterion 1: turn timing ----------------------------------------------

void criterion_turn_timing() {
    ScenarioConfig cfg = default_scenario(ScenarioKind::Turn90);
    RunResult res;
    const double wall = wall_seconds([&] { res = run_scenario(cfg); });
    const bool pass = res.metrics.arrived && res.metrics.completion_time <= 2.5 &&
                      res.metrics.final_heading_error_deg <= 5.0 && wall < 1.0;
    report("1 turn-timing", pass,
           fmt("90deg in %.2f s (limit 2.5), final error %.2f deg, wall %.2f s",
               res.metrics.completion_time, res.metrics.final_heading_error_deg, wall));
}

// --- criterion 2: steering accuracy ----------------------------------------

double steer_rmse(ControllerKind controller) {
    double sum_sq = 0.0;
    int n = 0;
    for (double target : {-30.0, 30.0, -60.0, 60.0, -90.0, 90.0, -120.0, 120.0, 180.0}) {
        ScenarioConfig cfg = default_scenario(ScenarioKind::SteerToAngle);
        cfg.controller = controller;
        cfg.turn_deg = target;
        const BatchReport batch = run_batch(cfg, 1, 10);
        for (const BatchRow& row : batch.rows) {
            if (row.failed) return std::numeric_limits<double>::infinity();
            sum_sq += row.metrics.final_heading_error_deg * row.metrics.final_heading_error_deg;
            ++n;
        }
    }
    return std::sqrt(sum_sq / n);
}

void criterion_steering_accuracy() {
    const double guided = steer_rmse(ControllerKind::Guided);
    const double audio = steer_rmse(ControllerKind::AudioOnly);
    const bool pass = guided <= 2.5 && guided < audio;
    report("2 steering-accuracy", pass,
           fmt("guided RMSE %.3f deg (limit 2.5), audio-only baseline %.3f deg", guided, audio));
}

// --- criterion 3: obstacle avoidance ----------------------------------------

void criterion_obstacle_avoidance() {
    const ScenarioConfig cfg = default_scenario(ScenarioKind::ObstacleCourse);
    const BatchReport batch = run_batch(cfg, 1, 100);
    const bool pass = batch.collision_free_fraction >= 0.95;
    report("3 obstacle-avoidance", pass,
           fmt("%.0f%% of 100 seeds arrived contact-free (need 95%%)",
               100.0 * batch.collision_free_fraction));
}

// --- criterion 4: straight walking ------------------------------------------

void criterion_straight_walk() {
    ScenarioConfig clean = default_scenario(ScenarioKind::StraightWalk);
    clean.noise = NoiseParams{};
    clean.noise.gps_sigma = 0.0;
    const RunResult res = run_scenario(clean);
    const bool exact = res.metrics.lateral_rmse <= 1e-9;

    ScenarioConfig noisy = default_scenario(ScenarioKind::StraightWalk);
    noisy.noise.imu_sigma_deg = 1.0;
    int dominated = 0;
    double worst_margin = std::numeric_limits<double>::infinity();
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        ScenarioConfig g = noisy, a = noisy;
        g.seed = a.seed = seed;
        a.controller = ControllerKind::AudioOnly;
        const double lg = run_scenario(g).metrics.lateral_rmse;
        const double la = run_scenario(a).metrics.lateral_rmse;
        if (lg < la) ++dominated;
        worst_margin = std::min(worst_margin, la - lg);
    }
    const bool pass = exact && dominated == 20;
    report("4 straight-walk", pass,
           fmt("noise-free lateral %.2e m, guided beats audio on %d/20 seeds (worst margin "
               "%.3f m)",
               res.metrics.lateral_rmse, dominated, worst_margin));
}

// --- criterion 5: oracle equivalence ----------------------------------------

constexpr double kSqrt2 = 1.41421356237309504880;

double dijkstra_cost(const OccupancyGrid& grid, const Eigen::Vector2i& start,
                     const Eigen::Vector2i& goal) {
    const int nx = grid.nx(), ny = grid.ny();
    auto blocked = [&](int x, int y) { return grid.log_odds(x, y) > 0.0f; };
    struct Cost {
        int s = 0, d = 0;
        double value() const { return s + d * kSqrt2; }
    };
    std::vector<Cost> dist(static_cast<std::size_t>(nx) * ny);
    std::vector<char> done(dist.size(), 0), seen(dist.size(), 0);
    auto idx = [&](int x, int y) { return static_cast<std::size_t>(x) * ny + y; };
    using Item = std::pair<double, std::size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> open;
    dist[idx(start.x(), start.y())] = {};
    seen[idx(start.x(), start.y())] = 1;
    open.push({0.0, idx(start.x(), start.y())});
    static constexpr int kDx[8] = {1, -1, 0, 0, 1, 1, -1, -1};
    static constexpr int kDy[8] = {0, 0, 1, -1, 1, -1, 1, -1};
    while (!open.empty()) {
        const auto [d, i] = open.top();
        open.pop();
        if (done[i]) continue;
        done[i] = 1;
        const int cx = static_cast<int>(i) / ny, cy = static_cast<int>(i) % ny;
        for (int k = 0; k < 8; ++k) {
            const int x = cx + kDx[k], y = cy + kDy[k];
            if (x < 0 || y < 0 || x >= nx || y >= ny || blocked(x, y)) continue;
            const bool diag = k >= 4;
            if (diag && (blocked(cx, y) || blocked(x, cy))) continue;
            Cost cand = dist[i];
            (diag ? cand.d : cand.s) += 1;
            const std::size_t ni = idx(x, y);
            if (!seen[ni] || cand.value() < dist[ni].value()) {
                dist[ni] = cand;
                seen[ni] = 1;
                open.push({cand.value(), ni});
            }
        }
    }
    if (!done[idx(goal.x(), goal.y())]) return std::numeric_limits<double>::infinity();
    return dist[idx(goal.x(), goal.y())].value();
}

double march_range(const Vec2& origin, double angle, const WorldModel& world, double max_range) {
    const Vec2 dir(std::cos(angle), std::sin(angle));
    const double step = 0.001;
    for (double s = step; s <= max_range; s += step) {
        const Vec2 p = origin + s * dir;
        for (const Segment& seg : world.segments) {
            if (point_segment_distance(p, seg) <= 0.5 * step) return s;
        }
    }
    return ScanFrame::kNoReturn;
}

void criterion_oracles() {
    // A* versus Dijkstra on random grids.
    Rng rng(321);
    bool astar_ok = true;
    int solvable = 0;
    for (int trial = 0; trial < 50; ++trial) {
        OccupancyGrid grid =
            OccupancyGrid::for_bounds(Eigen::AlignedBox2d(Vec2(0, 0), Vec2(6.4, 6.4)));
        for (int ix = 0; ix < 64; ++ix) {
            for (int iy = 0; iy < 64; ++iy) {
                if (rng.uniform() < 0.30) grid.log_odds(ix, iy) = 2.0f;
            }
        }
        Eigen::Vector2i s, g;
        do {
            s = {static_cast<int>(rng.next_u64() % 64), static_cast<int>(rng.next_u64() % 64)};
        } while (grid.log_odds(s.x(), s.y()) > 0.0f);
        do {
            g = {static_cast<int>(rng.next_u64() % 64), static_cast<int>(rng.next_u64() % 64)};
        } while (grid.log_odds(g.x(), g.y()) > 0.0f);
        const double oracle = dijkstra_cost(grid, s, g);
        const PlanResult plan = plan_path(grid, grid.center_of(s.x(), s.y()),
                                          grid.center_of(g.x(), g.y()), 0.0);
        if (std::isinf(oracle)) {
            astar_ok = astar_ok && plan.status == PlanStatus::NoPath;
        } else {
            ++solvable;
            astar_ok = astar_ok && plan.ok() &&
                       plan.path.total_cost == oracle * grid.resolution;
        }
    }
    report("5a astar-dijkstra", astar_ok && solvable > 10,
           fmt("exact cost equality on %d solvable of 50 random grids", solvable));

    // LIDAR raycasts versus the 1 mm marching oracle.
    Rng lrng(777);
    int beams_checked = 0;
    double worst = 0.0;
    while (beams_checked < 1000) {
        WorldModel world;
        const int boxes = 1 + static_cast<int>(lrng.next_u64() % 3);
        for (int b = 0; b < boxes; ++b) {
            const double x = lrng.uniform(0.8, 4.0) * (lrng.uniform() < 0.5 ? -1.0 : 1.0);
            const double y = lrng.uniform(0.8, 4.0) * (lrng.uniform() < 0.5 ? -1.0 : 1.0);
            world.add_box(Vec2(x, y), Vec2(x + lrng.uniform(0.3, 1.2), y + lrng.uniform(0.3, 1.2)));
        }
        world.fit_bounds();
        world.bounds.extend(Vec2(-0.5, -0.5));
        world.bounds.extend(Vec2(0.5, 0.5));
        const double heading = lrng.uniform(-kPi, kPi);
        const ScanFrame scan = simulate_lidar({Vec2(0, 0), heading}, world, 40, 7, 0.0);
        for (int i = 0; i < scan.n_beams && beams_checked < 1000; i += 4, ++beams_checked) {
            const double oracle =
                march_range(Vec2(0, 0), heading + scan.beam_angle(i), world, 8.0);
            if (std::isfinite(oracle) && std::isfinite(scan.ranges[i])) {
                worst = std::max(worst, std::abs(scan.ranges[i] - oracle));
            }
        }
    }
    report("5b lidar-marching", worst <= 0.05,
           fmt("worst raycast deviation %.4f m over 1000 beams (limit half cell 0.05)", worst));

    // Rope length versus direct trigonometry.
    Rng rrng(12345);
    double worst_rope = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const double theta = rrng.uniform(-kPi, kPi);
        const double l1x = rrng.uniform(-0.3, 0.3), l1y = rrng.uniform(-0.3, -0.05);
        const double l2x = rrng.uniform(-0.3, 0.3), l2y = rrng.uniform(-0.3, -0.05);
        const double c = std::cos(theta), s = std::sin(theta);
        const double ex = c * l1x - s * l1y + l2x;
        const double ey = s * l1x + c * l1y + l2y;
        const double expect = std::sqrt(ex * ex + ey * ey);
        const double got = rope_length(theta, RopeGeometry{Vec2(l1x, l1y), Vec2(l2x, l2y)});
        worst_rope = std::max(worst_rope, std::abs(got - expect));
    }
    report("5c rope-trig", worst_rope <= 1e-9,
           fmt("worst rope-length deviation %.2e over 1000 draws (limit 1e-9)", worst_rope));

    // Phase recognition on a thousand-step noise-free walk.
    testing::WalkSpec spec;
    spec.walk_s = 563.0;
    const auto walk = testing::generate_walk(spec);
    GaitRecognizer rec;
    std::size_t agree = 0;
    for (std::size_t i = 0; i < walk.samples.size(); ++i) {
        const GaitEstimate est = rec.ingest(walk.samples[i]);
        agree += est.left.coarse == walk.left_truth[i];
        agree += est.right.coarse == walk.right_truth[i];
    }
    const double accuracy = static_cast<double>(agree) / (2.0 * walk.samples.size());
    const bool counts_exact =
        rec.estimate().left.step_count == walk.left_event_times.size() &&
        rec.estimate().right.step_count == walk.right_event_times.size();
    report("5d phase-recognition", accuracy >= 0.98 && counts_exact,
           fmt("%.2f%% sample accuracy, counts %llu/%llu vs %zu/%zu true", 100.0 * accuracy,
               static_cast<unsigned long long>(rec.estimate().left.step_count),
               static_cast<unsigned long long>(rec.estimate().right.step_count),
               walk.left_event_times.size(), walk.right_event_times.size()));

    // Square-walk dead reckoning closes the loop.
    NavEstimate nav;
    nav.pose_hat = {Vec2(0, 0), 0.0};
    std::uint64_t count = 0;
    for (int side = 0; side < 4; ++side) {
        for (int s = 0; s < 10; ++s) {
            GaitEstimate g;
            g.stride_hat = 0.45;
            g.left.step_count = ++count;
            nav = dead_reckon(nav, g, side * kPi / 2.0);
        }
    }
    report("5e square-loop", nav.pose_hat.position.norm() <= 1e-6,
           fmt("loop closure %.2e m (limit 1e-6)", nav.pose_hat.position.norm()));
}

// --- criterion 6: determinism -----------------------------------------------

void criterion_determinism() {
    ScenarioConfig cfg = default_scenario(ScenarioKind::SteerToAngle);
    cfg.seed = 11;
    std::ostringstream a, b;
    write_trace_csv(run_scenario(cfg).trace, a);
    write_trace_csv(run_scenario(cfg).trace, b);
    const bool traces_equal = a.str() == b.str();

    ScenarioConfig batch_cfg = default_scenario(ScenarioKind::SteerToAngle);
    const BatchReport serial = run_batch(batch_cfg, 1, 8, 1);
    const BatchReport parallel = run_batch(batch_cfg, 1, 8, 4);
    bool batch_equal = serial.rows.size() == parallel.rows.size();
    for (std::size_t i = 0; batch_equal && i < serial.rows.size(); ++i) {
        batch_equal = serial.rows[i].seed == parallel.rows[i].seed &&
                      serial.rows[i].metrics.completion_time ==
                          parallel.rows[i].metrics.completion_time &&
                      serial.rows[i].metrics.final_heading_error_deg ==
                          parallel.rows[i].metrics.final_heading_error_deg &&
                      serial.rows[i].metrics.path_length == parallel.rows[i].metrics.path_length;
    }
    report("6 determinism", traces_equal && batch_equal,
           fmt("repeat traces byte-identical: %s; batch independent of workers: %s",
               traces_equal ? "yes" : "no", batch_equal ? "yes" : "no"));
}

// --- criterion 7: baseline dominance ----------------------------------------

void criterion_dominance() {
    for (ScenarioKind kind : {ScenarioKind::Hallway, ScenarioKind::OutdoorRoute}) {
        int dominated = 0, n = 0;
        double sum_gap = 0.0;
        bool all_arrived = true;
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            ScenarioConfig g = default_scenario(kind), c = default_scenario(kind);
            g.seed = c.seed = seed;
            c.controller = ControllerKind::CaneContact;
            const RunMetrics mg = run_scenario(g).metrics;
            const RunMetrics mc = run_scenario(c).metrics;
            all_arrived = all_arrived && mg.arrived && mc.arrived;
            if (mg.arrived && mc.arrived && mg.completion_time < mc.completion_time) {
                ++dominated;
                sum_gap += 1.0 - mg.completion_time / mc.completion_time;
            }
            ++n;
        }
        const bool pass = all_arrived && dominated == n;
        report(fmt("7 dominance-%s", kind_token(kind)), pass,
               fmt("guided faster on %d/%d seeds, mean time reduction %.1f%% "
                   "(reference gaps: hallway ~23%%, outdoor ~32%%)",
                   dominated, n, dominated > 0 ? 100.0 * sum_gap / dominated : 0.0));
    }
}

}  // namespace

int main() {
    const double wall = wall_seconds([] {
        criterion_turn_timing();
        criterion_steering_accuracy();
        criterion_obstacle_avoidance();
        criterion_straight_walk();
        criterion_oracles();
        criterion_determinism();
        criterion_dominance();
    });
    std::printf("----\nacceptance suite: %s (%d criteria failed), %.1f s total\n",
                g_failures == 0 ? "ALL PASS" : "FAILURES", g_failures, wall);
    return g_failures;
}
