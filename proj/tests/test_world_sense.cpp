#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <vector>

#include "gaitguide/mapping.hpp"
#include "gaitguide/nav.hpp"
#include "gaitguide/sensors.hpp"

using namespace gaitguide;

namespace {

/// 1 mm ray-marching range oracle: walk the ray and report the first point
/// that comes within half a step of any segment.
double march_range(const Vec2& origin, double angle, const WorldModel& world,
                   double max_range = kLidarMaxRange) {
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

WorldModel mirrored_x(const WorldModel& world) {
    WorldModel out = world;
    for (Segment& s : out.segments) {
        s.a.y() = -s.a.y();
        s.b.y() = -s.b.y();
    }
    out.fit_bounds();
    return out;
}

ScanFrame one_beam_scan(double range, double stamp = 0.0) {
    ScanFrame scan;
    scan.stamp = stamp;
    scan.angle_min = -0.1;
    scan.angle_max = 0.1;
    scan.n_beams = 1;
    scan.ranges = Eigen::ArrayXd::Constant(1, range);
    return scan;
}

}  // namespace

TEST_CASE("empty world returns no echoes") {
    WorldModel world;
    world.bounds.extend(Vec2(-10, -10));
    world.bounds.extend(Vec2(10, 10));
    const ScanFrame scan = simulate_lidar({Vec2(0, 0), 0.0}, world, 360, 1, 0.0);
    CHECK(scan.valid_count() == 0);
}

TEST_CASE("a wall five meters ahead echoes at five meters") {
    WorldModel world;
    world.add_segment(Vec2(5, -10), Vec2(5, 10));
    world.fit_bounds();
    world.bounds.extend(Vec2(-1, 0));
    const ScanFrame scan = simulate_lidar({Vec2(0, 0), 0.0}, world, 360, 1, 0.0);
    // Beams are half-bin offset; take the two closest to dead ahead.
    int best = 0;
    for (int i = 0; i < 360; ++i) {
        if (std::abs(scan.beam_angle(i)) < std::abs(scan.beam_angle(best))) best = i;
    }
    CHECK(scan.ranges[best] == doctest::Approx(5.0).epsilon(1e-4));
}

TEST_CASE("returns beyond the lidar range are dropped") {
    WorldModel world;
    world.add_segment(Vec2(40, -50), Vec2(40, 50));
    world.fit_bounds();
    world.bounds.extend(Vec2(-1, 0));
    const ScanFrame scan = simulate_lidar({Vec2(0, 0), 0.0}, world, 36, 1, 0.0);
    for (int i = 0; i < scan.n_beams; ++i) {
        CHECK((!std::isfinite(scan.ranges[i]) || scan.ranges[i] <= kLidarMaxRange));
    }
}

TEST_CASE("a pose outside the world bounds is rejected") {
    WorldModel world;
    world.add_box(Vec2(0, 0), Vec2(4, 4));
    world.fit_bounds();
    CHECK_THROWS_AS(
        (void)simulate_lidar({Vec2(100, 100), 0.0}, world, 36, 1, 0.0), PoseOutOfBounds);
}

TEST_CASE("raycasts agree with a 1 mm marching oracle") {
    Rng rng(2024);
    int checked = 0;
    while (checked < 1000) {
        WorldModel world;
        const int boxes = 1 + static_cast<int>(rng.next_u64() % 3);
        for (int b = 0; b < boxes; ++b) {
            const double x = rng.uniform(1.0, 4.0) * (rng.uniform() < 0.5 ? -1.0 : 1.0);
            const double y = rng.uniform(1.0, 4.0) * (rng.uniform() < 0.5 ? -1.0 : 1.0);
            const double w = rng.uniform(0.3, 1.2), h = rng.uniform(0.3, 1.2);
            world.add_box(Vec2(x, y), Vec2(x + w, y + h));
        }
        world.fit_bounds();
        world.bounds.extend(Vec2(-0.5, -0.5));
        world.bounds.extend(Vec2(0.5, 0.5));
        const double heading = rng.uniform(-kPi, kPi);
        const ScanFrame scan = simulate_lidar({Vec2(0, 0), heading}, world, 40, 7, 0.0);
        for (int i = 0; i < scan.n_beams && checked < 1000; i += 4, ++checked) {
            const double oracle = march_range(Vec2(0, 0), heading + scan.beam_angle(i), world, 8.0);
            if (std::isfinite(oracle) && std::isfinite(scan.ranges[i])) {
                CHECK(std::abs(scan.ranges[i] - oracle) <= 0.05);
            } else {
                // Both agree there is no echo within the oracle horizon.
                CHECK((!std::isfinite(oracle) ? (!std::isfinite(scan.ranges[i]) ||
                                                 scan.ranges[i] > 7.9)
                                              : std::isfinite(scan.ranges[i])));
            }
        }
    }
}

TEST_CASE("mirroring the world and pose mirrors the scan exactly") {
    WorldModel world;
    world.add_box(Vec2(2, 1), Vec2(4, 2));
    world.add_segment(Vec2(-3, -2), Vec2(-1, 4));
    world.fit_bounds();
    const WorldModel mirrored = mirrored_x(world);
    const Pose2 pose{Vec2(0.3, 0.7), 0.4};
    const Pose2 pose_m{Vec2(0.3, -0.7), -0.4};
    const ScanFrame a = simulate_lidar(pose, world, 180, 1, 0.0);
    const ScanFrame b = simulate_lidar(pose_m, mirrored, 180, 1, 0.0);
    for (int i = 0; i < 180; ++i) {
        const double lhs = a.ranges[i], rhs = b.ranges[179 - i];
        if (std::isfinite(lhs) || std::isfinite(rhs)) {
            CHECK(lhs == rhs);
        }
    }
}

TEST_CASE("gps fixes exist only inside coverage and calibrate to 2 m at 95%") {
    WorldModel world;
    world.gps_regions.push_back({Vec2(0, 0), Vec2(10, 0), Vec2(10, 10), Vec2(0, 10)});
    CHECK(!simulate_gps(Vec2(-1, 5), world, 1).has_value());
    const auto exact = simulate_gps(Vec2(5, 5), world, 1, 0.0);
    REQUIRE(exact.has_value());
    CHECK((*exact - Vec2(5, 5)).norm() == 0.0);

    int within = 0;
    const int n = 10000;
    for (int i = 0; i < n; ++i) {
        const auto fix = simulate_gps(Vec2(5, 5), world, 1000 + i);
        REQUIRE(fix.has_value());
        if ((*fix - Vec2(5, 5)).norm() <= 2.0) ++within;
    }
    CHECK(static_cast<double>(within) / n >= 0.95);
}

TEST_CASE("imu is exact without noise and ramps with bias drift") {
    ImuSim clean(1, 0.0, 0.0);
    for (int i = 0; i < 100; ++i) {
        CHECK(clean.read(0.3, 0.01) == doctest::Approx(0.3).epsilon(1e-12));
    }
    ImuSim drifting(1, 0.0, 0.1);
    double reading = 0.0;
    for (int i = 0; i < 1000; ++i) reading = drifting.read(0.0, 0.01);
    CHECK(rad2deg(reading) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("imu white noise variance matches its sigma within 10 percent") {
    ImuSim imu(99, 1.0, 0.0);
    double sum = 0.0, sum2 = 0.0;
    const int n = 10000;
    for (int i = 0; i < n; ++i) {
        const double e = rad2deg(imu.read(0.0, 0.01));
        sum += e;
        sum2 += e * e;
    }
    const double mean = sum / n;
    const double var = sum2 / n - mean * mean;
    CHECK(var == doctest::Approx(1.0).epsilon(0.10));
}

TEST_CASE("a single beam marks one hit cell and clears the cells it crossed") {
    OccupancyGrid grid;
    Eigen::AlignedBox2d bounds(Vec2(0, 0), Vec2(10, 1));
    grid = OccupancyGrid::for_bounds(bounds);
    update_occupancy(grid, {Vec2(0.55, 0.55), 0.0}, one_beam_scan(4.5));
    int hits = 0, cleared = 0;
    for (int ix = 0; ix < grid.nx(); ++ix) {
        for (int iy = 0; iy < grid.ny(); ++iy) {
            const float v = grid.log_odds(ix, iy);
            if (v > 0.0f) {
                ++hits;
                CHECK(v == doctest::Approx(0.85));
                CHECK(ix == grid.cell_of(Vec2(5.05, 0.55)).x());
            } else if (v < 0.0f) {
                ++cleared;
                CHECK(v == doctest::Approx(-0.4));
            }
        }
    }
    CHECK(hits == 1);
    CHECK(cleared == 45);
}

TEST_CASE("repeated identical scans saturate at the clamp") {
    OccupancyGrid grid = OccupancyGrid::for_bounds(Eigen::AlignedBox2d(Vec2(0, 0), Vec2(10, 1)));
    for (int i = 0; i < 20; ++i) {
        update_occupancy(grid, {Vec2(0.55, 0.55), 0.0}, one_beam_scan(4.5));
    }
    const Eigen::Vector2i hit = grid.cell_of(Vec2(5.05, 0.55));
    CHECK(grid.log_odds(hit.x(), hit.y()) == OccupancyGrid::kClamp);
    const Eigen::Vector2i mid = grid.cell_of(Vec2(2.05, 0.55));
    CHECK(grid.log_odds(mid.x(), mid.y()) == -OccupancyGrid::kClamp);
}

TEST_CASE("non-overlapping beam updates commute") {
    const Eigen::AlignedBox2d bounds(Vec2(-6, -6), Vec2(6, 6));
    std::vector<ScanFrame> beams;
    for (int i = 0; i < 8; ++i) {
        ScanFrame s;
        s.angle_min = i * kPi / 4 - 0.01;
        s.angle_max = i * kPi / 4 + 0.01;
        s.n_beams = 1;
        s.ranges = Eigen::ArrayXd::Constant(1, 3.0 + 0.2 * i);
        beams.push_back(s);
    }
    OccupancyGrid forward = OccupancyGrid::for_bounds(bounds);
    for (const ScanFrame& s : beams) update_occupancy(forward, {Vec2(0, 0), 0.0}, s);
    OccupancyGrid reversed = OccupancyGrid::for_bounds(bounds);
    for (auto it = beams.rbegin(); it != beams.rend(); ++it) {
        update_occupancy(reversed, {Vec2(0, 0), 0.0}, *it);
    }
    CHECK((forward.log_odds == reversed.log_odds).all());
}

TEST_CASE("hallway traverse maps at least 90 percent of the wall cells") {
    WorldModel world;
    world.add_segment(Vec2(0, 0), Vec2(20, 0));
    world.add_segment(Vec2(20, 0), Vec2(20, 10));
    world.add_segment(Vec2(20, 10), Vec2(18, 10));
    world.add_segment(Vec2(18, 10), Vec2(18, 2));
    world.add_segment(Vec2(18, 2), Vec2(0, 2));
    world.add_segment(Vec2(0, 2), Vec2(0, 0));
    world.fit_bounds();

    OccupancyGrid grid = OccupancyGrid::for_bounds(world.bounds);
    std::vector<Pose2> poses;
    for (double x = 1.0; x <= 19.0; x += 0.5) poses.push_back({Vec2(x, 1.0), 0.0});
    for (double y = 1.5; y <= 9.0; y += 0.5) poses.push_back({Vec2(19.0, y), kPi / 2});
    std::uint64_t seed = 50;
    for (const Pose2& pose : poses) {
        update_occupancy(grid, pose, simulate_lidar(pose, world, 360, seed++, 0.0));
    }

    // Rasterize the true segments and measure coverage.
    int wall_cells = 0, mapped = 0;
    std::vector<char> seen(static_cast<std::size_t>(grid.nx()) * grid.ny(), 0);
    for (const Segment& s : world.segments) {
        const int n = static_cast<int>(s.length() / 0.01);
        for (int i = 0; i <= n; ++i) {
            const Vec2 p = s.a + (s.b - s.a) * (static_cast<double>(i) / n);
            const Eigen::Vector2i c = grid.cell_of(p);
            if (!grid.inside(c.x(), c.y())) continue;
            char& flag = seen[static_cast<std::size_t>(c.x()) * grid.ny() + c.y()];
            if (flag) continue;
            flag = 1;
            ++wall_cells;
            if (grid.log_odds(c.x(), c.y()) > 0.0f) ++mapped;
        }
    }
    CHECK(static_cast<double>(mapped) / wall_cells >= 0.9);
}

TEST_CASE("scan matching refines a perturbed prior and honors its window") {
    WorldModel world;
    world.add_box(Vec2(0, 0), Vec2(8, 4));
    world.fit_bounds();
    OccupancyGrid grid = OccupancyGrid::for_bounds(world.bounds);
    std::uint64_t seed = 7;
    for (double x = 1.0; x <= 7.0; x += 0.5) {
        const Pose2 pose{Vec2(x, 2.0), 0.0};
        update_occupancy(grid, pose, simulate_lidar(pose, world, 360, seed++, 0.0));
    }

    const Pose2 truth{Vec2(4.0, 2.0), 0.0};
    const ScanFrame scan = simulate_lidar(truth, world, 360, 99, 0.0);

    SUBCASE("an exact prior is returned unchanged") {
        const LocalizeResult res = localize(grid, truth, scan);
        CHECK(res.pose.position.x() == doctest::Approx(truth.position.x()));
        CHECK(res.pose.position.y() == doctest::Approx(truth.position.y()));
        CHECK(res.pose.heading == doctest::Approx(0.0));
        CHECK(res.confidence > 0.2);
    }

    SUBCASE("a 10 cm offset prior is pulled back to the truth") {
        const Pose2 prior{Vec2(4.10, 2.0), 0.0};
        const LocalizeResult res = localize(grid, prior, scan);
        CHECK((res.pose.position - truth.position).norm() <= 0.05);
    }

    SUBCASE("the correction never leaves the search window") {
        Rng rng(5);
        for (int i = 0; i < 20; ++i) {
            const Pose2 prior{Vec2(4.0 + rng.uniform(-0.3, 0.3), 2.0 + rng.uniform(-0.3, 0.3)),
                              rng.uniform(-0.2, 0.2)};
            const LocalizeResult res = localize(grid, prior, scan);
            CHECK(std::abs(res.pose.position.x() - prior.position.x()) <= 0.2 + 1e-12);
            CHECK(std::abs(res.pose.position.y() - prior.position.y()) <= 0.2 + 1e-12);
            CHECK(std::abs(wrap_angle(res.pose.heading - prior.heading)) <=
                  deg2rad(10.0) + 1e-12);
        }
    }

    SUBCASE("an unmapped grid gives zero confidence and keeps the prior") {
        OccupancyGrid empty = OccupancyGrid::for_bounds(world.bounds);
        const LocalizeResult res = localize(empty, truth, scan);
        CHECK(res.confidence == 0.0);
        CHECK(res.pose.position.x() == doctest::Approx(truth.position.x()));
        CHECK(res.pose.position.y() == doctest::Approx(truth.position.y()));
    }

    SUBCASE("scans with fewer than 10 valid beams are rejected") {
        ScanFrame degenerate = scan;
        degenerate.ranges.setConstant(ScanFrame::kNoReturn);
        CHECK_THROWS_AS((void)localize(grid, truth, degenerate), DegenerateScan);
    }
}

TEST_CASE("pgm export uses the free/occupied/unknown ternary") {
    OccupancyGrid grid = OccupancyGrid::for_bounds(Eigen::AlignedBox2d(Vec2(0, 0), Vec2(0.3, 0.1)));
    grid.log_odds(0, 0) = -2.0f;  // free
    grid.log_odds(1, 0) = 0.05f;  // unknown band
    grid.log_odds(2, 0) = 1.5f;   // occupied
    const std::string path = "world_sense_test_map.pgm";
    write_pgm(grid, path);
    std::ifstream f(path, std::ios::binary);
    REQUIRE(f.good());
    std::string magic, w, h, maxval;
    f >> magic >> w >> h >> maxval;
    CHECK(magic == "P5");
    CHECK(w == "3");
    CHECK(h == "1");
    f.get();  // single whitespace after the header
    CHECK(f.get() == 255);
    CHECK(f.get() == 128);
    CHECK(f.get() == 0);
    std::remove(path.c_str());
    std::remove((path + ".meta").c_str());
}

TEST_CASE("dead reckoning advances per counted step") {
    GaitEstimate gait;
    gait.stride_hat = 0.45;
    NavEstimate nav;
    nav.pose_hat = {Vec2(0, 0), 0.0};

    SUBCASE("no new steps leaves the pose unchanged") {
        gait.left.step_count = 0;
        gait.right.step_count = 0;
        const NavEstimate out = dead_reckon(nav, gait, 0.0);
        CHECK(out.pose_hat.position.x() == 0.0);
        CHECK(out.pose_hat.position.y() == 0.0);
    }

    SUBCASE("ten steps at heading zero advance 4.5 m in x") {
        gait.left.step_count = 5;
        gait.right.step_count = 5;
        const NavEstimate out = dead_reckon(nav, gait, 0.0);
        CHECK(out.pose_hat.position.x() == doctest::Approx(4.5).epsilon(1e-12));
        CHECK(out.pose_hat.position.y() == doctest::Approx(0.0).epsilon(1e-12));
    }

    SUBCASE("a square walk closes the loop") {
        NavEstimate walk;
        walk.pose_hat = {Vec2(0, 0), 0.0};
        std::uint64_t count = 0;
        for (int side = 0; side < 4; ++side) {
            const double heading = side * kPi / 2.0;
            for (int s = 0; s < 10; ++s) {
                GaitEstimate g;
                g.stride_hat = 0.45;
                g.left.step_count = ++count;
                walk = dead_reckon(walk, g, heading);
            }
        }
        CHECK(walk.pose_hat.position.norm() <= 1e-6);
    }
}

TEST_CASE("mode switching uses a five-tick hysteresis") {
    NavEstimate nav;
    CHECK(nav.mode == NavMode::IndoorSlam);

    SUBCASE("steady fixes switch after exactly five ticks") {
        for (int i = 0; i < 4; ++i) {
            nav = mode_switch(nav, true);
            CHECK(nav.mode == NavMode::IndoorSlam);
        }
        nav = mode_switch(nav, true);
        CHECK(nav.mode == NavMode::OutdoorGps);
    }

    SUBCASE("alternating availability never switches") {
        for (int i = 0; i < 50; ++i) {
            nav = mode_switch(nav, i % 2 == 0);
            CHECK(nav.mode == NavMode::IndoorSlam);
        }
    }

    SUBCASE("losing the fix switches back after five dry ticks") {
        for (int i = 0; i < 5; ++i) nav = mode_switch(nav, true);
        CHECK(nav.mode == NavMode::OutdoorGps);
        for (int i = 0; i < 4; ++i) {
            nav = mode_switch(nav, false);
            CHECK(nav.mode == NavMode::OutdoorGps);
        }
        nav = mode_switch(nav, false);
        CHECK(nav.mode == NavMode::IndoorSlam);
    }
}
