#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "gaitguide/gait_sense.hpp"
#include "synthetic_walk.hpp"

using namespace gaitguide;
using gaitguide::testing::WalkSpec;
using gaitguide::testing::generate_walk;

namespace {

GaitEstimate feed(GaitRecognizer& rec, const std::vector<RopeSample>& samples) {
    GaitEstimate est;
    for (const RopeSample& s : samples) est = rec.ingest(s);
    return est;
}

/// Match each detection to the nearest true event; returns the worst |dt|.
double worst_event_error(const std::vector<double>& detected, const std::vector<double>& truth) {
    double worst = 0.0;
    for (double t : detected) {
        double best = 1e18;
        for (double tt : truth) best = std::min(best, std::abs(t - tt));
        worst = std::max(worst, best);
    }
    return worst;
}

std::vector<double> events_of(const GaitRecognizer& rec, Leg leg) {
    std::vector<double> out;
    for (const StepDetection& d : rec.step_log()) {
        if (d.leg == leg) out.push_back(d.t);
    }
    return out;
}

}  // namespace

TEST_CASE("standing stream stays in stance with zero steps") {
    WalkSpec spec;
    spec.stand_before_s = 5.0;
    spec.walk_s = 0.0;
    const auto walk = generate_walk(spec);
    GaitRecognizer rec;
    const GaitEstimate est = feed(rec, walk.samples);
    CHECK(est.step_count() == 0);
    CHECK(est.left.coarse == CoarsePhase::Stance);
    CHECK(est.right.coarse == CoarsePhase::Stance);
    CHECK(est.cadence_hat == 0.0);
}

TEST_CASE("noise-free walk: exact counts and step events within 20 ms") {
    WalkSpec spec;
    spec.walk_s = 11.4;  // exactly 10 swing->stance wraps per leg
    const auto walk = generate_walk(spec);
    REQUIRE(walk.right_event_times.size() == 10);
    REQUIRE(walk.left_event_times.size() == 10);

    GaitRecognizer rec;
    const GaitEstimate est = feed(rec, walk.samples);
    CHECK(est.right.step_count == 10);
    CHECK(est.left.step_count == 10);
    CHECK(worst_event_error(events_of(rec, Leg::Right), walk.right_event_times) <= 0.020);
    CHECK(worst_event_error(events_of(rec, Leg::Left), walk.left_event_times) <= 0.020);
    CHECK(est.cadence_hat == doctest::Approx(spec.cadence).epsilon(0.05));
}

TEST_CASE("recognizer tolerates 50-200 Hz sampling") {
    for (double rate : {50.0, 200.0}) {
        CAPTURE(rate);
        WalkSpec spec;
        spec.rate_hz = rate;
        spec.walk_s = 11.4;
        const auto walk = generate_walk(spec);
        REQUIRE(walk.right_event_times.size() == 10);
        RecognizerConfig cfg;
        cfg.sample_rate_hz = rate;
        GaitRecognizer rec(cfg);
        const GaitEstimate est = feed(rec, walk.samples);
        CHECK(est.right.step_count == 10);
        CHECK(est.left.step_count == 10);
        CHECK(worst_event_error(events_of(rec, Leg::Right), walk.right_event_times) <= 0.04);
    }
}

TEST_CASE("noisy stream keeps step counts within one of truth") {
    // Continuous walking; counts are compared over a 50-step window that
    // starts after the recognizer's one-second baseline warm-up.
    const double window_start = 1.8;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        CAPTURE(seed);
        WalkSpec spec;
        spec.stand_before_s = 0.0;
        spec.noise_sigma = 0.002;
        spec.seed = seed;
        spec.walk_s = 30.2;
        const auto walk = generate_walk(spec);
        std::size_t truth = 0;
        for (double t : walk.left_event_times) truth += t >= window_start;
        for (double t : walk.right_event_times) truth += t >= window_start;
        REQUIRE(truth == 50);
        GaitRecognizer rec;
        feed(rec, walk.samples);
        std::size_t detected = 0;
        for (const StepDetection& d : rec.step_log()) detected += d.t >= window_start;
        CHECK(detected >= 49);
        CHECK(detected <= 51);
    }
}

TEST_CASE("noise-free coarse phase accuracy over 1000 steps") {
    WalkSpec spec;
    spec.walk_s = 563.0;  // >= 1000 steps at the default cadence
    const auto walk = generate_walk(spec);
    const std::size_t true_steps =
        walk.left_event_times.size() + walk.right_event_times.size();
    REQUIRE(true_steps >= 1000);

    GaitRecognizer rec;
    std::size_t agree_left = 0, agree_right = 0;
    for (std::size_t i = 0; i < walk.samples.size(); ++i) {
        const GaitEstimate est = rec.ingest(walk.samples[i]);
        if (est.left.coarse == walk.left_truth[i]) ++agree_left;
        if (est.right.coarse == walk.right_truth[i]) ++agree_right;
    }
    const double n = static_cast<double>(walk.samples.size());
    CHECK(agree_left / n >= 0.98);
    CHECK(agree_right / n >= 0.98);
    CHECK(rec.estimate().left.step_count == walk.left_event_times.size());
    CHECK(rec.estimate().right.step_count == walk.right_event_times.size());
}

TEST_CASE("stride estimate is self-consistent after calibration") {
    WalkSpec spec;
    spec.walk_s = 30.0;
    const auto walk = generate_walk(spec);
    const RopeGeometry geom = RopeGeometry::standard();
    GaitRecognizer rec;
    // Calibrate mid-stream on the known stride, then keep walking.
    std::size_t half = walk.samples.size() / 2;
    for (std::size_t i = 0; i < half; ++i) rec.ingest(walk.samples[i]);
    rec.calibrate(0.45, geom);
    for (std::size_t i = half; i < walk.samples.size(); ++i) rec.ingest(walk.samples[i]);
    const double estimate = rec.estimate_stride(geom);
    CHECK(std::abs(estimate - 0.45) <= 0.01);
}

TEST_CASE("stride estimate grows with stride modulation") {
    WalkSpec spec;
    spec.walk_s = 40.0;
    spec.mods = [](double t, double& ml, double& mr) {
        if (t > 21.5) ml = mr = 0.2;
    };
    const auto walk = generate_walk(spec);
    const RopeGeometry geom = RopeGeometry::standard();
    GaitRecognizer rec;
    std::size_t cut = 0;
    while (cut < walk.samples.size() && walk.samples[cut].t <= 21.5) ++cut;
    for (std::size_t i = 0; i < cut; ++i) rec.ingest(walk.samples[i]);
    rec.calibrate(0.45, geom);
    const double before = rec.estimate_stride(geom);
    for (std::size_t i = cut; i < walk.samples.size(); ++i) rec.ingest(walk.samples[i]);
    const double after = rec.estimate_stride(geom);
    CHECK(before == doctest::Approx(0.45).epsilon(1e-6));
    CHECK(after > before + 0.02);
}

TEST_CASE("estimate_stride falls back to the default when uncalibrated") {
    GaitRecognizer rec;
    CHECK(rec.estimate_stride(RopeGeometry::standard()) == doctest::Approx(0.45));

    RecognizerConfig strict;
    strict.strict_calibration = true;
    GaitRecognizer rec_strict(strict);
    CHECK_THROWS_AS((void)rec_strict.estimate_stride(RopeGeometry::standard()), NotCalibrated);
}

TEST_CASE("time must be strictly increasing") {
    GaitRecognizer rec;
    rec.ingest({0.0, 0.45, 0.45});
    rec.ingest({0.01, 0.45, 0.45});
    CHECK_THROWS_AS(rec.ingest({0.01, 0.45, 0.45}), NonMonotonicTime);
    CHECK_THROWS_AS(rec.ingest({0.005, 0.45, 0.45}), NonMonotonicTime);
}

TEST_CASE("recognizer output is replay-deterministic") {
    WalkSpec spec;
    spec.walk_s = 12.0;
    spec.noise_sigma = 0.002;
    const auto walk = generate_walk(spec);
    GaitRecognizer a, b;
    const GaitEstimate ea = feed(a, walk.samples);
    const GaitEstimate eb = feed(b, walk.samples);
    CHECK(ea.step_count() == eb.step_count());
    CHECK(ea.cadence_hat == eb.cadence_hat);
    REQUIRE(a.step_log().size() == b.step_log().size());
    for (std::size_t i = 0; i < a.step_log().size(); ++i) {
        CHECK(a.step_log()[i].t == b.step_log()[i].t);
        CHECK(a.step_log()[i].leg == b.step_log()[i].leg);
    }
}
