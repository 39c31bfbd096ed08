#pragma once

#include <cstdint>
#include <deque>
#include <limits>
#include <stdexcept>
#include <vector>

#include "gaitguide/gait_model.hpp"

namespace gaitguide {

class NonMonotonicTime : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NotCalibrated : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct LegEstimate {
    CoarsePhase coarse = CoarsePhase::Stance;
    double last_step_time = std::numeric_limits<double>::quiet_NaN();
    /// Estimated fraction of the gait cycle since the last step event,
    /// NaN until the per-leg cycle clock has locked (two step events).
    double cycle_progress = std::numeric_limits<double>::quiet_NaN();
    std::uint64_t step_count = 0;
};

struct GaitEstimate {
    LegEstimate left;
    LegEstimate right;
    double cadence_hat = 0.0;  // steps/s, 0 until two step events have been seen
    double stride_hat = 0.0;   // meters (default until calibrated)
    std::uint64_t step_count() const { return left.step_count + right.step_count; }
};

struct RecognizerConfig {
    double sample_rate_hz = 100.0;  // tolerated range 50-200
    double h_hi = 0.30;             // arm threshold, fraction of rolling p2p
    double h_lo = 0.15;             // re-arm threshold, fraction of rolling p2p
    double p2p_window_s = 3.0;      // rolling excursion window
    double baseline_window_s = 1.0; // initial baseline = median over this window
    double baseline_tau_s = 10.0;   // stance-only baseline EMA time constant
    double min_excursion_m = 0.005; // below this p2p the stream is "standing"
    bool flexion_shortens = true;   // sign of the rope response to flexion
    double stance_fraction = 0.60;  // cycle fraction spent in stance
    double interval_ew_alpha = 0.25;
    double default_stride_m = 0.45;
    bool strict_calibration = false;
};

struct StepDetection {
    Leg leg;
    double t;  // estimated event time (backdated for filter delay)
};

/// Stream recognizer for the two rope-length channels. Classifies each leg
/// as stance/swing, emits one step event per swing->stance transition, and
/// tracks cadence and stride estimates; this is also the pedometer.
///
/// Detection works in two stages: a hysteresis threshold on the smoothed
/// deviation from the standing baseline arms a leg once its swing excursion
/// is underway, and the step event itself is placed at the stationary point
/// of the rope rate after peak flexion (the thigh pauses at foot strike, so
/// the rope rate dips to zero there regardless of the profile shape). Coarse
/// labels are kept aligned to the true cycle with a cadence clock anchored at
/// the detected events.
class GaitRecognizer {
public:
    explicit GaitRecognizer(const RecognizerConfig& cfg = RecognizerConfig(),
                            const RopeGeometry& geom = RopeGeometry::standard());

    GaitEstimate ingest(const RopeSample& sample);

    /// Stride estimate from the per-cycle rope excursion, see docs/gait-profile.md.
    double estimate_stride(const RopeGeometry& geom) const;

    /// Record the scale factor that maps the raw geometric stride to a known
    /// stride length, using the currently observed gait.
    void calibrate(double known_stride_m, const RopeGeometry& geom);

    const std::vector<StepDetection>& step_log() const { return step_log_; }
    const GaitEstimate& estimate() const { return estimate_; }
    bool calibrated() const { return calibration_scale_ > 0.0; }

private:
    struct LegTrack {
        // smoothing
        std::deque<double> raw_window;
        double smooth_sum = 0.0;
        // rolling min/max of the smoothed signal (monotonic wedges)
        std::deque<std::pair<std::int64_t, double>> min_wedge;
        std::deque<std::pair<std::int64_t, double>> max_wedge;
        // baseline
        std::vector<double> baseline_buf;
        double baseline = 0.0;
        bool baseline_ready = false;
        // deviation-rate history for the saddle detector
        double rate_prev2 = 0.0, rate_prev1 = 0.0, rate_curr = 0.0;
        int rate_count = 0;
        // detection state
        bool armed = false;
        bool watching = false;  // past peak flexion, hunting the rate saddle
        bool rearm_gate_open = true;
        double cycle_min = 0.0, cycle_max = 0.0;
        bool cycle_started = false;
        // clock
        double last_event_t = std::numeric_limits<double>::quiet_NaN();
        double cycle_period_hat = 0.0;
        std::uint64_t events = 0;
        double excursion_hat = 0.0;
        double prev_smooth = 0.0;
        bool have_prev_smooth = false;
    };

    void process_leg(Leg which, LegTrack& track, double t, double raw);
    void fire_event(Leg which, LegTrack& track, double t_event);
    double rolling_p2p(const LegTrack& track) const;

    RecognizerConfig cfg_;
    RopeGeometry geom_;
    int smooth_w_;
    std::int64_t p2p_window_n_;
    int baseline_n_;
    LegTrack left_;
    LegTrack right_;
    GaitEstimate estimate_;
    std::vector<StepDetection> step_log_;
    double last_t_ = -std::numeric_limits<double>::infinity();
    std::int64_t sample_index_ = -1;
    double last_any_event_t_ = std::numeric_limits<double>::quiet_NaN();
    double step_interval_hat_ = 0.0;
    double calibration_scale_ = 0.0;
};

}  // namespace gaitguide
