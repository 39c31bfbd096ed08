#include "gaitguide/gait_sense.hpp"

#include <algorithm>
#include <cmath>

namespace gaitguide {

namespace {

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

/// Invert rope_length on its monotone operating branch via bisection.
double thigh_angle_from_length(double length, const RopeGeometry& geom) {
    double lo = -0.6, hi = 1.3;
    double f_lo = rope_length(lo, geom), f_hi = rope_length(hi, geom);
    const bool decreasing = f_lo > f_hi;
    if (!decreasing) {
        std::swap(lo, hi);
        std::swap(f_lo, f_hi);
    }
    // Now rope_length(lo) >= rope_length(hi); clamp outside the bracket.
    if (length >= f_lo) return lo;
    if (length <= f_hi) return hi;
    for (int i = 0; i < 60; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (rope_length(mid, geom) > length) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace

GaitRecognizer::GaitRecognizer(const RecognizerConfig& cfg, const RopeGeometry& geom)
    : cfg_(cfg), geom_(geom) {
    int w = static_cast<int>(std::lround(cfg_.sample_rate_hz * 0.05));
    if (w % 2 == 0) ++w;
    smooth_w_ = std::clamp(w, 3, 21);
    p2p_window_n_ = static_cast<std::int64_t>(std::lround(cfg_.p2p_window_s * cfg_.sample_rate_hz));
    baseline_n_ = std::max(2, static_cast<int>(std::lround(cfg_.baseline_window_s * cfg_.sample_rate_hz)));
    estimate_.stride_hat = cfg_.default_stride_m;
}

double GaitRecognizer::rolling_p2p(const LegTrack& track) const {
    if (track.max_wedge.empty() || track.min_wedge.empty()) return 0.0;
    return track.max_wedge.front().second - track.min_wedge.front().second;
}

GaitEstimate GaitRecognizer::ingest(const RopeSample& sample) {
    if (!(sample.t > last_t_)) {
        throw NonMonotonicTime("ingest: sample time must be strictly increasing");
    }
    last_t_ = sample.t;
    ++sample_index_;

    process_leg(Leg::Left, left_, sample.t, sample.left_len);
    process_leg(Leg::Right, right_, sample.t, sample.right_len);

    estimate_.cadence_hat = step_interval_hat_ > 0.0 ? 1.0 / step_interval_hat_ : 0.0;
    return estimate_;
}

void GaitRecognizer::process_leg(Leg which, LegTrack& track, double t, double raw) {
    const double dt = 1.0 / cfg_.sample_rate_hz;
    LegEstimate& est = which == Leg::Left ? estimate_.left : estimate_.right;

    // Moving-average smoothing.
    track.raw_window.push_back(raw);
    track.smooth_sum += raw;
    if (static_cast<int>(track.raw_window.size()) > smooth_w_) {
        track.smooth_sum -= track.raw_window.front();
        track.raw_window.pop_front();
    }
    const double smooth = track.smooth_sum / static_cast<double>(track.raw_window.size());

    // Rolling min/max wedges over the p2p window.
    while (!track.min_wedge.empty() && track.min_wedge.back().second >= smooth) {
        track.min_wedge.pop_back();
    }
    track.min_wedge.emplace_back(sample_index_, smooth);
    while (!track.max_wedge.empty() && track.max_wedge.back().second <= smooth) {
        track.max_wedge.pop_back();
    }
    track.max_wedge.emplace_back(sample_index_, smooth);
    const std::int64_t horizon = sample_index_ - p2p_window_n_;
    while (track.min_wedge.front().first <= horizon) track.min_wedge.pop_front();
    while (track.max_wedge.front().first <= horizon) track.max_wedge.pop_front();

    // Initial baseline: median over the first window.
    if (!track.baseline_ready) {
        track.baseline_buf.push_back(raw);
        if (static_cast<int>(track.baseline_buf.size()) >= baseline_n_) {
            track.baseline = median_of(track.baseline_buf);
            track.baseline_buf.clear();
            track.baseline_ready = true;
            track.cycle_min = track.cycle_max = smooth;
            track.cycle_started = true;
        }
        est.coarse = CoarsePhase::Stance;
        est.cycle_progress = std::numeric_limits<double>::quiet_NaN();
        track.prev_smooth = smooth;
        track.have_prev_smooth = true;
        return;
    }

    if (track.cycle_started) {
        track.cycle_min = std::min(track.cycle_min, smooth);
        track.cycle_max = std::max(track.cycle_max, smooth);
    }

    const double p2p = rolling_p2p(track);
    const double dev = cfg_.flexion_shortens ? track.baseline - smooth : smooth - track.baseline;
    const double dev_rate = track.have_prev_smooth
                                ? (cfg_.flexion_shortens ? (track.prev_smooth - smooth)
                                                         : (smooth - track.prev_smooth)) /
                                      dt
                                : 0.0;
    track.prev_smooth = smooth;
    track.have_prev_smooth = true;

    const bool moving = p2p > cfg_.min_excursion_m;

    if (moving) {
        if (!track.armed) {
            // Hysteresis: re-arming requires the deviation to have fallen
            // below the low threshold since the last event.
            if (dev < cfg_.h_lo * p2p) track.rearm_gate_open = true;
            if (track.rearm_gate_open && dev > cfg_.h_hi * p2p) {
                track.armed = true;
                track.watching = false;
                track.rearm_gate_open = false;
                track.rate_count = 0;
            }
        } else {
            if (!track.watching && dev_rate < 0.0) {
                // Past peak flexion; hunt for the foot-strike saddle.
                track.watching = true;
                track.rate_count = 0;
            }
            if (track.watching) {
                track.rate_prev2 = track.rate_prev1;
                track.rate_prev1 = track.rate_curr;
                track.rate_curr = dev_rate;
                ++track.rate_count;
                const double v_eps = 0.6 * p2p;  // m/s; scales with gait amplitude
                if (track.rate_count >= 3 && track.rate_prev1 >= track.rate_prev2 &&
                    track.rate_prev1 > track.rate_curr && std::abs(track.rate_prev1) < v_eps &&
                    track.rate_curr < 0.0) {
                    // Saddle confirmed one sample ago; compensate the filter delay.
                    const double group_delay = (0.5 * (smooth_w_ - 1) + 0.5) * dt;
                    fire_event(which, track, t - dt - group_delay);
                }
            }
            if (track.armed && dev < cfg_.h_lo * p2p) {
                if (track.watching && track.events >= 2) {
                    // Noise hid the saddle; the excursion itself still counts.
                    fire_event(which, track, t);
                    track.rearm_gate_open = true;
                } else {
                    // Give up silently rather than emit a poorly-timed event
                    // while the cycle clock is not locked yet.
                    track.armed = false;
                    track.watching = false;
                    track.rearm_gate_open = true;
                }
            }
        }
    } else {
        track.armed = false;
        track.watching = false;
    }

    // Baseline tracks slow drift, but only while the leg is grounded.
    const bool clock_ready = track.events >= 2 && track.cycle_period_hat > 0.0;
    double progress = std::numeric_limits<double>::quiet_NaN();
    CoarsePhase coarse = track.armed ? CoarsePhase::Swing : CoarsePhase::Stance;
    if (clock_ready && std::isfinite(track.last_event_t)) {
        progress = (t - track.last_event_t) / track.cycle_period_hat;
        coarse = (progress >= cfg_.stance_fraction && progress < 1.0) ? CoarsePhase::Swing
                                                                      : CoarsePhase::Stance;
    }
    if (coarse == CoarsePhase::Stance) {
        const double beta = dt / cfg_.baseline_tau_s;
        track.baseline += beta * (smooth - track.baseline);
    }

    est.coarse = coarse;
    est.cycle_progress = progress;
    est.step_count = track.events;
    est.last_step_time = track.last_event_t;
}

void GaitRecognizer::fire_event(Leg which, LegTrack& track, double t_event) {
    track.armed = false;
    track.watching = false;
    track.rearm_gate_open = false;

    if (std::isfinite(track.last_event_t)) {
        const double cycle = t_event - track.last_event_t;
        if (cycle > 0.0) {
            track.cycle_period_hat = track.cycle_period_hat > 0.0
                                         ? cfg_.interval_ew_alpha * cycle +
                                               (1.0 - cfg_.interval_ew_alpha) * track.cycle_period_hat
                                         : cycle;
        }
    }
    track.last_event_t = t_event;
    ++track.events;

    if (std::isfinite(last_any_event_t_)) {
        const double interval = t_event - last_any_event_t_;
        if (interval > 0.0) {
            step_interval_hat_ = step_interval_hat_ > 0.0
                                     ? cfg_.interval_ew_alpha * interval +
                                           (1.0 - cfg_.interval_ew_alpha) * step_interval_hat_
                                     : interval;
        }
    }
    last_any_event_t_ = t_event;

    if (track.cycle_started) {
        const double exc = track.cycle_max - track.cycle_min;
        if (exc > 0.0) {
            track.excursion_hat =
                track.excursion_hat > 0.0 ? 0.3 * exc + 0.7 * track.excursion_hat : exc;
        }
        track.cycle_min = track.cycle_max = track.prev_smooth;
    }

    step_log_.push_back({which, t_event});

    if (calibration_scale_ > 0.0) {
        estimate_.stride_hat = estimate_stride(geom_);
    }
}

double GaitRecognizer::estimate_stride(const RopeGeometry& geom) const {
    double exc_sum = 0.0;
    int exc_n = 0;
    double base_sum = 0.0;
    for (const LegTrack* track : {&left_, &right_}) {
        if (track->events >= 1 && track->excursion_hat > 0.0) {
            exc_sum += track->excursion_hat;
            base_sum += track->baseline;
            ++exc_n;
        }
    }
    if (exc_n == 0 || calibration_scale_ <= 0.0) {
        if (cfg_.strict_calibration) {
            throw NotCalibrated("estimate_stride: no calibration available");
        }
        return cfg_.default_stride_m;
    }
    const double excursion = exc_sum / exc_n;
    const double center = base_sum / exc_n;
    const double theta_hi = thigh_angle_from_length(
        cfg_.flexion_shortens ? center - 0.5 * excursion : center + 0.5 * excursion, geom);
    const double theta_lo = thigh_angle_from_length(
        cfg_.flexion_shortens ? center + 0.5 * excursion : center - 0.5 * excursion, geom);
    const double amplitude = std::abs(theta_hi - theta_lo);
    const double raw = 2.0 * geom.hip_to_thigh.norm() * std::sin(0.5 * amplitude);
    return calibration_scale_ * raw;
}

void GaitRecognizer::calibrate(double known_stride_m, const RopeGeometry& geom) {
    const double saved = calibration_scale_;
    calibration_scale_ = 1.0;
    double raw = 0.0;
    try {
        raw = estimate_stride(geom);
    } catch (...) {
        calibration_scale_ = saved;
        throw;
    }
    if (raw <= 0.0) {
        calibration_scale_ = saved;
        throw NotCalibrated("calibrate: no gait excursion observed yet");
    }
    calibration_scale_ = known_stride_m / raw;
    estimate_.stride_hat = known_stride_m;
}

}  // namespace gaitguide
