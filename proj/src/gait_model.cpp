#include "gaitguide/gait_model.hpp"

#include <algorithm>
#include <cstring>

namespace gaitguide {

GaitPhase phase_at(double f) {
    // Boundaries partition [0,1); each value belongs to the interval it opens.
    for (int i = 7; i >= 1; --i) {
        if (f >= kPhaseBoundaries[static_cast<std::size_t>(i)]) {
            return static_cast<GaitPhase>(i);
        }
    }
    return GaitPhase::InitialContact;
}

const char* phase_token(GaitPhase p) {
    static constexpr const char* tokens[] = {"ic", "lr", "mst", "tst",
                                             "psw", "isw", "msw", "tsw"};
    return tokens[static_cast<int>(p)];
}

GaitProfile GaitProfile::standard() {
    // Flexed at initial contact, peak extension at the stance/pre-swing
    // boundary, peak flexion in mid swing. Equal first/last values keep the
    // profile periodic.
    return GaitProfile{{{0.00, +0.35}, {0.50, -0.17}, {0.75, +0.44}, {1.00, +0.35}}};
}

double thigh_angle_profile(double f, const GaitProfile& profile) {
    const auto& k = profile.knots;
    // Clamp-wrap into [0,1).
    f -= std::floor(f);
    std::size_t i = 1;
    while (i + 1 < k.size() && f >= k[i].fraction) ++i;
    const double f0 = k[i - 1].fraction, f1 = k[i].fraction;
    const double v0 = k[i - 1].angle, v1 = k[i].angle;
    const double t = (f - f0) / (f1 - f0);
    const double s = 0.5 * (1.0 - std::cos(kPi * t));
    return v0 + (v1 - v0) * s;
}

PedestrianState make_walker(const Vec2& position, double heading, double base_stride,
                            double cadence, double hip_width, double left_phase) {
    PedestrianState s;
    s.position = position;
    s.heading = wrap_angle(heading);
    s.cadence = cadence;
    s.base_stride = base_stride;
    s.hip_width = hip_width;
    s.left.phase_fraction = left_phase - std::floor(left_phase);
    s.right.phase_fraction = s.left.phase_fraction + 0.5;
    if (s.right.phase_fraction >= 1.0) s.right.phase_fraction -= 1.0;
    for (LegState* leg : {&s.left, &s.right}) {
        leg->thigh_angle = thigh_angle_profile(leg->phase_fraction);
        leg->stride_length = base_stride;
        leg->phase = phase_at(leg->phase_fraction);
    }
    return s;
}

PedestrianState make_standing(const Vec2& position, double heading, double base_stride,
                              double cadence, double hip_width) {
    PedestrianState s = make_walker(position, heading, base_stride, cadence, hip_width);
    s.left.thigh_angle = 0.0;
    s.right.thigh_angle = 0.0;
    return s;
}

namespace {

double step_heading_delta(const PedestrianState& s, double mod_left, double mod_right) {
    const double s_left = s.base_stride * (1.0 + mod_left);
    const double s_right = s.base_stride * (1.0 + mod_right);
    return (s_right - s_left) / s.hip_width;
}

/// Displacement rate: the in-flight step (the leg closer to its wrap) covers
/// its stride over one inter-step interval, i.e. speed = cadence * stride.
double forward_speed(const PedestrianState& s, double mod_left, double mod_right) {
    const double mod_inflight =
        s.left.phase_fraction >= s.right.phase_fraction ? mod_left : mod_right;
    return s.cadence * s.base_stride * (1.0 + mod_inflight);
}

}  // namespace

GaitAdvance advance_gait(const PedestrianState& state, double dt, double mod_left,
                         double mod_right, double mod_max, const GaitProfile& profile) {
    if (!(dt > 0.0)) {
        throw std::invalid_argument("advance_gait: dt must be positive");
    }
    if (std::abs(mod_left) > mod_max || std::abs(mod_right) > mod_max) {
        throw ModulationOutOfRange("advance_gait: |mod| exceeds mod_max");
    }

    GaitAdvance out;
    out.state = state;
    PedestrianState& s = out.state;

    const double rate = s.cadence / 2.0;  // cycles per second per leg
    double elapsed = 0.0;

    auto time_to_wrap = [&](const LegState& leg) {
        return (1.0 - leg.phase_fraction) / rate;
    };

    while (true) {
        const double tau_left = time_to_wrap(s.left);
        const double tau_right = time_to_wrap(s.right);
        const double tau = std::min(tau_left, tau_right);
        const double remaining = dt - elapsed;
        const double seg = std::min(tau, remaining);

        // March position and phases over this segment.
        const double v = forward_speed(s, mod_left, mod_right);
        s.position += seg * v * Vec2(std::cos(s.heading), std::sin(s.heading));
        s.left.phase_fraction += rate * seg;
        s.right.phase_fraction += rate * seg;
        elapsed += seg;

        if (tau > remaining) break;

        // Step event: wrap the leg that reached the end of its cycle.
        const bool left_steps = tau_left <= tau_right;
        LegState& stepping = left_steps ? s.left : s.right;
        const double mod = left_steps ? mod_left : mod_right;
        stepping.phase_fraction -= 1.0;
        stepping.stride_length = s.base_stride * (1.0 + mod);
        s.heading = wrap_angle(s.heading + step_heading_delta(s, mod_left, mod_right));
        out.events.push_back({left_steps ? Leg::Left : Leg::Right, elapsed,
                              stepping.stride_length});
    }

    for (LegState* leg : {&s.left, &s.right}) {
        // Guard against accumulated rounding pushing a fraction to 1.0 exactly.
        if (leg->phase_fraction >= 1.0) leg->phase_fraction -= 1.0;
        leg->phase = phase_at(leg->phase_fraction);
    }
    s.left.thigh_angle = thigh_angle_profile(s.left.phase_fraction, profile) * (1.0 + mod_left);
    s.right.thigh_angle = thigh_angle_profile(s.right.phase_fraction, profile) * (1.0 + mod_right);
    return out;
}

RopeSample emit_rope_samples(const PedestrianState& state, const RopeGeometry& geom,
                             double t, double noise_sigma, std::uint64_t rng_seed) {
    RopeSample sample;
    sample.t = t;
    sample.left_len = rope_length(state.left.thigh_angle, geom);
    sample.right_len = rope_length(state.right.thigh_angle, geom);
    if (noise_sigma > 0.0) {
        std::uint64_t t_bits;
        static_assert(sizeof(t_bits) == sizeof(t));
        std::memcpy(&t_bits, &t, sizeof(t_bits));
        Rng rng(mix_seed(rng_seed, t_bits));
        sample.left_len += noise_sigma * rng.gaussian();
        sample.right_len += noise_sigma * rng.gaussian();
    }
    return sample;
}

}  // namespace gaitguide
