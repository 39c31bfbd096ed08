#include "gaitguide/guidance.hpp"

#include <cmath>

namespace gaitguide {

namespace {

bool swing_gate_open(const ControllerConfig& cfg, const LegEstimate& leg) {
    return leg.coarse == CoarsePhase::Swing && std::isfinite(leg.cycle_progress) &&
           leg.cycle_progress >= cfg.swing_gate_lo && leg.cycle_progress <= cfg.swing_gate_hi;
}

}  // namespace

StrideIntent stride_intent(const ControllerConfig& cfg, double heading_error) {
    StrideIntent intent;
    const double mag = std::abs(heading_error);
    if (mag <= cfg.deadband) return intent;
    const double mod = std::min(cfg.kp * (mag - cfg.deadband), cfg.mod_max);
    if (heading_error > 0.0) {
        intent.right = mod;  // left turn: lengthen the outer (right) stride
    } else {
        intent.left = mod;
    }
    return intent;
}

GuidanceCommand steering_update(const ControllerConfig& cfg, double heading_error,
                                const GaitEstimate& gait) {
    GuidanceCommand cmd;
    if (std::abs(heading_error) <= cfg.deadband) {
        return cmd;  // straight walking: both ropes relaxed
    }

    const StrideIntent intent = stride_intent(cfg, heading_error);
    const bool left_turn = heading_error > 0.0;
    const LegEstimate& outer = left_turn ? gait.right : gait.left;

    TensionMode& outer_tension = left_turn ? cmd.right_tension : cmd.left_tension;
    TensionMode& inner_tension = left_turn ? cmd.left_tension : cmd.right_tension;
    double& outer_mod = left_turn ? cmd.right_mod : cmd.left_mod;

    inner_tension = TensionMode::Damped;
    outer_tension = TensionMode::Assist;  // pending until the swing window opens
    if (swing_gate_open(cfg, outer)) {
        outer_mod = left_turn ? intent.right : intent.left;
    }

    if (std::abs(heading_error) > cfg.audio_threshold) {
        cmd.audio = left_turn ? AudioCue::TurnLeft : AudioCue::TurnRight;
    }
    return cmd;
}

GuidanceCommand straight_walk_regulator(const ControllerConfig& cfg, double imu_heading,
                                        double reference, const GaitEstimate& gait) {
    return steering_update(cfg, wrap_angle(reference - imu_heading), gait);
}

}  // namespace gaitguide
