#pragma once

#include "gaitguide/gait_sense.hpp"

namespace gaitguide {

enum class TensionMode : int { Relaxed = 0, Damped = 1, Assist = 2 };
enum class AudioCue : int { None = 0, TurnLeft = 1, TurnRight = 2, Obstacle = 3 };

/// Actuator-side contract: per-leg rope tension mode, stride modulation and
/// audio cue for one control tick.
struct GuidanceCommand {
    TensionMode left_tension = TensionMode::Relaxed;
    TensionMode right_tension = TensionMode::Relaxed;
    double left_mod = 0.0;
    double right_mod = 0.0;
    AudioCue audio = AudioCue::None;
};

struct ControllerConfig {
    double kp = 0.8;                         // 1/radian
    double deadband = deg2rad(2.0);          // radians
    double audio_threshold = deg2rad(45.0);  // radians
    double mod_max = 0.3;
    // Assist is released only well inside the detected swing window so that
    // clock jitter never pushes a command into the stance phase.
    double swing_gate_lo = 0.62;
    double swing_gate_hi = 0.97;
};

/// Commanded stride asymmetry for a heading error: the outer leg of the turn
/// is lengthened by kp * (|error| - deadband), saturated at mod_max. This is
/// the turn intent that drives the walker dynamics; steering_update applies
/// the swing-phase windowing on top of it for the actuator command.
struct StrideIntent {
    double left = 0.0;
    double right = 0.0;
};

StrideIntent stride_intent(const ControllerConfig& cfg, double heading_error);

/// One tick of the closed-loop steering controller. heading_error must be
/// wrapped to (-pi, pi]; positive errors request a left turn, which assists
/// the right (outer) leg during its swing.
GuidanceCommand steering_update(const ControllerConfig& cfg, double heading_error,
                                const GaitEstimate& gait);

/// Named straight-walk mode: regulate the heading back to a fixed reference.
GuidanceCommand straight_walk_regulator(const ControllerConfig& cfg, double imu_heading,
                                        double reference, const GaitEstimate& gait);

}  // namespace gaitguide
