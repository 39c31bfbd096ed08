#pragma once

#include <cstdint>

#include "gaitguide/gait_sense.hpp"
#include "gaitguide/world.hpp"

namespace gaitguide {

enum class NavMode : int { OutdoorGps = 0, IndoorSlam = 1 };

inline constexpr int kModeSwitchTicks = 5;
inline constexpr double kGpsBlendGain = 0.2;

/// Fused pose belief: pedometer dead reckoning, corrected by GPS outdoors
/// and scan matching indoors.
struct NavEstimate {
    NavMode mode = NavMode::IndoorSlam;
    Pose2 pose_hat;
    double confidence = 0.0;
    std::uint64_t step_count_used = 0;
    int gps_streak = 0;
    int no_gps_streak = 0;
};

/// Advance the pose by stride_hat along heading_hat for every step the
/// pedometer has counted since the last call.
NavEstimate dead_reckon(NavEstimate nav, const GaitEstimate& gait, double heading_hat);

/// Hysteresis mode switching: five consecutive fix ticks enter OutdoorGps,
/// five consecutive dry ticks enter IndoorSlam.
NavEstimate mode_switch(NavEstimate nav, bool gps_fix_present);

/// Fixed-gain complementary blend of a GPS fix into the dead-reckoned pose.
NavEstimate blend_gps(NavEstimate nav, const Vec2& fix, double gain = kGpsBlendGain);

}  // namespace gaitguide
