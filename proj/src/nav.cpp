#include "gaitguide/nav.hpp"

#include <cmath>

namespace gaitguide {

NavEstimate dead_reckon(NavEstimate nav, const GaitEstimate& gait, double heading_hat) {
    const std::uint64_t total = gait.step_count();
    nav.pose_hat.heading = heading_hat;
    if (total <= nav.step_count_used) return nav;
    const double steps = static_cast<double>(total - nav.step_count_used);
    nav.pose_hat.position +=
        steps * gait.stride_hat * Vec2(std::cos(heading_hat), std::sin(heading_hat));
    nav.step_count_used = total;
    return nav;
}

NavEstimate mode_switch(NavEstimate nav, bool gps_fix_present) {
    if (gps_fix_present) {
        ++nav.gps_streak;
        nav.no_gps_streak = 0;
        if (nav.gps_streak >= kModeSwitchTicks) nav.mode = NavMode::OutdoorGps;
    } else {
        ++nav.no_gps_streak;
        nav.gps_streak = 0;
        if (nav.no_gps_streak >= kModeSwitchTicks) nav.mode = NavMode::IndoorSlam;
    }
    return nav;
}

NavEstimate blend_gps(NavEstimate nav, const Vec2& fix, double gain) {
    nav.pose_hat.position = gain * fix + (1.0 - gain) * nav.pose_hat.position;
    return nav;
}

}  // namespace gaitguide
