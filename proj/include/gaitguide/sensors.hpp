#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>

#include "gaitguide/world.hpp"

namespace gaitguide {

inline constexpr double kLidarMaxRange = 30.0;

class PoseOutOfBounds : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// One LIDAR revolution. Beam i points at angle_min + (i + 1/2) * span / n
/// relative to the scanner heading; the half-bin offset keeps the beam set
/// mirror-symmetric. Beams without a return within range carry kNoReturn.
struct ScanFrame {
    static constexpr double kNoReturn = std::numeric_limits<double>::infinity();

    double stamp = 0.0;
    double angle_min = -kPi;
    double angle_max = kPi;
    int n_beams = 360;
    Eigen::ArrayXd ranges;

    double beam_angle(int i) const {
        // Written so that beam i and beam n-1-i negate exactly in floating
        // point whenever the span is symmetric about zero.
        const double mid = 0.5 * (angle_min + angle_max);
        const double half_bin = (angle_max - angle_min) / (2.0 * n_beams);
        return mid + (2 * i + 1 - n_beams) * half_bin;
    }
    int valid_count() const {
        int n = 0;
        for (int i = 0; i < ranges.size(); ++i) {
            if (std::isfinite(ranges[i])) ++n;
        }
        return n;
    }
    double min_range() const {
        double best = kNoReturn;
        for (int i = 0; i < ranges.size(); ++i) best = std::min(best, ranges[i]);
        return best;
    }
};

/// Raycast LIDAR against the world segments with per-beam Gaussian range
/// noise. Deterministic for a given rng_seed.
ScanFrame simulate_lidar(const Pose2& true_pose, const WorldModel& world, int n_beams,
                         std::uint64_t rng_seed, double sigma, double stamp = 0.0);

/// GPS fix if the position lies in a coverage region; sigma is per axis and
/// its default puts ~95% of fixes within 2 m of truth.
std::optional<Vec2> simulate_gps(const Vec2& true_position, const WorldModel& world,
                                 std::uint64_t rng_seed, double sigma = 0.8);

/// Heading gyro with white noise and a slow bias ramp.
class ImuSim {
public:
    ImuSim(std::uint64_t seed, double sigma_deg = 1.0, double bias_drift_deg_per_s = 0.1)
        : rng_(seed), sigma_(deg2rad(sigma_deg)), drift_(deg2rad(bias_drift_deg_per_s)) {}

    double read(double true_heading, double dt) {
        bias_ += drift_ * dt;
        const double noise = sigma_ > 0.0 ? sigma_ * rng_.gaussian() : 0.0;
        return wrap_angle(true_heading + bias_ + noise);
    }

    double bias() const { return bias_; }

private:
    Rng rng_;
    double sigma_;
    double drift_;
    double bias_ = 0.0;
};

}  // namespace gaitguide
