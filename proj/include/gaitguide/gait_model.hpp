#pragma once

#include <array>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "gaitguide/core.hpp"

namespace gaitguide {

// ---------------------------------------------------------------------------
// Gait cycle phases
// ---------------------------------------------------------------------------

enum class GaitPhase : int {
    InitialContact = 0,
    LoadingResponse,
    MidStance,
    TerminalStance,
    PreSwing,
    InitialSwing,
    MidSwing,
    TerminalSwing,
};

enum class CoarsePhase : int { Stance = 0, Swing = 1 };

/// Cycle-fraction boundaries of the eight phases. Phase i covers
/// [boundary[i], boundary[i+1]) and the eight intervals partition [0,1).
/// Standard clinical values; the fractions are configurable at the harness
/// level but everything in this library uses these defaults.
inline constexpr std::array<double, 9> kPhaseBoundaries = {
    0.0, 0.02, 0.10, 0.30, 0.50, 0.60, 0.73, 0.87, 1.0};

/// Fraction of the cycle spent in stance (swing starts here).
inline constexpr double kSwingStartFraction = 0.60;

GaitPhase phase_at(double phase_fraction);

inline CoarsePhase coarse_of(GaitPhase p) {
    return static_cast<int>(p) <= static_cast<int>(GaitPhase::PreSwing)
               ? CoarsePhase::Stance
               : CoarsePhase::Swing;
}

const char* phase_token(GaitPhase p);

// ---------------------------------------------------------------------------
// Thigh angle profile
// ---------------------------------------------------------------------------

/// Thigh flexion angle over one gait cycle, cosine-interpolated through
/// control points. Cosine segments have zero slope at every knot, so the
/// profile and its first difference are continuous across the 1 -> 0 wrap
/// whenever the first and last control values agree.
struct GaitProfile {
    struct Knot {
        double fraction;  // cycle fraction in [0, 1], strictly increasing
        double angle;     // radians, flexion positive
    };
    std::vector<Knot> knots;

    static GaitProfile standard();
};

/// Evaluate the profile at a cycle fraction in [0, 1).
double thigh_angle_profile(double phase_fraction, const GaitProfile& profile = GaitProfile::standard());

// ---------------------------------------------------------------------------
// Rope geometry
// ---------------------------------------------------------------------------

/// Sagittal-plane rope geometry for one leg. Frame: x forward, y up, origin
/// at the hip joint. The rope runs from the motor anchor to the thigh
/// attachment, so its vector is R(theta) * hip_to_thigh + anchor_to_hip.
struct RopeGeometry {
    Vec2 hip_to_thigh;   // hip joint -> thigh attachment, hip frame (l1)
    Vec2 anchor_to_hip;  // motor anchor -> hip joint, body frame (l2)

    bool valid() const {
        return hip_to_thigh.norm() > 0.0 && anchor_to_hip.norm() > 0.0;
    }

    static RopeGeometry standard() {
        // 20 cm down the thigh; anchor 10 cm forward of and 20 cm above the
        // hip. Flexion shortens the rope monotonically over the profile's
        // angle range.
        return RopeGeometry{Vec2(0.0, -0.20), Vec2(-0.10, -0.20)};
    }
};

/// Rope length for a thigh flexion angle: |R(theta) * l1 + l2|.
inline double rope_length(double theta, const RopeGeometry& geom) {
    return (Eigen::Rotation2Dd(theta) * geom.hip_to_thigh + geom.anchor_to_hip).norm();
}

// ---------------------------------------------------------------------------
// Walker state
// ---------------------------------------------------------------------------

enum class Leg : int { Left = 0, Right = 1 };

struct LegState {
    double phase_fraction = 0.0;  // [0, 1)
    double thigh_angle = 0.0;     // radians, flexion positive
    double stride_length = 0.0;   // meters, stride of the current/last step
    GaitPhase phase = GaitPhase::InitialContact;
};

struct PedestrianState {
    Vec2 position{0.0, 0.0};
    double heading = 0.0;  // radians, wrapped to (-pi, pi]
    LegState left;
    LegState right;
    double cadence = 1.7777777778;  // steps/s (two steps per gait cycle)
    double base_stride = 0.45;      // meters
    double hip_width = 0.30;        // meters, differential-stride track width
};

/// Walker mid-stride with legs in anti-phase (left at `phase`, right offset
/// by half a cycle) and thigh angles on the profile.
PedestrianState make_walker(const Vec2& position, double heading,
                            double base_stride = 0.45, double cadence = 1.7777777778,
                            double hip_width = 0.30, double left_phase = 0.0);

/// Walker standing still: legs vertical, phases frozen at anti-phase.
PedestrianState make_standing(const Vec2& position, double heading,
                              double base_stride = 0.45, double cadence = 1.7777777778,
                              double hip_width = 0.30);

// ---------------------------------------------------------------------------
// Advancing the gait
// ---------------------------------------------------------------------------

inline constexpr double kDefaultModMax = 0.3;

class ModulationOutOfRange : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct StepEvent {
    Leg leg;
    double t_offset;  // seconds into the tick at which the step fired
    double stride;    // meters
};

struct GaitAdvance {
    PedestrianState state;
    std::vector<StepEvent> events;
};

/// Advance the walker by dt. Each leg's phase fraction moves at cadence/2
/// cycles per second; a step event fires at every swing->stance wrap with
/// stride s = base_stride * (1 + mod). At each event the heading changes by
/// (s_right - s_left) / hip_width with both strides taken from the currently
/// commanded modulation, and the position integrates along the heading at the
/// in-flight step's displacement rate. Stride modulation also scales the
/// thigh swing amplitude, which is what makes the commanded asymmetry visible
/// in the rope-length channels.
GaitAdvance advance_gait(const PedestrianState& state, double dt,
                         double mod_left, double mod_right,
                         double mod_max = kDefaultModMax,
                         const GaitProfile& profile = GaitProfile::standard());

// ---------------------------------------------------------------------------
// Encoder observation
// ---------------------------------------------------------------------------

struct RopeSample {
    double t = 0.0;         // seconds
    double left_len = 0.0;  // meters
    double right_len = 0.0;
};

/// Rope lengths for the current pose of both thighs, plus optional Gaussian
/// encoder noise. Deterministic given (seed, t): the substream is derived
/// from the bit pattern of t, not from call order.
RopeSample emit_rope_samples(const PedestrianState& state, const RopeGeometry& geom,
                             double t, double noise_sigma, std::uint64_t rng_seed);

}  // namespace gaitguide
