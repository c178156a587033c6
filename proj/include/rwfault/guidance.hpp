#pragma once

#include "rwfault/types.hpp"

#include <vector>

namespace rwfault {

/// Circular two-body orbit used to define the nadir-pointing frame.
struct OrbitConfig {
    double radius = 6878.137e3;            ///< [m], 500 km altitude
    double mu = 3.986004418e14;            ///< [m^3/s^2]
    double raan = 0.0;                     ///< [rad]
    double inclination = 0.0;              ///< [rad]
    double arg_latitude_epoch = 0.0;       ///< argument of latitude at t = 0 [rad]

    double mean_motion() const;
};

enum class GuidanceMode { InertialHold, NadirPointing };

struct ScheduleEntry {
    double switch_time = 0.0; ///< [s]
    GuidanceMode mode = GuidanceMode::InertialHold;
};

using GuidanceSchedule = std::vector<ScheduleEntry>;

struct ReferenceSample {
    Mrp sigma_d;
    Vec3 omega_d = Vec3::Zero();     ///< desired-frame rate, desired-frame components
    Vec3 omega_d_dot = Vec3::Zero();
    double time = 0.0;
};

namespace guidance {

/// Inertial-to-orbital DCM. Rows: o1 = o2 x o3 (along-track), o2 = orbit
/// normal, o3 = zenith.
Mat3 orbital_frame(double t, const OrbitConfig& orbit);

/// Orbital frame rate relative to inertial, in orbital-frame components.
Vec3 orbital_rate(const OrbitConfig& orbit);

/// Inertial hold, then alternating nadir/inertial every 720 s, terminal nadir from 2000 s.
GuidanceSchedule alternating_schedule();

GuidanceMode mode_at(double t, const GuidanceSchedule& schedule);

ReferenceSample reference(double t, const GuidanceSchedule& schedule, const OrbitConfig& orbit);

} // namespace guidance
} // namespace rwfault
