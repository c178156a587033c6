#include "rwfault/guidance.hpp"

#include "rwfault/attitude_math.hpp"

#include <cmath>

namespace rwfault {

double OrbitConfig::mean_motion() const
{
    return std::sqrt(mu / (radius * radius * radius));
}

namespace guidance {

Mat3 orbital_frame(double t, const OrbitConfig& orbit)
{
    const double u = orbit.arg_latitude_epoch + orbit.mean_motion() * t;
    const double cu = std::cos(u), su = std::sin(u);
    const double co = std::cos(orbit.raan), so = std::sin(orbit.raan);
    const double ci = std::cos(orbit.inclination), si = std::sin(orbit.inclination);

    const Vec3 zenith(cu * co - su * ci * so, cu * so + su * ci * co, su * si);
    const Vec3 normal(si * so, -si * co, ci);
    const Vec3 along = normal.cross(zenith);

    Mat3 c;
    c.row(0) = along.transpose();
    c.row(1) = normal.transpose();
    c.row(2) = zenith.transpose();
    return c;
}

Vec3 orbital_rate(const OrbitConfig& orbit)
{
    return Vec3(0.0, orbit.mean_motion(), 0.0);
}

GuidanceSchedule alternating_schedule()
{
    return {
        {0.0, GuidanceMode::InertialHold},
        {720.0, GuidanceMode::NadirPointing},
        {1440.0, GuidanceMode::InertialHold},
        {2000.0, GuidanceMode::NadirPointing},
    };
}

GuidanceMode mode_at(double t, const GuidanceSchedule& schedule)
{
    GuidanceMode mode = schedule.empty() ? GuidanceMode::InertialHold : schedule.front().mode;
    for (const auto& e : schedule) {
        if (e.switch_time <= t)
            mode = e.mode;
        else
            break;
    }
    return mode;
}

ReferenceSample reference(double t, const GuidanceSchedule& schedule, const OrbitConfig& orbit)
{
    ReferenceSample ref;
    ref.time = t;
    if (mode_at(t, schedule) == GuidanceMode::NadirPointing) {
        ref.sigma_d = attitude::dcm_to_mrp(orbital_frame(t, orbit));
        ref.omega_d = orbital_rate(orbit);
    }
    return ref;
}

} // namespace guidance
} // namespace rwfault
