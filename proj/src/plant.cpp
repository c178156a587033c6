#include "rwfault/plant.hpp"

#include "rwfault/attitude_math.hpp"
#include "rwfault/error.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace rwfault::plant {

VecX saturate_torque(const VecX& u, const RwaConfig& cfg)
{
    return u.cwiseMax(-cfg.max_torque).cwiseMin(cfg.max_torque);
}

PlantDerivative eom(const PlantState& state, const VecX& u, const VecX& phi, const RwaConfig& cfg)
{
    if (!u.allFinite() || !state.omega.allFinite() || !state.sigma.vec().allFinite()
        || !state.wheel_speeds.allFinite()) {
        std::ostringstream msg;
        msg << "non-finite plant input at t=" << state.time << " s";
        throw DivergenceError(state.time, std::numeric_limits<double>::infinity(), msg.str());
    }

    const VecX u_sat = saturate_torque(u, cfg);
    const VecX u_eff = phi.cwiseProduct(u_sat);
    const Vec3& w = state.omega;
    const Vec3 h_total = cfg.j_body * w + cfg.j_rw * (cfg.g * state.wheel_speeds);

    PlantDerivative d;
    d.omega_dot = cfg.j_body.ldlt().solve(-w.cross(h_total) + cfg.g * u_eff);
    d.sigma_dot = attitude::mrp_kinematics(state.sigma, w);
    if (cfg.wheel_torque_model == WheelTorqueModel::Effective)
        d.wheel_accel = -u_eff / cfg.j_rw;
    else
        d.wheel_accel = -u_sat / cfg.j_rw;
    return d;
}

namespace {

PlantState advance(const PlantState& s, const PlantDerivative& d, double h)
{
    PlantState out;
    out.sigma = Mrp(s.sigma.vec() + h * d.sigma_dot);
    out.omega = s.omega + h * d.omega_dot;
    out.wheel_speeds = s.wheel_speeds + h * d.wheel_accel;
    out.time = s.time + h;
    return out;
}

} // namespace

PlantState step(const PlantState& state, const VecX& u, const VecX& phi, const RwaConfig& cfg, double dt)
{
    if (!(dt > 0.0))
        throw ValidationError("dt", "step size must be positive");

    const PlantDerivative k1 = eom(state, u, phi, cfg);
    const PlantDerivative k2 = eom(advance(state, k1, 0.5 * dt), u, phi, cfg);
    const PlantDerivative k3 = eom(advance(state, k2, 0.5 * dt), u, phi, cfg);
    const PlantDerivative k4 = eom(advance(state, k3, dt), u, phi, cfg);

    PlantState next;
    next.sigma = Mrp(state.sigma.vec()
                     + dt / 6.0 * (k1.sigma_dot + 2.0 * k2.sigma_dot + 2.0 * k3.sigma_dot + k4.sigma_dot));
    next.omega = state.omega
        + dt / 6.0 * (k1.omega_dot + 2.0 * k2.omega_dot + 2.0 * k3.omega_dot + k4.omega_dot);
    next.wheel_speeds = state.wheel_speeds
        + dt / 6.0 * (k1.wheel_accel + 2.0 * k2.wheel_accel + 2.0 * k3.wheel_accel + k4.wheel_accel);
    next.time = state.time + dt;

    if (!next.sigma.vec().allFinite() || !next.omega.allFinite() || !next.wheel_speeds.allFinite()) {
        const double norm = std::sqrt(next.sigma.squaredNorm() + next.omega.squaredNorm()
                                      + next.wheel_speeds.squaredNorm());
        std::ostringstream msg;
        msg << "plant state became non-finite at t=" << next.time << " s (state norm " << norm << ")";
        throw DivergenceError(next.time, norm, msg.str());
    }

    next.sigma = attitude::shadow_if_needed(next.sigma);
    next.wheel_speeds = next.wheel_speeds.cwiseMax(-cfg.max_speed).cwiseMin(cfg.max_speed);
    return next;
}

Vec3 inertial_momentum(const PlantState& state, const RwaConfig& cfg)
{
    const Vec3 h_body = cfg.j_body * state.omega + cfg.j_rw * (cfg.g * state.wheel_speeds);
    return attitude::mrp_to_dcm(state.sigma).transpose() * h_body;
}

} // namespace rwfault::plant
