#pragma once

#include "rwfault/types.hpp"

namespace rwfault {

enum class WheelTorqueModel {
    /// Wheel spin-up driven by the torque the faulty wheel actually delivers, -Phi u / J_rw.
    Effective,
    /// Wheel spin-up driven by the commanded torque, -u / J_rw.
    Commanded,
};

struct RwaConfig {
    Mat3X g;              ///< spin axes in body frame, one column per wheel
    double j_rw = 0.0;    ///< wheel spin-axis inertia [kg m^2]
    double max_torque = 0.0; ///< [N m]
    double max_speed = 0.0;  ///< [rad/s]
    Mat3 j_body = Mat3::Identity(); ///< spacecraft inertia [kg m^2]
    WheelTorqueModel wheel_torque_model = WheelTorqueModel::Effective;

    int n_wheels() const { return static_cast<int>(g.cols()); }
};

struct PlantState {
    Mrp sigma;
    Vec3 omega = Vec3::Zero();
    VecX wheel_speeds;
    double time = 0.0;
};

struct PlantDerivative {
    Vec3 sigma_dot;
    Vec3 omega_dot;
    VecX wheel_accel;
};

namespace plant {

/// Clamp each wheel torque to +-max_torque.
VecX saturate_torque(const VecX& u, const RwaConfig& cfg);

/// Rigid body plus wheel array equations of motion. `u` is the commanded
/// wheel torque; it is clamped before use. `phi` holds the true health factors.
PlantDerivative eom(const PlantState& state, const VecX& u, const VecX& phi, const RwaConfig& cfg);

/// One classical RK4 step with `u` held over [t, t+dt]. Wheel speeds are
/// clamped to +-max_speed afterwards and sigma is switched to its shadow set
/// when it leaves the unit ball. Throws DivergenceError on a non-finite result.
PlantState step(const PlantState& state, const VecX& u, const VecX& phi, const RwaConfig& cfg, double dt);

/// Total angular momentum (body plus wheels) resolved in the inertial frame.
Vec3 inertial_momentum(const PlantState& state, const RwaConfig& cfg);

} // namespace plant
} // namespace rwfault
