#pragma once

#include "rwfault/guidance.hpp"
#include "rwfault/plant.hpp"
#include "rwfault/types.hpp"

#include <deque>
#include <optional>
#include <span>
#include <vector>

namespace rwfault {

struct ControllerGains {
    Mat3 k = Mat3::Identity();
    Mat3 alpha = Mat3::Identity();
    double beta = 1.0;
    MatX gamma;              ///< N x N adaptation gain
    MatX k1;                 ///< N x N ICL gain, zero disables the data term
    double lambda_bar = 1e-7;
    int n_s = 30;            ///< history stack capacity
    double delta_t = 1.0;    ///< ICL integration window [s]
    double theta_min = 0.0;
    double theta_max = 1.0;
};

/// One integral concurrent learning data point over [t_i - delta_t, t_i].
struct IclPair {
    Mat3X script_y;   ///< integral of the regressor
    Vec3 script_u;    ///< integral of omega x (J omega + J_rw G Omega)
    Vec3 delta_h;     ///< J omega(t_i) - J omega(t_i - delta_t)
    double t_i = 0.0;

    /// delta_h + script_u - script_y * theta; zero for the true theta.
    Vec3 residual(const VecX& theta) const { return delta_h + script_u - script_y * theta; }
};

/// Measurement kept for ICL integration. `y` is the regressor held over the
/// interval that starts at `t`.
struct IclSample {
    double t = 0.0;
    Vec3 omega = Vec3::Zero();
    VecX wheel_speeds;
    Mat3X y;
};

struct FeStatus {
    double lambda_min = 0.0;
    bool satisfied = false;
    std::optional<double> fe_time;
};

/// Fixed-capacity set of ICL pairs. Once full, a candidate replaces the stored
/// pair whose removal gives the largest minimum eigenvalue of sum(Y_i' Y_i),
/// and only if that strictly improves the stack, so lambda_min never decreases.
class HistoryStack {
public:
    HistoryStack() = default;
    HistoryStack(int n_wheels, int capacity, double lambda_bar);

    /// Returns true if the pair was stored. `now` stamps the FE latch.
    bool insert(const IclPair& pair, double now);

    const std::vector<IclPair>& pairs() const { return pairs_; }
    const MatX& fe_matrix() const { return fe_matrix_; }
    double lambda_min() const { return lambda_min_; }
    bool fe_satisfied() const { return fe_time_.has_value(); }
    std::optional<double> fe_time() const { return fe_time_; }
    int capacity() const { return capacity_; }

    /// sum_i Y_i' (delta_h_i + U_i - Y_i theta)
    VecX icl_sum(const VecX& theta_hat) const;

private:
    struct Score {
        double lambda_min = 0.0;
        int rank = 0;
        double trace = 0.0;
    };
    static Score score(const MatX& m);
    static bool better(const Score& a, const Score& b);
    void refresh();

    int n_wheels_ = 0;
    int capacity_ = 0;
    double lambda_bar_ = 0.0;
    std::vector<IclPair> pairs_;
    MatX fe_matrix_;
    double lambda_min_ = 0.0;
    Score score_;
    std::optional<double> fe_time_;
};

FeStatus fe_status(const HistoryStack& stack);

/// Tracking error quantities for one control instant.
struct TrackingError {
    Mrp sigma_e;
    Mat3 r_tilde = Mat3::Identity();
    Vec3 omega_tilde = Vec3::Zero();
    Vec3 sigma_e_dot = Vec3::Zero();
    Mat3 b = Mat3::Identity();
    Vec3 r = Vec3::Zero();
};

struct Allocation {
    VecX u;
    int rank = 0;
    bool controllability_loss = false;
};

namespace control {

/// r = sigma_e_dot + alpha sigma_e
Vec3 filtered_error(const Mrp& sigma_e, const Vec3& sigma_e_dot, const Mat3& alpha);

TrackingError tracking_error(const PlantState& state, const ReferenceSample& ref, const Mat3& alpha);

/// Desired body torque u_d that makes r_dot = -K r - beta sigma_e when the
/// health estimate is exact.
Vec3 auxiliary_control(const PlantState& state, const ReferenceSample& ref, const ControllerGains& gains,
                       const RwaConfig& cfg);

/// Y = G diag(u), so that Y theta = G Phi u.
Mat3X regressor(const VecX& u, const Mat3X& g);

/// Minimum-norm u with G diag(theta_hat) u = u_d (least squares when rank < 3).
Allocation allocate(const Vec3& u_d, const VecX& theta_hat, const Mat3X& g);

/// Builds the ICL pair for the window ending at t_i from time-ordered
/// samples. The regressor is integrated exactly under zero-order hold; the
/// gyroscopic term with the trapezoidal rule. Returns nullopt when the
/// samples do not cover the window.
std::optional<IclPair> icl_accumulate(std::span<const IclSample> samples, double t_i, double delta_t,
                                      const RwaConfig& cfg);

/// Explicit Euler step of the gradient + ICL adaptation law, projected onto
/// [theta_min, theta_max].
VecX adaptation_step(const VecX& theta_hat, const Vec3& r, const Mat3& b, const Mat3X& y,
                     const HistoryStack& stack, const ControllerGains& gains, const RwaConfig& cfg, double dt);

/// V = 1/2 r'r + beta/2 sigma_e'sigma_e + 1/2 theta_tilde' Gamma^-1 theta_tilde
double lyapunov(const Vec3& r, const Mrp& sigma_e, const VecX& theta_tilde, double beta, const MatX& gamma);

} // namespace control

/// Closed-loop adaptive controller owning the health estimate, the ICL sample
/// buffer and the history stack. Single writer.
class AdaptiveController {
public:
    struct Output {
        TrackingError error;
        Vec3 u_d = Vec3::Zero();
        VecX u_commanded;
        VecX u_applied;   ///< u_commanded clamped to the torque limit
        Mat3X y;          ///< regressor built from u_applied
        bool controllability_loss = false;
    };

    AdaptiveController(RwaConfig cfg, ControllerGains gains, VecX theta_init);

    /// Computes the control for `state`, records the ICL sample and, when a
    /// full window is available, offers a new pair to the history stack.
    Output compute(const PlantState& state, const ReferenceSample& ref, double dt);

    /// Advances the health estimate by one step using the last output.
    void adapt(const Output& out, double dt);

    const VecX& theta_hat() const { return theta_hat_; }
    const HistoryStack& stack() const { return stack_; }
    const ControllerGains& gains() const { return gains_; }
    long controllability_loss_events() const { return controllability_loss_events_; }

private:
    RwaConfig cfg_;
    ControllerGains gains_;
    VecX theta_hat_;
    HistoryStack stack_;
    std::deque<IclSample> samples_;
    long step_count_ = 0;
    long controllability_loss_events_ = 0;
};

} // namespace rwfault
