#pragma once

#include "rwfault/scenario.hpp"
#include "rwfault/telemetry.hpp"

#include <optional>
#include <string>
#include <vector>

namespace rwfault {

struct RunMetrics {
    std::optional<double> final_sigma_e_norm;
    std::optional<double> fe_time;
    VecX terminal_estimation_error;        ///< |theta_hat_i - phi_i| at the last record
    double max_speed_fraction = 0.0;       ///< max |Omega_i| / max_speed
    std::vector<long> saturation_events;   ///< per wheel, steps with torque or speed clamping
    std::optional<double> exp_fit_slope;   ///< slope of log|eta| over [T, T + 1000 s]

    long total_saturation_events() const;
};

struct RunResult {
    Telemetry telemetry;
    RunMetrics metrics;
    long controllability_loss_events = 0;
    /// Set when the plant diverged; telemetry ends at the last valid record.
    std::optional<std::string> divergence;
};

struct LogLinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    int samples = 0;
};

namespace engine {

/// Fixed-step closed loop: guidance, controller, adaptation, plant. Fully
/// deterministic for a given configuration.
RunResult run(const ScenarioConfig& cfg);

/// |(r, sigma_e, phi - theta_hat)| for one record.
double composite_error_norm(const TelemetryRecord& rec, const VecX& phi);

/// Least-squares fit of log(composite_error_norm) against t over [t0, t1].
std::optional<LogLinearFit> fit_log_error(const Telemetry& tel, const VecX& phi, double t0, double t1);

RunMetrics compute_metrics(const Telemetry& tel, const ScenarioConfig& cfg);

} // namespace engine

struct CompareOptions {
    std::vector<int> wheels;   ///< 1-based; empty means all
    bool after_fe = false;
    double fe_margin = 0.0;    ///< [s] added to the FE time when after_fe is set
};

struct WheelComparison {
    int wheel = 0;
    double mean_abs_u_a = 0.0;
    double mean_abs_u_b = 0.0;
    double ratio = 0.0;         ///< a / b, infinity when b is zero and a is not
    double delta = 0.0;         ///< a - b
    double final_theta_a = 0.0;
    double final_theta_b = 0.0;
};

struct CompareReport {
    int n_wheels = 0;
    double window_start = 0.0;
    std::optional<double> fe_time_a;
    std::optional<double> fe_time_b;
    double final_sigma_e_a = 0.0;
    double final_sigma_e_b = 0.0;
    std::vector<WheelComparison> wheels;

    std::string to_text() const;
};

/// Side-by-side comparison of two runs over a common window. With `after_fe`
/// the window starts at the first FE time found (run a first, then b).
CompareReport compare_runs(const Telemetry& a, const Telemetry& b, const CompareOptions& opts);

} // namespace rwfault
