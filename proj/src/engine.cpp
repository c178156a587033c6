#include "rwfault/engine.hpp"

#include "rwfault/attitude_math.hpp"
#include "rwfault/error.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <sstream>

namespace rwfault {

long RunMetrics::total_saturation_events() const
{
    return std::accumulate(saturation_events.begin(), saturation_events.end(), 0L);
}

namespace engine {

RunResult run(const ScenarioConfig& cfg)
{
    scenario::validate_structure(cfg);

    RunResult result;
    result.telemetry.n_wheels = cfg.n_wheels();

    const long steps = std::lround(cfg.duration / cfg.dt);
    const int decimation = cfg.controller_decimation;
    const double dt_ctrl = decimation * cfg.dt;

    AdaptiveController controller(cfg.rwa, cfg.gains, cfg.theta_init);
    PlantState state = cfg.initial;
    state.sigma = attitude::shadow_if_needed(state.sigma);
    AdaptiveController::Output out;

    result.telemetry.records.reserve(static_cast<size_t>(std::max(0L, steps)));
    for (long k = 0; k < steps; ++k) {
        // Time from the step index avoids accumulated round-off at switch instants.
        state.time = static_cast<double>(k) * cfg.dt;
        const ReferenceSample ref = guidance::reference(state.time, cfg.schedule, cfg.orbit);
        const bool control_step = k % decimation == 0;
        if (control_step)
            out = controller.compute(state, ref, dt_ctrl);

        const TrackingError err =
            control_step ? out.error : control::tracking_error(state, ref, cfg.gains.alpha);
        const FeStatus fe = fe_status(controller.stack());
        TelemetryRecord rec;
        rec.t = state.time;
        rec.sigma_e = err.sigma_e.vec();
        rec.r = err.r;
        rec.omega = state.omega;
        rec.wheel_speeds = state.wheel_speeds;
        rec.u_commanded = out.u_commanded;
        rec.u_effective = cfg.phi_true.cwiseProduct(out.u_applied);
        rec.theta_hat = controller.theta_hat();
        rec.lambda_min = fe.lambda_min;
        rec.fe_flag = fe.satisfied;
        rec.lyapunov_v = control::lyapunov(err.r, err.sigma_e, cfg.phi_true - controller.theta_hat(),
                                           cfg.gains.beta, cfg.gains.gamma);
        result.telemetry.records.push_back(std::move(rec));

        if (control_step)
            controller.adapt(out, dt_ctrl);

        try {
            state = plant::step(state, out.u_commanded, cfg.phi_true, cfg.rwa, cfg.dt);
        } catch (const DivergenceError& e) {
            result.divergence = e.what();
            break;
        }
    }

    result.controllability_loss_events = controller.controllability_loss_events();
    result.metrics = compute_metrics(result.telemetry, cfg);
    return result;
}

double composite_error_norm(const TelemetryRecord& rec, const VecX& phi)
{
    return std::sqrt(rec.r.squaredNorm() + rec.sigma_e.squaredNorm() + (phi - rec.theta_hat).squaredNorm());
}

std::optional<LogLinearFit> fit_log_error(const Telemetry& tel, const VecX& phi, double t0, double t1)
{
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (const auto& rec : tel.records) {
        if (rec.t < t0 || rec.t > t1)
            continue;
        const double e = composite_error_norm(rec, phi);
        if (!(e > 0.0))
            continue;
        const double x = rec.t - t0;
        const double y = std::log(e);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
    }
    const double den = n * sxx - sx * sx;
    if (n < 2 || den <= 0.0)
        return std::nullopt;
    LogLinearFit fit;
    fit.slope = (n * sxy - sx * sy) / den;
    // Intercept reported at t = t0.
    fit.intercept = (sy - fit.slope * sx) / n;
    fit.samples = n;
    return fit;
}

RunMetrics compute_metrics(const Telemetry& tel, const ScenarioConfig& cfg)
{
    RunMetrics m;
    const int n = tel.n_wheels;
    m.saturation_events.assign(static_cast<size_t>(n), 0);
    if (tel.records.empty())
        return m;

    const auto& last = tel.records.back();
    m.final_sigma_e_norm = last.sigma_e.norm();
    m.terminal_estimation_error = (last.theta_hat - cfg.phi_true).cwiseAbs();

    for (const auto& rec : tel.records) {
        if (rec.fe_flag && !m.fe_time)
            m.fe_time = rec.t;
        for (int i = 0; i < n; ++i) {
            const double speed = std::abs(rec.wheel_speeds(i));
            m.max_speed_fraction = std::max(m.max_speed_fraction, speed / cfg.rwa.max_speed);
            if (std::abs(rec.u_commanded(i)) > cfg.rwa.max_torque || speed >= cfg.rwa.max_speed)
                ++m.saturation_events[static_cast<size_t>(i)];
        }
    }
    if (m.fe_time) {
        if (auto fit = fit_log_error(tel, cfg.phi_true, *m.fe_time, *m.fe_time + 1000.0))
            m.exp_fit_slope = fit->slope;
    }
    return m;
}

} // namespace engine

namespace {

std::optional<double> first_fe(const Telemetry& t)
{
    for (const auto& rec : t.records)
        if (rec.fe_flag)
            return rec.t;
    return std::nullopt;
}

double mean_abs_after(const Telemetry& t, int wheel, double start)
{
    double sum = 0.0;
    long count = 0;
    for (const auto& rec : t.records) {
        if (rec.t < start)
            continue;
        sum += std::abs(rec.u_commanded(wheel));
        ++count;
    }
    return count ? sum / static_cast<double>(count) : 0.0;
}

} // namespace

CompareReport compare_runs(const Telemetry& a, const Telemetry& b, const CompareOptions& opts)
{
    if (a.n_wheels != b.n_wheels)
        throw ValidationError("compare", "runs have different wheel counts (" + std::to_string(a.n_wheels)
                                             + " vs " + std::to_string(b.n_wheels) + ")");
    if (a.records.empty() || b.records.empty())
        throw ValidationError("compare", "both runs need at least one telemetry record");

    CompareReport rep;
    rep.n_wheels = a.n_wheels;
    rep.fe_time_a = first_fe(a);
    rep.fe_time_b = first_fe(b);
    if (opts.after_fe) {
        const auto fe = rep.fe_time_a ? rep.fe_time_a : rep.fe_time_b;
        if (!fe)
            throw ValidationError("compare", "--after-fe requested but neither run reached the FE threshold");
        rep.window_start = *fe + opts.fe_margin;
    }
    rep.final_sigma_e_a = a.records.back().sigma_e.norm();
    rep.final_sigma_e_b = b.records.back().sigma_e.norm();

    std::vector<int> wheels = opts.wheels;
    if (wheels.empty()) {
        for (int i = 1; i <= a.n_wheels; ++i)
            wheels.push_back(i);
    }
    for (int w : wheels) {
        if (w < 1 || w > a.n_wheels)
            throw ValidationError("compare.wheels", "wheel " + std::to_string(w) + " out of range 1.."
                                                        + std::to_string(a.n_wheels));
        WheelComparison c;
        c.wheel = w;
        c.mean_abs_u_a = mean_abs_after(a, w - 1, rep.window_start);
        c.mean_abs_u_b = mean_abs_after(b, w - 1, rep.window_start);
        c.delta = c.mean_abs_u_a - c.mean_abs_u_b;
        if (c.mean_abs_u_b != 0.0)
            c.ratio = c.mean_abs_u_a / c.mean_abs_u_b;
        else
            c.ratio = c.mean_abs_u_a == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
        c.final_theta_a = a.records.back().theta_hat(w - 1);
        c.final_theta_b = b.records.back().theta_hat(w - 1);
        rep.wheels.push_back(c);
    }
    return rep;
}

std::string CompareReport::to_text() const
{
    std::ostringstream os;
    char line[256];
    os << "wheels: " << n_wheels << "\n";
    if (fe_time_a) {
        std::snprintf(line, sizeof(line), "fe_time_a: %.1f s\n", *fe_time_a);
        os << line;
    }
    if (fe_time_b) {
        std::snprintf(line, sizeof(line), "fe_time_b: %.1f s\n", *fe_time_b);
        os << line;
    }
    std::snprintf(line, sizeof(line), "window_start: %.1f s\n", window_start);
    os << line;
    std::snprintf(line, sizeof(line), "final_sigma_e_norm: a=%.6e b=%.6e delta=%.6e\n", final_sigma_e_a,
                  final_sigma_e_b, final_sigma_e_a - final_sigma_e_b);
    os << line;
    os << "wheel  mean|u|_a     mean|u|_b     ratio_a/b     delta          theta_a       theta_b\n";
    for (const auto& w : wheels) {
        std::snprintf(line, sizeof(line), "%-6d %-13.6e %-13.6e %-13.6e %-14.6e %-13.6e %.6e\n", w.wheel,
                      w.mean_abs_u_a, w.mean_abs_u_b, w.ratio, w.delta, w.final_theta_a, w.final_theta_b);
        os << line;
    }
    return os.str();
}

} // namespace rwfault
