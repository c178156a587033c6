#include "rwfault/rwfault.h"

#include "rwfault/engine.hpp"
#include "rwfault/error.hpp"
#include "rwfault/scenario.hpp"
#include "rwfault/telemetry.hpp"

#include <cstring>
#include <new>
#include <string>

struct rwf_scenario {
    rwfault::ScenarioConfig cfg;
};

struct rwf_run {
    rwfault::RunResult result;
};

struct rwf_telemetry {
    rwfault::Telemetry tel;
};

namespace {

thread_local std::string last_error;

rwf_status fail(rwf_status s, const std::string& msg)
{
    last_error = msg;
    return s;
}

rwf_status to_status(rwfault::ErrorKind k)
{
    switch (k) {
    case rwfault::ErrorKind::Parse: return RWF_ERR_PARSE;
    case rwfault::ErrorKind::Validation: return RWF_ERR_VALIDATION;
    case rwfault::ErrorKind::Divergence: return RWF_ERR_DIVERGENCE;
    case rwfault::ErrorKind::Io: return RWF_ERR_IO;
    case rwfault::ErrorKind::Argument: return RWF_ERR_ARGUMENT;
    }
    return RWF_ERR_INTERNAL;
}

template <typename F>
rwf_status guarded(F&& f)
{
    try {
        last_error.clear();
        return f();
    } catch (const rwfault::Error& e) {
        return fail(to_status(e.kind()), e.what());
    } catch (const std::bad_alloc&) {
        return fail(RWF_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(RWF_ERR_INTERNAL, e.what());
    }
}

rwf_status copy_out(const std::string& s, char* buf, size_t cap, size_t* needed)
{
    if (needed)
        *needed = s.size() + 1;
    if (!buf)
        return RWF_OK;
    if (cap < s.size() + 1)
        return fail(RWF_ERR_ARGUMENT, "buffer too small: need " + std::to_string(s.size() + 1) + " bytes");
    std::memcpy(buf, s.c_str(), s.size() + 1);
    return RWF_OK;
}

} // namespace

extern "C" {

const char* rwf_version(void)
{
    return "0.1.0";
}

const char* rwf_status_name(rwf_status status)
{
    switch (status) {
    case RWF_OK: return "ok";
    case RWF_ERR_PARSE: return "parse error";
    case RWF_ERR_VALIDATION: return "validation error";
    case RWF_ERR_DIVERGENCE: return "divergence";
    case RWF_ERR_IO: return "i/o error";
    case RWF_ERR_ARGUMENT: return "invalid argument";
    case RWF_ERR_INTERNAL: return "internal error";
    }
    return "unknown";
}

const char* rwf_last_error(void)
{
    return last_error.c_str();
}

size_t rwf_preset_count(void)
{
    return rwfault::scenario::presets().size();
}

const char* rwf_preset_name(size_t index)
{
    const auto& p = rwfault::scenario::presets();
    return index < p.size() ? p[index].name.c_str() : nullptr;
}

const char* rwf_preset_description(size_t index)
{
    const auto& p = rwfault::scenario::presets();
    return index < p.size() ? p[index].description.c_str() : nullptr;
}

rwf_status rwf_scenario_load(const char* source, rwf_scenario** out)
{
    if (!source || !out)
        return fail(RWF_ERR_ARGUMENT, "null argument");
    *out = nullptr;
    return guarded([&] {
        *out = new rwf_scenario{rwfault::scenario::load_config(source)};
        return RWF_OK;
    });
}

rwf_status rwf_scenario_from_text(const char* json_text, rwf_scenario** out)
{
    if (!json_text || !out)
        return fail(RWF_ERR_ARGUMENT, "null argument");
    *out = nullptr;
    return guarded([&] {
        *out = new rwf_scenario{rwfault::scenario::load_config_text(json_text)};
        return RWF_OK;
    });
}

void rwf_scenario_free(rwf_scenario* scenario)
{
    delete scenario;
}

int rwf_scenario_wheel_count(const rwf_scenario* scenario)
{
    return scenario ? scenario->cfg.n_wheels() : 0;
}

rwf_status rwf_scenario_set_duration(rwf_scenario* scenario, double seconds)
{
    if (!scenario)
        return fail(RWF_ERR_ARGUMENT, "null scenario");
    return guarded([&] {
        rwfault::ScenarioConfig c = scenario->cfg;
        c.duration = seconds;
        rwfault::scenario::validate(c);
        scenario->cfg = std::move(c);
        return RWF_OK;
    });
}

rwf_status rwf_scenario_set_dt(rwf_scenario* scenario, double seconds)
{
    if (!scenario)
        return fail(RWF_ERR_ARGUMENT, "null scenario");
    return guarded([&] {
        rwfault::ScenarioConfig c = scenario->cfg;
        c.dt = seconds;
        rwfault::scenario::validate(c);
        scenario->cfg = std::move(c);
        return RWF_OK;
    });
}

const char* rwf_scenario_output_path(const rwf_scenario* scenario)
{
    return scenario ? scenario->cfg.output.c_str() : "";
}

rwf_status rwf_scenario_to_json(const rwf_scenario* scenario, char* buf, size_t cap, size_t* needed)
{
    if (!scenario)
        return fail(RWF_ERR_ARGUMENT, "null scenario");
    return guarded([&] { return copy_out(rwfault::scenario::to_json(scenario->cfg), buf, cap, needed); });
}

rwf_status rwf_run_scenario(const rwf_scenario* scenario, rwf_run** out)
{
    if (!scenario || !out)
        return fail(RWF_ERR_ARGUMENT, "null argument");
    *out = nullptr;
    return guarded([&] {
        *out = new rwf_run{rwfault::engine::run(scenario->cfg)};
        if ((*out)->result.divergence)
            return fail(RWF_ERR_DIVERGENCE, *(*out)->result.divergence);
        return RWF_OK;
    });
}

void rwf_run_free(rwf_run* run)
{
    delete run;
}

size_t rwf_run_record_count(const rwf_run* run)
{
    return run ? run->result.telemetry.records.size() : 0;
}

rwf_status rwf_run_metrics(const rwf_run* run, rwf_metrics* out)
{
    if (!run || !out)
        return fail(RWF_ERR_ARGUMENT, "null argument");
    const auto& m = run->result.metrics;
    *out = rwf_metrics{};
    out->n_wheels = run->result.telemetry.n_wheels;
    out->has_final_sigma_e = m.final_sigma_e_norm.has_value();
    out->final_sigma_e_norm = m.final_sigma_e_norm.value_or(0.0);
    out->has_fe_time = m.fe_time.has_value();
    out->fe_time = m.fe_time.value_or(0.0);
    out->max_speed_fraction = m.max_speed_fraction;
    out->total_saturation_events = m.total_saturation_events();
    out->has_exp_fit_slope = m.exp_fit_slope.has_value();
    out->exp_fit_slope = m.exp_fit_slope.value_or(0.0);
    out->controllability_loss_events = run->result.controllability_loss_events;
    out->diverged = run->result.divergence.has_value();
    return RWF_OK;
}

rwf_status rwf_run_wheel_metrics(const rwf_run* run, int wheel, double* estimation_error, long* saturation_events)
{
    if (!run)
        return fail(RWF_ERR_ARGUMENT, "null run");
    const auto& m = run->result.metrics;
    if (wheel < 1 || wheel > run->result.telemetry.n_wheels)
        return fail(RWF_ERR_ARGUMENT, "wheel index out of range");
    if (estimation_error)
        *estimation_error =
            m.terminal_estimation_error.size() ? m.terminal_estimation_error(wheel - 1) : 0.0;
    if (saturation_events)
        *saturation_events = m.saturation_events[static_cast<size_t>(wheel - 1)];
    return RWF_OK;
}

rwf_status rwf_run_write_csv(const rwf_run* run, const char* path)
{
    if (!run || !path)
        return fail(RWF_ERR_ARGUMENT, "null argument");
    return guarded([&] {
        rwfault::telemetry::write_csv(run->result.telemetry, path);
        return RWF_OK;
    });
}

rwf_status rwf_telemetry_read(const char* path, rwf_telemetry** out)
{
    if (!path || !out)
        return fail(RWF_ERR_ARGUMENT, "null argument");
    *out = nullptr;
    return guarded([&] {
        *out = new rwf_telemetry{rwfault::telemetry::read_csv(path)};
        return RWF_OK;
    });
}

void rwf_telemetry_free(rwf_telemetry* telemetry)
{
    delete telemetry;
}

size_t rwf_telemetry_record_count(const rwf_telemetry* telemetry)
{
    return telemetry ? telemetry->tel.records.size() : 0;
}

int rwf_telemetry_wheel_count(const rwf_telemetry* telemetry)
{
    return telemetry ? telemetry->tel.n_wheels : 0;
}

rwf_status rwf_compare(const rwf_telemetry* a, const rwf_telemetry* b, const int* wheels, size_t n_wheels,
                       int after_fe, double fe_margin, double* ratios, char* buf, size_t cap, size_t* needed)
{
    if (!a || !b)
        return fail(RWF_ERR_ARGUMENT, "null telemetry");
    return guarded([&] {
        rwfault::CompareOptions opts;
        if (wheels)
            opts.wheels.assign(wheels, wheels + n_wheels);
        opts.after_fe = after_fe != 0;
        opts.fe_margin = fe_margin;
        const rwfault::CompareReport rep = rwfault::compare_runs(a->tel, b->tel, opts);
        if (ratios) {
            for (size_t i = 0; i < rep.wheels.size(); ++i)
                ratios[i] = rep.wheels[i].ratio;
        }
        return copy_out(rep.to_text(), buf, cap, needed);
    });
}

} // extern "C"
