// rwfault command-line driver. Talks to the library through the C API only.
//
// Exit codes: 0 success, 2 usage, otherwise 2 + rwf_status
// (3 parse, 4 validation, 5 divergence, 6 i/o, 7 argument, 8 internal).

#include "rwfault/rwfault.h"

#include <CLI11.hpp>

#include <cstdio>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace {

struct ScenarioDeleter {
    void operator()(rwf_scenario* s) const { rwf_scenario_free(s); }
};
struct RunDeleter {
    void operator()(rwf_run* r) const { rwf_run_free(r); }
};
struct TelemetryDeleter {
    void operator()(rwf_telemetry* t) const { rwf_telemetry_free(t); }
};
using ScenarioPtr = std::unique_ptr<rwf_scenario, ScenarioDeleter>;
using RunPtr = std::unique_ptr<rwf_run, RunDeleter>;
using TelemetryPtr = std::unique_ptr<rwf_telemetry, TelemetryDeleter>;

int report(rwf_status s)
{
    std::fprintf(stderr, "error (%s): %s\n", rwf_status_name(s), rwf_last_error());
    return 2 + static_cast<int>(s);
}

int cmd_run(const std::string& source, const std::string& out, std::optional<double> duration,
            std::optional<double> dt)
{
    rwf_scenario* raw = nullptr;
    if (rwf_status s = rwf_scenario_load(source.c_str(), &raw))
        return report(s);
    ScenarioPtr scenario(raw);
    if (dt)
        if (rwf_status s = rwf_scenario_set_dt(scenario.get(), *dt))
            return report(s);
    if (duration)
        if (rwf_status s = rwf_scenario_set_duration(scenario.get(), *duration))
            return report(s);

    rwf_run* run_raw = nullptr;
    const rwf_status run_status = rwf_run_scenario(scenario.get(), &run_raw);
    RunPtr run(run_raw);
    if (!run)
        return report(run_status);
    const std::string run_error = run_status != RWF_OK ? rwf_last_error() : "";

    const std::string path = out.empty() ? rwf_scenario_output_path(scenario.get()) : out;
    if (!path.empty()) {
        if (rwf_status s = rwf_run_write_csv(run.get(), path.c_str()))
            return report(s);
    }

    rwf_metrics m{};
    rwf_run_metrics(run.get(), &m);
    std::printf("records: %zu\n", rwf_run_record_count(run.get()));
    if (m.has_final_sigma_e)
        std::printf("final_sigma_e_norm: %.6e\n", m.final_sigma_e_norm);
    if (m.has_fe_time)
        std::printf("fe_time: %.1f s\n", m.fe_time);
    else
        std::printf("fe_time: none\n");
    if (m.has_exp_fit_slope)
        std::printf("exp_fit_slope: %.6e 1/s\n", m.exp_fit_slope);
    std::printf("max_speed_fraction: %.6e\n", m.max_speed_fraction);
    std::printf("saturation_events: %ld\n", m.total_saturation_events);
    std::printf("controllability_loss_events: %ld\n", m.controllability_loss_events);
    std::printf("wheel  |theta_hat-phi|  saturation_events\n");
    for (int i = 1; i <= m.n_wheels; ++i) {
        double err = 0.0;
        long sat = 0;
        rwf_run_wheel_metrics(run.get(), i, &err, &sat);
        std::printf("%-6d %-16.6e %ld\n", i, err, sat);
    }
    if (!path.empty())
        std::printf("telemetry: %s\n", path.c_str());

    if (run_status != RWF_OK) {
        std::fprintf(stderr, "error (%s): %s\n", rwf_status_name(run_status), run_error.c_str());
        return 2 + static_cast<int>(run_status);
    }
    return 0;
}

int cmd_presets_list()
{
    for (size_t i = 0; i < rwf_preset_count(); ++i)
        std::printf("%-14s %s\n", rwf_preset_name(i), rwf_preset_description(i));
    return 0;
}

int cmd_presets_show(const std::string& name)
{
    rwf_scenario* raw = nullptr;
    if (rwf_status s = rwf_scenario_load(name.c_str(), &raw))
        return report(s);
    ScenarioPtr scenario(raw);
    size_t needed = 0;
    rwf_scenario_to_json(scenario.get(), nullptr, 0, &needed);
    std::string text(needed, '\0');
    if (rwf_status s = rwf_scenario_to_json(scenario.get(), text.data(), text.size(), &needed))
        return report(s);
    std::printf("%s\n", text.c_str());
    return 0;
}

int cmd_validate(const std::string& source)
{
    rwf_scenario* raw = nullptr;
    if (rwf_status s = rwf_scenario_load(source.c_str(), &raw))
        return report(s);
    ScenarioPtr scenario(raw);
    std::printf("ok: %d wheels\n", rwf_scenario_wheel_count(scenario.get()));
    return 0;
}

int cmd_compare(const std::string& a_path, const std::string& b_path, const std::vector<int>& wheels,
                bool after_fe, double margin)
{
    rwf_telemetry* a_raw = nullptr;
    if (rwf_status s = rwf_telemetry_read(a_path.c_str(), &a_raw))
        return report(s);
    TelemetryPtr a(a_raw);
    rwf_telemetry* b_raw = nullptr;
    if (rwf_status s = rwf_telemetry_read(b_path.c_str(), &b_raw))
        return report(s);
    TelemetryPtr b(b_raw);

    size_t needed = 0;
    if (rwf_status s = rwf_compare(a.get(), b.get(), wheels.data(), wheels.size(), after_fe, margin, nullptr,
                                   nullptr, 0, &needed))
        return report(s);
    std::string text(needed, '\0');
    if (rwf_status s = rwf_compare(a.get(), b.get(), wheels.data(), wheels.size(), after_fe, margin, nullptr,
                                   text.data(), text.size(), &needed))
        return report(s);
    std::printf("%s", text.c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Reaction-wheel fault estimating attitude control simulator"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(rwf_version()));

    std::string source, out;
    std::optional<double> duration, dt;
    auto* run = app.add_subcommand("run", "Run a scenario file or preset");
    run->add_option("source", source, "Scenario JSON file or preset name")->required();
    run->add_option("--out", out, "Telemetry CSV output path");
    run->add_option("--duration", duration, "Simulated time [s]");
    run->add_option("--dt", dt, "Integration step [s]");

    auto* presets = app.add_subcommand("presets", "Built-in scenarios");
    presets->require_subcommand(1);
    presets->add_subcommand("list", "List presets");
    std::string show_name;
    auto* show = presets->add_subcommand("show", "Print a preset as JSON");
    show->add_option("name", show_name)->required();

    std::string a_path, b_path;
    std::vector<int> wheels;
    bool after_fe = false;
    double margin = 0.0;
    auto* compare = app.add_subcommand("compare", "Compare the allocated torques of two telemetry files");
    compare->add_option("a", a_path, "Telemetry CSV (run a)")->required();
    compare->add_option("b", b_path, "Telemetry CSV (run b)")->required();
    compare->add_option("--wheels", wheels, "1-based wheel indices, comma separated")->delimiter(',');
    compare->add_flag("--after-fe", after_fe, "Average only after the first FE time");
    compare->add_option("--fe-margin", margin, "Seconds added to the FE time");

    std::string validate_source;
    auto* validate = app.add_subcommand("validate", "Validate a scenario file or preset");
    validate->add_option("source", validate_source)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (run->parsed())
        return cmd_run(source, out, duration, dt);
    if (presets->parsed())
        return show->parsed() ? cmd_presets_show(show_name) : cmd_presets_list();
    if (compare->parsed())
        return cmd_compare(a_path, b_path, wheels, after_fe, margin);
    if (validate->parsed())
        return cmd_validate(validate_source);
    return 2;
}
