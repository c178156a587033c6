#include "rwfault/scenario.hpp"

#include "rwfault/error.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace rwfault::scenario {

using nlohmann::json;

namespace {

// Reaction wheel arrays and the spacecraft inertia used by the built-in cases.
Mat3X pyramid_array()
{
    Mat3X g(3, 4);
    g << 0.5774, -0.5774, 0.5774, -0.5774,
         0.5774, 0.5774, -0.5774, -0.5774,
         0.5774, 0.5774, 0.5774, 0.5774;
    return g;
}

Mat3X hexagon_array()
{
    Mat3X g(3, 6);
    g << 0.5, 0.5, 0.5, 0.5, 0.5, 0.5,
         0.0, 0.75, 0.75, 0.0, -0.75, -0.75,
         0.866, 0.433, -0.433, -0.866, -0.433, 0.433;
    return g;
}

VecX vec(std::initializer_list<double> v)
{
    VecX out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v)
        out(i++) = x;
    return out;
}

ScenarioConfig base_case(std::string name, Mat3X g, VecX phi)
{
    ScenarioConfig c;
    c.name = std::move(name);
    const auto n = g.cols();
    c.rwa.g = std::move(g);
    c.rwa.j_rw = 5.7296e5;
    c.rwa.max_torque = 20e-3;
    c.rwa.max_speed = 1.0472e3;
    c.rwa.j_body = Vec3(0.4333, 0.7042, 0.7042).asDiagonal();
    c.phi_true = std::move(phi);
    c.gains.alpha = 3e-2 * Mat3::Identity();
    c.gains.beta = 5e-3;
    c.theta_init = VecX::Ones(n);
    c.schedule = guidance::alternating_schedule();
    c.initial.wheel_speeds = VecX::Zero(n);
    return c;
}

ScenarioConfig four_wheel_case(std::string name, double k1)
{
    ScenarioConfig c = base_case(std::move(name), pyramid_array(), vec({1, 1, 0, 1}));
    c.gains.k1 = k1 * MatX::Identity(4, 4);
    c.gains.k = 5e-1 * Mat3::Identity();
    c.gains.gamma = 100.0 * MatX::Identity(4, 4);
    c.gains.lambda_bar = 1e-7;
    return c;
}

ScenarioConfig six_wheel_case(std::string name, VecX phi, double k1)
{
    ScenarioConfig c = base_case(std::move(name), hexagon_array(), std::move(phi));
    c.gains.k1 = k1 * MatX::Identity(6, 6);
    c.gains.k = 5e-2 * Mat3::Identity();
    c.gains.gamma = 300.0 * MatX::Identity(6, 6);
    c.gains.lambda_bar = 8e-9;
    return c;
}

// ---------------------------------------------------------------------------
// JSON helpers

[[noreturn]] void bad_type(const std::string& field, const std::string& expected)
{
    throw ParseError(field + ": expected " + expected);
}

double number(const json& j, const std::string& field)
{
    if (!j.is_number())
        bad_type(field, "a number");
    return j.get<double>();
}

VecX vector(const json& j, const std::string& field)
{
    if (!j.is_array())
        bad_type(field, "an array of numbers");
    VecX v(static_cast<Eigen::Index>(j.size()));
    for (size_t i = 0; i < j.size(); ++i)
        v(static_cast<Eigen::Index>(i)) = number(j[i], field + "[" + std::to_string(i) + "]");
    return v;
}

MatX rows(const json& j, const std::string& field)
{
    if (!j.is_array() || j.empty() || !j[0].is_array())
        bad_type(field, "an array of rows");
    const size_t cols = j[0].size();
    MatX m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
    for (size_t r = 0; r < j.size(); ++r) {
        const VecX row = vector(j[r], field + "[" + std::to_string(r) + "]");
        if (static_cast<size_t>(row.size()) != cols)
            throw ValidationError(field, "rows have different lengths");
        m.row(static_cast<Eigen::Index>(r)) = row.transpose();
    }
    return m;
}

/// Square matrix given as a scalar (times identity), a diagonal, or full rows.
MatX square(const json& j, const std::string& field)
{
    if (j.is_number())
        return MatX::Identity(1, 1) * j.get<double>(); // resized by the caller
    if (j.is_array() && !j.empty() && j[0].is_number())
        return vector(j, field).asDiagonal();
    const MatX m = rows(j, field);
    if (m.rows() != m.cols())
        throw ValidationError(field, "matrix must be square");
    return m;
}

MatX square_sized(const json& j, const std::string& field, Eigen::Index n)
{
    if (j.is_number())
        return j.get<double>() * MatX::Identity(n, n);
    MatX m = square(j, field);
    if (m.rows() != n)
        throw ValidationError(field, "dimension mismatch: expected " + std::to_string(n) + "x"
                                         + std::to_string(n) + ", got " + std::to_string(m.rows()) + "x"
                                         + std::to_string(m.cols()));
    return m;
}

void check_keys(const json& obj, const std::string& where, const std::set<std::string>& allowed)
{
    if (!obj.is_object())
        bad_type(where.empty() ? "document" : where, "an object");
    for (const auto& [key, _] : obj.items()) {
        if (!allowed.count(key))
            throw ValidationError(where.empty() ? key : where + "." + key, "unknown key");
    }
}

json matrix_json(const MatX& m)
{
    json out = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            row.push_back(m(r, c));
        out.push_back(row);
    }
    return out;
}

json vector_json(const VecX& v)
{
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i)
        out.push_back(v(i));
    return out;
}

const char* mode_name(GuidanceMode m)
{
    return m == GuidanceMode::NadirPointing ? "nadir" : "inertial";
}

bool is_symmetric(const MatX& m)
{
    return (m - m.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, m.cwiseAbs().maxCoeff());
}

void require_spd(const MatX& m, const std::string& field)
{
    if (!m.allFinite())
        throw ValidationError(field, "non-finite entries");
    if (!is_symmetric(m))
        throw ValidationError(field, "matrix must be symmetric");
    Eigen::SelfAdjointEigenSolver<MatX> eig(m, Eigen::EigenvaluesOnly);
    if (eig.eigenvalues().minCoeff() <= 0.0)
        throw ValidationError(field, "matrix must be positive definite");
}

void require_psd(const MatX& m, const std::string& field)
{
    if (!m.allFinite())
        throw ValidationError(field, "non-finite entries");
    if (!is_symmetric(m))
        throw ValidationError(field, "matrix must be symmetric");
    Eigen::SelfAdjointEigenSolver<MatX> eig(m, Eigen::EigenvaluesOnly);
    if (eig.eigenvalues().minCoeff() < -1e-12 * std::max(1.0, eig.eigenvalues().cwiseAbs().maxCoeff()))
        throw ValidationError(field, "matrix must be positive semi-definite");
}

void require_positive(double v, const std::string& field)
{
    if (!(v > 0.0) || !std::isfinite(v))
        throw ValidationError(field, "must be positive and finite");
}

void require_size(Eigen::Index got, Eigen::Index want, const std::string& field)
{
    if (got != want)
        throw ValidationError(field, "dimension mismatch: expected " + std::to_string(want) + " entries, got "
                                         + std::to_string(got));
}

} // namespace

const std::vector<PresetInfo>& presets()
{
    static const std::vector<PresetInfo> list = {
        {"case1", "4-wheel pyramid, wheel 3 failed, ICL on"},
        {"case2", "4-wheel pyramid, wheel 3 failed, ICL off (K1 = 0)"},
        {"case3", "6-wheel hexagon, wheels 1 and 2 failed, ICL on"},
        {"case4", "6-wheel hexagon, wheel 1 failed, wheel 2 at 30%, ICL on"},
        {"case3-no-icl", "case3 with K1 = 0, twin run for the torque reallocation study"},
    };
    return list;
}

ScenarioConfig preset(std::string_view name)
{
    if (name == "case1")
        return four_wheel_case("case1", 10.0);
    if (name == "case2") {
        // The threshold is only monitored when K1 = 0.
        return four_wheel_case("case2", 0.0);
    }
    if (name == "case3")
        return six_wheel_case("case3", vec({0, 0, 1, 1, 1, 1}), 10.0);
    if (name == "case4")
        return six_wheel_case("case4", vec({0, 0.3, 1, 1, 1, 1}), 10.0);
    if (name == "case3-no-icl")
        return six_wheel_case("case3-no-icl", vec({0, 0, 1, 1, 1, 1}), 0.0);
    throw ValidationError("preset", "unknown preset '" + std::string(name) + "'");
}

ScenarioConfig load_config_text(std::string_view text)
{
    json doc;
    try {
        doc = json::parse(text.begin(), text.end(), nullptr, true, true);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("scenario document: ") + e.what());
    }

    check_keys(doc, "", {"name", "base", "rwa", "phi_true", "gains", "theta_init", "orbit", "schedule",
                         "initial", "dt", "duration", "controller_decimation", "mass", "output"});

    ScenarioConfig c;
    if (doc.contains("base")) {
        if (!doc["base"].is_string())
            bad_type("base", "a preset name");
        c = preset(doc["base"].get<std::string>());
    }
    if (doc.contains("name")) {
        if (!doc["name"].is_string())
            bad_type("name", "a string");
        c.name = doc["name"].get<std::string>();
    }

    if (doc.contains("rwa")) {
        const json& r = doc["rwa"];
        check_keys(r, "rwa", {"g", "j_rw", "max_torque", "max_speed", "j_body", "wheel_torque_model"});
        if (r.contains("g")) {
            const MatX g = rows(r["g"], "rwa.g");
            if (g.rows() != 3)
                throw ValidationError("rwa.g", "must have exactly 3 rows");
            c.rwa.g = g;
        }
        if (r.contains("j_rw"))
            c.rwa.j_rw = number(r["j_rw"], "rwa.j_rw");
        if (r.contains("max_torque"))
            c.rwa.max_torque = number(r["max_torque"], "rwa.max_torque");
        if (r.contains("max_speed"))
            c.rwa.max_speed = number(r["max_speed"], "rwa.max_speed");
        if (r.contains("j_body"))
            c.rwa.j_body = square_sized(r["j_body"], "rwa.j_body", 3);
        if (r.contains("wheel_torque_model")) {
            const json& m = r["wheel_torque_model"];
            if (m == "effective")
                c.rwa.wheel_torque_model = WheelTorqueModel::Effective;
            else if (m == "commanded")
                c.rwa.wheel_torque_model = WheelTorqueModel::Commanded;
            else
                throw ValidationError("rwa.wheel_torque_model", "expected \"effective\" or \"commanded\"");
        }
    }
    const Eigen::Index n = c.rwa.g.cols();

    if (doc.contains("phi_true"))
        c.phi_true = vector(doc["phi_true"], "phi_true");

    if (doc.contains("gains")) {
        const json& g = doc["gains"];
        check_keys(g, "gains", {"k", "alpha", "beta", "gamma", "k1", "lambda_bar", "n_s", "delta_t",
                                "theta_bounds"});
        if (g.contains("k"))
            c.gains.k = square_sized(g["k"], "gains.k", 3);
        if (g.contains("alpha"))
            c.gains.alpha = square_sized(g["alpha"], "gains.alpha", 3);
        if (g.contains("beta"))
            c.gains.beta = number(g["beta"], "gains.beta");
        if (g.contains("gamma"))
            c.gains.gamma = square_sized(g["gamma"], "gains.gamma", n);
        if (g.contains("k1"))
            c.gains.k1 = square_sized(g["k1"], "gains.k1", n);
        if (g.contains("lambda_bar"))
            c.gains.lambda_bar = number(g["lambda_bar"], "gains.lambda_bar");
        if (g.contains("n_s")) {
            if (!g["n_s"].is_number_integer())
                bad_type("gains.n_s", "an integer");
            c.gains.n_s = g["n_s"].get<int>();
        }
        if (g.contains("delta_t"))
            c.gains.delta_t = number(g["delta_t"], "gains.delta_t");
        if (g.contains("theta_bounds")) {
            const VecX b = vector(g["theta_bounds"], "gains.theta_bounds");
            require_size(b.size(), 2, "gains.theta_bounds");
            c.gains.theta_min = b(0);
            c.gains.theta_max = b(1);
        }
    }

    if (doc.contains("theta_init"))
        c.theta_init = vector(doc["theta_init"], "theta_init");
    else if (c.theta_init.size() != n)
        c.theta_init = VecX::Ones(n);

    if (doc.contains("orbit")) {
        const json& o = doc["orbit"];
        check_keys(o, "orbit", {"radius", "mu", "raan", "inclination", "arg_latitude_epoch"});
        if (o.contains("radius"))
            c.orbit.radius = number(o["radius"], "orbit.radius");
        if (o.contains("mu"))
            c.orbit.mu = number(o["mu"], "orbit.mu");
        if (o.contains("raan"))
            c.orbit.raan = number(o["raan"], "orbit.raan");
        if (o.contains("inclination"))
            c.orbit.inclination = number(o["inclination"], "orbit.inclination");
        if (o.contains("arg_latitude_epoch"))
            c.orbit.arg_latitude_epoch = number(o["arg_latitude_epoch"], "orbit.arg_latitude_epoch");
    }

    if (doc.contains("schedule")) {
        const json& s = doc["schedule"];
        if (!s.is_array())
            bad_type("schedule", "an array of {t, mode} entries");
        c.schedule.clear();
        for (size_t i = 0; i < s.size(); ++i) {
            const std::string where = "schedule[" + std::to_string(i) + "]";
            check_keys(s[i], where, {"t", "mode"});
            if (!s[i].contains("t") || !s[i].contains("mode"))
                throw ValidationError(where, "entries need both 't' and 'mode'");
            ScheduleEntry e;
            e.switch_time = number(s[i]["t"], where + ".t");
            if (s[i]["mode"] == "inertial")
                e.mode = GuidanceMode::InertialHold;
            else if (s[i]["mode"] == "nadir")
                e.mode = GuidanceMode::NadirPointing;
            else
                throw ValidationError(where + ".mode", "expected \"inertial\" or \"nadir\"");
            c.schedule.push_back(e);
        }
    }

    if (doc.contains("initial")) {
        const json& s = doc["initial"];
        check_keys(s, "initial", {"sigma", "omega", "wheel_speeds"});
        if (s.contains("sigma")) {
            const VecX v = vector(s["sigma"], "initial.sigma");
            require_size(v.size(), 3, "initial.sigma");
            c.initial.sigma = Mrp(Vec3(v));
        }
        if (s.contains("omega")) {
            const VecX v = vector(s["omega"], "initial.omega");
            require_size(v.size(), 3, "initial.omega");
            c.initial.omega = v;
        }
        if (s.contains("wheel_speeds"))
            c.initial.wheel_speeds = vector(s["wheel_speeds"], "initial.wheel_speeds");
    }
    if (c.initial.wheel_speeds.size() != n && !(doc.contains("initial") && doc["initial"].contains("wheel_speeds")))
        c.initial.wheel_speeds = VecX::Zero(n);

    if (doc.contains("dt"))
        c.dt = number(doc["dt"], "dt");
    if (doc.contains("duration"))
        c.duration = number(doc["duration"], "duration");
    if (doc.contains("controller_decimation")) {
        if (!doc["controller_decimation"].is_number_integer())
            bad_type("controller_decimation", "an integer");
        c.controller_decimation = doc["controller_decimation"].get<int>();
    }
    if (doc.contains("mass"))
        c.mass = number(doc["mass"], "mass");
    if (doc.contains("output")) {
        if (!doc["output"].is_string())
            bad_type("output", "a path string");
        c.output = doc["output"].get<std::string>();
    }

    validate(c);
    return c;
}

ScenarioConfig load_config(const std::string& path_or_preset)
{
    for (const auto& p : presets()) {
        if (p.name == path_or_preset) {
            ScenarioConfig c = preset(p.name);
            validate(c);
            return c;
        }
    }
    std::ifstream in(path_or_preset);
    if (!in)
        throw IoError(path_or_preset, "cannot open scenario file (and no preset has this name)");
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad())
        throw IoError(path_or_preset, "read failed");
    return load_config_text(ss.str());
}

void validate_structure(const ScenarioConfig& c)
{
    const Eigen::Index n = c.rwa.g.cols();
    if (n < 1)
        throw ValidationError("rwa.g", "at least one wheel is required");
    if (!c.rwa.g.allFinite())
        throw ValidationError("rwa.g", "non-finite entries");
    require_size(c.phi_true.size(), n, "phi_true");
    require_size(c.theta_init.size(), n, "theta_init");
    require_size(c.initial.wheel_speeds.size(), n, "initial.wheel_speeds");
    if (c.gains.gamma.rows() != n || c.gains.gamma.cols() != n)
        throw ValidationError("gains.gamma", "dimension mismatch: expected " + std::to_string(n) + "x"
                                                 + std::to_string(n));
    if (c.gains.k1.rows() != n || c.gains.k1.cols() != n)
        throw ValidationError("gains.k1", "dimension mismatch: expected " + std::to_string(n) + "x"
                                              + std::to_string(n));
    require_positive(c.rwa.j_rw, "rwa.j_rw");
    require_positive(c.rwa.max_torque, "rwa.max_torque");
    require_positive(c.rwa.max_speed, "rwa.max_speed");
    require_spd(c.rwa.j_body, "rwa.j_body");
    require_positive(c.dt, "dt");
    if (!(c.duration >= 0.0) || !std::isfinite(c.duration))
        throw ValidationError("duration", "must be non-negative and finite");
    if (c.controller_decimation < 1)
        throw ValidationError("controller_decimation", "must be at least 1");
    require_positive(c.gains.delta_t, "gains.delta_t");
    if (c.gains.n_s < 1)
        throw ValidationError("gains.n_s", "must be a positive integer");
}

void validate(const ScenarioConfig& c)
{
    validate_structure(c);
    const Eigen::Index n = c.rwa.g.cols();

    for (Eigen::Index i = 0; i < n; ++i) {
        // Tabulated axes carry four significant digits, so unit length is
        // checked to that precision.
        if (std::abs(c.rwa.g.col(i).norm() - 1.0) > 1e-3)
            throw ValidationError("rwa.g", "column " + std::to_string(i + 1) + " is not a unit vector");
    }
    Eigen::JacobiSVD<MatX> svd(c.rwa.g);
    const VecX& sv = svd.singularValues();
    if (sv.size() < 3 || sv(2) <= 1e-10 * sv(0))
        throw ValidationError("rwa.g", "rank(G) < 3, the array cannot produce torque about every axis");

    for (Eigen::Index i = 0; i < n; ++i) {
        if (!(c.phi_true(i) >= 0.0 && c.phi_true(i) <= 1.0))
            throw ValidationError("phi_true", "health factors must lie in [0, 1]");
    }

    require_spd(c.gains.k, "gains.k");
    require_spd(c.gains.alpha, "gains.alpha");
    require_positive(c.gains.beta, "gains.beta");
    require_spd(c.gains.gamma, "gains.gamma");
    require_psd(c.gains.k1, "gains.k1");
    require_positive(c.gains.lambda_bar, "gains.lambda_bar");
    if (!(c.gains.theta_min >= 0.0 && c.gains.theta_min < c.gains.theta_max && c.gains.theta_max <= 1.0))
        throw ValidationError("gains.theta_bounds", "need 0 <= min < max <= 1");
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!(c.theta_init(i) >= c.gains.theta_min && c.theta_init(i) <= c.gains.theta_max))
            throw ValidationError("theta_init", "initial estimate outside theta_bounds");
    }

    if (!(c.orbit.radius > 6378137.0) || !std::isfinite(c.orbit.radius))
        throw ValidationError("orbit.radius", "must exceed the Earth radius");
    require_positive(c.orbit.mu, "orbit.mu");

    if (c.schedule.empty())
        throw ValidationError("schedule", "at least one entry is required");
    if (c.schedule.front().switch_time != 0.0)
        throw ValidationError("schedule", "first entry must start at t = 0");
    for (size_t i = 1; i < c.schedule.size(); ++i) {
        if (!(c.schedule[i].switch_time > c.schedule[i - 1].switch_time))
            throw ValidationError("schedule", "switch times must be strictly increasing");
    }
    if (c.duration < c.schedule.back().switch_time)
        throw ValidationError("duration", "shorter than the last schedule switch");

    if (!c.initial.sigma.vec().allFinite() || c.initial.sigma.norm() > 1.0)
        throw ValidationError("initial.sigma", "must be finite with norm <= 1");
    if (!c.initial.omega.allFinite())
        throw ValidationError("initial.omega", "non-finite entries");
}

std::string to_json(const ScenarioConfig& c)
{
    json doc;
    doc["name"] = c.name;
    doc["rwa"] = {
        {"g", matrix_json(c.rwa.g)},
        {"j_rw", c.rwa.j_rw},
        {"max_torque", c.rwa.max_torque},
        {"max_speed", c.rwa.max_speed},
        {"j_body", matrix_json(c.rwa.j_body)},
        {"wheel_torque_model",
         c.rwa.wheel_torque_model == WheelTorqueModel::Effective ? "effective" : "commanded"},
    };
    doc["phi_true"] = vector_json(c.phi_true);
    doc["gains"] = {
        {"k", matrix_json(c.gains.k)},
        {"alpha", matrix_json(c.gains.alpha)},
        {"beta", c.gains.beta},
        {"gamma", matrix_json(c.gains.gamma)},
        {"k1", matrix_json(c.gains.k1)},
        {"lambda_bar", c.gains.lambda_bar},
        {"n_s", c.gains.n_s},
        {"delta_t", c.gains.delta_t},
        {"theta_bounds", {c.gains.theta_min, c.gains.theta_max}},
    };
    doc["theta_init"] = vector_json(c.theta_init);
    doc["orbit"] = {
        {"radius", c.orbit.radius},
        {"mu", c.orbit.mu},
        {"raan", c.orbit.raan},
        {"inclination", c.orbit.inclination},
        {"arg_latitude_epoch", c.orbit.arg_latitude_epoch},
    };
    json sched = json::array();
    for (const auto& e : c.schedule)
        sched.push_back({{"t", e.switch_time}, {"mode", mode_name(e.mode)}});
    doc["schedule"] = sched;
    doc["initial"] = {
        {"sigma", vector_json(c.initial.sigma.vec())},
        {"omega", vector_json(c.initial.omega)},
        {"wheel_speeds", vector_json(c.initial.wheel_speeds)},
    };
    doc["dt"] = c.dt;
    doc["duration"] = c.duration;
    doc["controller_decimation"] = c.controller_decimation;
    doc["mass"] = c.mass;
    if (!c.output.empty())
        doc["output"] = c.output;
    return doc.dump(2);
}

} // namespace rwfault::scenario
