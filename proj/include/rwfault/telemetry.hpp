#pragma once

#include "rwfault/types.hpp"

#include <string>
#include <vector>

namespace rwfault {

/// One row of closed-loop telemetry, sampled at the start of each plant step.
struct TelemetryRecord {
    double t = 0.0;
    Vec3 sigma_e = Vec3::Zero();
    Vec3 r = Vec3::Zero();
    Vec3 omega = Vec3::Zero();
    VecX wheel_speeds;
    VecX u_commanded;   ///< allocator output before the torque clamp
    VecX u_effective;   ///< torque the wheels actually deliver, Phi * clamp(u)
    VecX theta_hat;
    double lambda_min = 0.0;
    bool fe_flag = false;
    double lyapunov_v = 0.0;

    bool operator==(const TelemetryRecord&) const = default;
};

struct Telemetry {
    int n_wheels = 0;
    std::vector<TelemetryRecord> records;
};

namespace telemetry {

std::vector<std::string> csv_header(int n_wheels);

/// Writes the header and one row per record. Doubles use the shortest
/// representation that round-trips exactly.
void write_csv(const Telemetry& telemetry, const std::string& path);
std::string to_csv(const Telemetry& telemetry);

/// Inverse of write_csv. Throws IoError or ParseError.
Telemetry read_csv(const std::string& path);
Telemetry parse_csv(const std::string& text);

} // namespace telemetry
} // namespace rwfault
