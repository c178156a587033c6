#include "rwfault/telemetry.hpp"

#include "rwfault/error.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace rwfault::telemetry {

namespace {

void append(std::string& out, double v)
{
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    out.append(buf, res.ptr);
}

void append_vec(std::string& out, const Eigen::Ref<const VecX>& v)
{
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        out.push_back(',');
        append(out, v(i));
    }
}

std::vector<std::string_view> split(std::string_view line)
{
    std::vector<std::string_view> cells;
    size_t start = 0;
    while (true) {
        const size_t comma = line.find(',', start);
        cells.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
        if (comma == std::string_view::npos)
            break;
        start = comma + 1;
    }
    return cells;
}

double to_double(std::string_view cell, size_t line_no)
{
    double v = 0.0;
    const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (res.ec != std::errc() || res.ptr != cell.data() + cell.size())
        throw ParseError("telemetry line " + std::to_string(line_no) + ": bad number '" + std::string(cell) + "'");
    return v;
}

} // namespace

std::vector<std::string> csv_header(int n)
{
    std::vector<std::string> h{"t"};
    auto add = [&](const std::string& base, int count) {
        for (int i = 1; i <= count; ++i)
            h.push_back(base + "_" + std::to_string(i));
    };
    add("sigma_e", 3);
    add("r", 3);
    add("omega", 3);
    add("wheel_speed", n);
    add("u_commanded", n);
    add("u_effective", n);
    add("theta_hat", n);
    h.insert(h.end(), {"lambda_min", "fe_flag", "lyapunov_v"});
    return h;
}

std::string to_csv(const Telemetry& tel)
{
    std::string out;
    const auto header = csv_header(tel.n_wheels);
    for (size_t i = 0; i < header.size(); ++i) {
        if (i)
            out.push_back(',');
        out += header[i];
    }
    out.push_back('\n');
    for (const auto& rec : tel.records) {
        append(out, rec.t);
        append_vec(out, rec.sigma_e);
        append_vec(out, rec.r);
        append_vec(out, rec.omega);
        append_vec(out, rec.wheel_speeds);
        append_vec(out, rec.u_commanded);
        append_vec(out, rec.u_effective);
        append_vec(out, rec.theta_hat);
        out.push_back(',');
        append(out, rec.lambda_min);
        out += rec.fe_flag ? ",1," : ",0,";
        append(out, rec.lyapunov_v);
        out.push_back('\n');
    }
    return out;
}

void write_csv(const Telemetry& tel, const std::string& path)
{
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f)
        throw IoError(path, "cannot open for writing");
    const std::string text = to_csv(tel);
    f.write(text.data(), static_cast<std::streamsize>(text.size()));
    f.flush();
    if (!f)
        throw IoError(path, "write failed");
}

Telemetry parse_csv(const std::string& text)
{
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line))
        throw ParseError("telemetry: missing header row");
    if (!line.empty() && line.back() == '\r')
        line.pop_back();
    const auto header = split(line);
    // 3 scalars + 3 three-vectors + 1 leading time column, the rest is 4 * N.
    const long wheel_cols = static_cast<long>(header.size()) - 13;
    if (wheel_cols < 4 || wheel_cols % 4 != 0)
        throw ParseError("telemetry: unexpected column count " + std::to_string(header.size()));

    Telemetry tel;
    tel.n_wheels = static_cast<int>(wheel_cols / 4);
    const auto expected = csv_header(tel.n_wheels);
    for (size_t i = 0; i < expected.size(); ++i) {
        if (header[i] != expected[i])
            throw ParseError("telemetry: header column " + std::to_string(i + 1) + " is '"
                             + std::string(header[i]) + "', expected '" + expected[i] + "'");
    }

    const int n = tel.n_wheels;
    size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        const auto cells = split(line);
        if (cells.size() != expected.size())
            throw ParseError("telemetry line " + std::to_string(line_no) + ": expected "
                             + std::to_string(expected.size()) + " columns, got " + std::to_string(cells.size()));
        size_t c = 0;
        auto next = [&] { return to_double(cells[c++], line_no); };
        auto read_vec = [&](Eigen::Index len) {
            VecX v(len);
            for (Eigen::Index i = 0; i < len; ++i)
                v(i) = next();
            return v;
        };
        TelemetryRecord rec;
        rec.t = next();
        rec.sigma_e = read_vec(3);
        rec.r = read_vec(3);
        rec.omega = read_vec(3);
        rec.wheel_speeds = read_vec(n);
        rec.u_commanded = read_vec(n);
        rec.u_effective = read_vec(n);
        rec.theta_hat = read_vec(n);
        rec.lambda_min = next();
        rec.fe_flag = next() != 0.0;
        rec.lyapunov_v = next();
        tel.records.push_back(std::move(rec));
    }
    return tel;
}

Telemetry read_csv(const std::string& path)
{
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw IoError(path, "cannot open for reading");
    std::ostringstream ss;
    ss << f.rdbuf();
    if (f.bad())
        throw IoError(path, "read failed");
    try {
        return parse_csv(ss.str());
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

} // namespace rwfault::telemetry
