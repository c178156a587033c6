#include "rwfault/attitude_math.hpp"
#include "rwfault/guidance.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <cmath>

using namespace rwfault;
using rwfault::test::kPropertyInstances;
using rwfault::test::max_abs;

namespace {

OrbitConfig random_orbit()
{
    OrbitConfig o;
    o.raan = test::uniform(0.0, 2 * M_PI);
    o.inclination = test::uniform(0.0, M_PI);
    o.arg_latitude_epoch = test::uniform(0.0, 2 * M_PI);
    return o;
}

} // namespace

TEST_SUITE("guidance") {

TEST_CASE("mean motion of the default orbit")
{
    const OrbitConfig o;
    const double n = std::sqrt(3.986004418e14 / std::pow(6878.137e3, 3));
    CHECK(o.mean_motion() == doctest::Approx(n).epsilon(1e-15));
    CHECK(o.mean_motion() == doctest::Approx(1.10679e-3).epsilon(1e-5));
}

TEST_CASE("equatorial frame at epoch")
{
    Mat3 expected;
    // along-track = y, orbit normal = z, zenith = x
    expected << 0, 1, 0, 0, 0, 1, 1, 0, 0;
    CHECK(max_abs(guidance::orbital_frame(0.0, OrbitConfig{}) - expected) <= 1e-15);

    const OrbitConfig o;
    const double quarter = 0.5 * M_PI / o.mean_motion();
    Mat3 q;
    q << -1, 0, 0, 0, 0, 1, 0, 1, 0;
    CHECK(max_abs(guidance::orbital_frame(quarter, o) - q) <= 1e-12);
}

TEST_CASE("orbital frame is a rotation")
{
    for (int i = 0; i < kPropertyInstances; ++i) {
        const OrbitConfig o = random_orbit();
        const Mat3 c = guidance::orbital_frame(test::uniform(0.0, 6000.0), o);
        CHECK(max_abs(c * c.transpose() - Mat3::Identity()) <= 1e-12);
        CHECK(c.determinant() == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("frame rate agrees with finite differences")
{
    // C_dot = -[w x] C with w in orbital-frame components.
    const double h = 1e-2;
    for (int i = 0; i < kPropertyInstances; ++i) {
        const OrbitConfig o = random_orbit();
        const double t = test::uniform(0.0, 6000.0);
        const Mat3 c = guidance::orbital_frame(t, o);
        const Mat3 cdot = (guidance::orbital_frame(t + h, o) - guidance::orbital_frame(t - h, o)) / (2 * h);
        const Mat3 w = -cdot * c.transpose();
        const Vec3 fd(w(2, 1), w(0, 2), w(1, 0));
        CHECK((fd - guidance::orbital_rate(o)).norm() <= 1e-9);
        CHECK(guidance::orbital_rate(o).norm() == doctest::Approx(o.mean_motion()).epsilon(1e-15));
    }
    CHECK(guidance::orbital_rate(OrbitConfig{})(1) > 0.0);
}

TEST_CASE("schedule")
{
    const GuidanceSchedule s = guidance::alternating_schedule();
    REQUIRE(s.size() == 4);
    CHECK(guidance::mode_at(0.0, s) == GuidanceMode::InertialHold);
    CHECK(guidance::mode_at(100.0, s) == GuidanceMode::InertialHold);
    CHECK(guidance::mode_at(719.99, s) == GuidanceMode::InertialHold);
    CHECK(guidance::mode_at(720.0, s) == GuidanceMode::NadirPointing);
    CHECK(guidance::mode_at(800.0, s) == GuidanceMode::NadirPointing);
    CHECK(guidance::mode_at(1500.0, s) == GuidanceMode::InertialHold);
    CHECK(guidance::mode_at(2000.0, s) == GuidanceMode::NadirPointing);
    CHECK(guidance::mode_at(3000.0, s) == GuidanceMode::NadirPointing);
    CHECK(guidance::mode_at(5.0, {}) == GuidanceMode::InertialHold);
}

TEST_CASE("reference samples")
{
    const OrbitConfig o;
    const GuidanceSchedule s = guidance::alternating_schedule();
    const ReferenceSample hold = guidance::reference(100.0, s, o);
    CHECK(hold.sigma_d.norm() == 0.0);
    CHECK(hold.omega_d.norm() == 0.0);
    CHECK(hold.omega_d_dot.norm() == 0.0);

    const ReferenceSample nadir = guidance::reference(3000.0, s, o);
    CHECK(nadir.omega_d.norm() == doctest::Approx(o.mean_motion()));
    CHECK(nadir.omega_d_dot.norm() == 0.0);
    CHECK(nadir.sigma_d.norm() <= 1.0);
    CHECK(max_abs(attitude::mrp_to_dcm(nadir.sigma_d) - guidance::orbital_frame(3000.0, o)) <= 1e-12);
}

TEST_CASE("desired attitude is consistent with the desired rate")
{
    const GuidanceSchedule nadir_only = {{0.0, GuidanceMode::NadirPointing}};
    const double h = 1e-3;
    int checked = 0;
    for (int i = 0; i < kPropertyInstances; ++i) {
        const OrbitConfig o = random_orbit();
        const double t = test::uniform(0.0, 6000.0);
        const ReferenceSample a = guidance::reference(t - h, nadir_only, o);
        const ReferenceSample b = guidance::reference(t + h, nadir_only, o);
        if ((a.sigma_d.vec() - b.sigma_d.vec()).norm() > 0.1)
            continue; // straddles a shadow-set switch
        const ReferenceSample m = guidance::reference(t, nadir_only, o);
        const Vec3 fd = (b.sigma_d.vec() - a.sigma_d.vec()) / (2 * h);
        CHECK((fd - attitude::mrp_kinematics(m.sigma_d, m.omega_d)).norm() <= 1e-9);
        ++checked;
    }
    CHECK(checked >= 90);
}

}
