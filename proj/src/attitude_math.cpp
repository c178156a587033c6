#include "rwfault/attitude_math.hpp"

#include "rwfault/error.hpp"

#include <cmath>

namespace rwfault::attitude {

Mat3 skew(const Vec3& a)
{
    Mat3 m;
    m << 0.0, -a.z(), a.y(),
         a.z(), 0.0, -a.x(),
         -a.y(), a.x(), 0.0;
    return m;
}

Mat3 b_matrix(const Mrp& sigma)
{
    const Vec3& s = sigma.vec();
    return (1.0 - s.squaredNorm()) * Mat3::Identity() + 2.0 * skew(s) + 2.0 * s * s.transpose();
}

Mat3 b_matrix_inverse(const Mrp& sigma)
{
    const double d = 1.0 + sigma.squaredNorm();
    return b_matrix(sigma).transpose() / (d * d);
}

Mat3 b_matrix_dot(const Mrp& sigma, const Vec3& sigma_dot)
{
    const Vec3& s = sigma.vec();
    return -2.0 * s.dot(sigma_dot) * Mat3::Identity() + 2.0 * skew(sigma_dot)
        + 2.0 * (sigma_dot * s.transpose() + s * sigma_dot.transpose());
}

Vec3 mrp_kinematics(const Mrp& sigma, const Vec3& omega)
{
    return 0.25 * b_matrix(sigma) * omega;
}

Mat3 r_tilde(const Mrp& sigma_e)
{
    const Vec3& s = sigma_e.vec();
    const double s2 = s.squaredNorm();
    const Mat3 sx = skew(s);
    const double d = 1.0 + s2;
    return Mat3::Identity() + (8.0 * sx * sx - 4.0 * (1.0 - s2) * sx) / (d * d);
}

Mat3 mrp_to_dcm(const Mrp& sigma)
{
    // Quaternion route: independent of the r_tilde expression above.
    const Vec3& s = sigma.vec();
    const double s2 = s.squaredNorm();
    const double d = 1.0 + s2;
    const double q0 = (1.0 - s2) / d;
    const Vec3 q = 2.0 * s / d;
    Mat3 c;
    c(0, 0) = q0 * q0 + q.x() * q.x() - q.y() * q.y() - q.z() * q.z();
    c(0, 1) = 2.0 * (q.x() * q.y() + q0 * q.z());
    c(0, 2) = 2.0 * (q.x() * q.z() - q0 * q.y());
    c(1, 0) = 2.0 * (q.x() * q.y() - q0 * q.z());
    c(1, 1) = q0 * q0 - q.x() * q.x() + q.y() * q.y() - q.z() * q.z();
    c(1, 2) = 2.0 * (q.y() * q.z() + q0 * q.x());
    c(2, 0) = 2.0 * (q.x() * q.z() + q0 * q.y());
    c(2, 1) = 2.0 * (q.y() * q.z() - q0 * q.x());
    c(2, 2) = q0 * q0 - q.x() * q.x() - q.y() * q.y() + q.z() * q.z();
    return c;
}

Mrp dcm_to_mrp(const Mat3& dcm)
{
    if (!dcm.allFinite())
        throw ValidationError("dcm", "non-finite entries");
    const double orth = (dcm.transpose() * dcm - Mat3::Identity()).cwiseAbs().maxCoeff();
    const double det = dcm.determinant();
    if (orth > 1e-9 || std::abs(det - 1.0) > 1e-9)
        throw ValidationError("dcm", "not a proper rotation matrix");

    // Sheppard's method: pick the largest quaternion component for stability.
    const double tr = dcm.trace();
    const double b0 = 0.25 * (1.0 + tr);
    const double b1 = 0.25 * (1.0 + 2.0 * dcm(0, 0) - tr);
    const double b2 = 0.25 * (1.0 + 2.0 * dcm(1, 1) - tr);
    const double b3 = 0.25 * (1.0 + 2.0 * dcm(2, 2) - tr);
    double q0, q1, q2, q3;
    if (b0 >= b1 && b0 >= b2 && b0 >= b3) {
        q0 = std::sqrt(b0);
        q1 = (dcm(1, 2) - dcm(2, 1)) / (4.0 * q0);
        q2 = (dcm(2, 0) - dcm(0, 2)) / (4.0 * q0);
        q3 = (dcm(0, 1) - dcm(1, 0)) / (4.0 * q0);
    } else if (b1 >= b2 && b1 >= b3) {
        q1 = std::sqrt(b1);
        q0 = (dcm(1, 2) - dcm(2, 1)) / (4.0 * q1);
        q2 = (dcm(0, 1) + dcm(1, 0)) / (4.0 * q1);
        q3 = (dcm(2, 0) + dcm(0, 2)) / (4.0 * q1);
    } else if (b2 >= b3) {
        q2 = std::sqrt(b2);
        q0 = (dcm(2, 0) - dcm(0, 2)) / (4.0 * q2);
        q1 = (dcm(0, 1) + dcm(1, 0)) / (4.0 * q2);
        q3 = (dcm(1, 2) + dcm(2, 1)) / (4.0 * q2);
    } else {
        q3 = std::sqrt(b3);
        q0 = (dcm(0, 1) - dcm(1, 0)) / (4.0 * q3);
        q1 = (dcm(2, 0) + dcm(0, 2)) / (4.0 * q3);
        q2 = (dcm(1, 2) + dcm(2, 1)) / (4.0 * q3);
    }
    // Short-rotation quaternion (q0 >= 0) yields |sigma| <= 1.
    if (q0 < 0.0) {
        q0 = -q0;
        q1 = -q1;
        q2 = -q2;
        q3 = -q3;
    }
    return Mrp(Vec3(q1, q2, q3) / (1.0 + q0));
}

Mrp mrp_error(const Mrp& sigma, const Mrp& sigma_d)
{
    return dcm_to_mrp(mrp_to_dcm(sigma) * mrp_to_dcm(sigma_d).transpose());
}

Mrp shadow_if_needed(const Mrp& sigma)
{
    const double s2 = sigma.squaredNorm();
    if (s2 > 1.0)
        return Mrp(-sigma.vec() / s2);
    return sigma;
}

} // namespace rwfault::attitude
