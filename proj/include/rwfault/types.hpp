#pragma once

#include <Eigen/Dense>

namespace rwfault {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;
using Mat3X = Eigen::Matrix<double, 3, Eigen::Dynamic>;

/// Modified Rodrigues Parameters, sigma = tan(phi/4) * e.
class Mrp {
public:
    Mrp() : v_(Vec3::Zero()) {}
    explicit Mrp(const Vec3& v) : v_(v) {}
    Mrp(double x, double y, double z) : v_(x, y, z) {}

    const Vec3& vec() const { return v_; }
    double operator[](int i) const { return v_[i]; }
    double norm() const { return v_.norm(); }
    double squaredNorm() const { return v_.squaredNorm(); }

private:
    Vec3 v_;
};

} // namespace rwfault
