#pragma once

#include "rwfault/types.hpp"

/// MRP attitude algebra. All functions are pure and thread-safe.
///
/// DCM convention: mrp_to_dcm(sigma) maps inertial-frame coordinates into the
/// frame described by sigma, i.e. v_B = C(sigma) * v_N.
namespace rwfault::attitude {

/// Cross-product matrix: skew(a) * b == a.cross(b).
Mat3 skew(const Vec3& a);

/// B(sigma) = (1 - sigma'sigma) I + 2 [sigma x] + 2 sigma sigma'.
Mat3 b_matrix(const Mrp& sigma);

/// Analytic inverse of B, B' / (1 + sigma'sigma)^2.
Mat3 b_matrix_inverse(const Mrp& sigma);

/// Time derivative of B along sigma_dot.
Mat3 b_matrix_dot(const Mrp& sigma, const Vec3& sigma_dot);

/// sigma_dot = 1/4 B(sigma) omega.
Vec3 mrp_kinematics(const Mrp& sigma, const Vec3& omega);

/// Rotation between the desired and body frames built from the error MRP.
/// Maps desired-frame coordinates to body-frame coordinates.
Mat3 r_tilde(const Mrp& sigma_e);

Mat3 mrp_to_dcm(const Mrp& sigma);

/// Inverse of mrp_to_dcm. Throws ValidationError if `dcm` is not a proper
/// rotation to 1e-9. The result always lies in the unit ball.
Mrp dcm_to_mrp(const Mat3& dcm);

/// Attitude of the body relative to the desired frame, C(sigma_e) = C(sigma) C(sigma_d)'.
Mrp mrp_error(const Mrp& sigma, const Mrp& sigma_d);

/// Returns the shadow set -sigma/|sigma|^2 when |sigma| > 1.
Mrp shadow_if_needed(const Mrp& sigma);

} // namespace rwfault::attitude
