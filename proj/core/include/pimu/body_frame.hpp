#pragma once

#include "pimu/geometry.hpp"
#include "pimu/pose.hpp"

namespace pimu {

/// Right-handed orthonormal triad affixed to the torso, expressed in camera
/// coordinates. z points away from the torso plane (the facing direction),
/// y from the torso center toward the hip midpoint, x = y cross z.
struct body_frame {
    vec3 origin;
    vec3 x_axis;
    vec3 y_axis;
    vec3 z_axis;
};

/// Rotation angles about the camera axes: theta about x, phi about y,
/// psi about z, composed as R = Rz(psi) * Ry(phi) * Rx(theta).
/// theta and psi lie in (-pi, pi], phi in [-pi/2, pi/2].
struct euler_angles {
    double theta = 0.0;
    double phi = 0.0;
    double psi = 0.0;
    /// Set when |cos phi| fell below the lock threshold; theta was pinned
    /// to 0 and the unobservable residual folded into psi.
    bool gimbal_locked = false;
};

/// Cross products and midpoint distances at or below this are treated as
/// degenerate. Far below any plausible pose spread in keypoint units.
inline constexpr double epsilon_degenerate = 1e-8;

inline constexpr double gimbal_lock_cos_threshold = 1e-6;

/// Mean of the four torso joints (shoulders and hips).
/// Throws incomplete_torso_error if any of the four is absent or non-finite.
vec3 torso_center(const pose_frame& frame);

/// Unit vector perpendicular to the torso plane: the normalized average of
/// the two shoulder-hip difference cross products.
/// Throws degenerate_torso_error when the torso joints are (near-)collinear.
vec3 facing_direction(const pose_frame& frame);

/// Full torso frame. The hip-midpoint axis is re-orthogonalized against the
/// facing axis before the cross product so the triad is exactly orthonormal.
/// Throws incomplete_torso_error, coincident_midpoint_error,
/// degenerate_torso_error.
body_frame build_body_frame(const pose_frame& frame);

/// Rotation matrix with columns (x_axis, y_axis, z_axis).
mat3 rotation_of(const body_frame& bf);

/// Decomposes the frame's rotation as R = Rz(psi) * Ry(phi) * Rx(theta).
/// Throws non_orthonormal_frame_error if the triad invariants are violated
/// beyond 1e-6.
euler_angles euler_from_frame(const body_frame& bf);

mat3 rotation_from_euler(const euler_angles& a);

}  // namespace pimu
