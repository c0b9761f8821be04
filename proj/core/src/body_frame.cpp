#include "pimu/body_frame.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace pimu {

namespace {

constexpr std::array<joint_id, 4> torso_joints = {
    joint_id::left_shoulder,
    joint_id::right_shoulder,
    joint_id::left_hip,
    joint_id::right_hip,
};

void require_torso(const pose_frame& frame) {
    for (const joint_id id : torso_joints) {
        if (!frame.has(id) || !frame.at(id).finite()) {
            throw incomplete_torso_error(std::string("torso joint unavailable: ") +
                                         std::string(joint_name(id)));
        }
    }
}

vec3 average_torso_cross(const pose_frame& frame) {
    const vec3 ls = frame.at(joint_id::left_shoulder);
    const vec3 rs = frame.at(joint_id::right_shoulder);
    const vec3 lh = frame.at(joint_id::left_hip);
    const vec3 rh = frame.at(joint_id::right_hip);

    const vec3 rsrh = rs - rh;
    const vec3 lsrh = ls - rh;
    const vec3 lslh = ls - lh;
    const vec3 rslh = rs - lh;

    const vec3 right_cross = lsrh.cross(rsrh);
    const vec3 left_cross = lslh.cross(rslh);
    return (right_cross + left_cross) * 0.5;
}

// Maps atan2's -pi output onto +pi so angles live in (-pi, pi].
double canonical_angle(double a) {
    if (a == -std::numbers::pi) return std::numbers::pi;
    return a;
}

}  // namespace

vec3 torso_center(const pose_frame& frame) {
    require_torso(frame);
    vec3 sum{};
    for (const joint_id id : torso_joints) sum += frame.at(id);
    return sum / 4.0;
}

vec3 facing_direction(const pose_frame& frame) {
    require_torso(frame);
    const vec3 avg = average_torso_cross(frame);
    const double n = avg.norm();
    if (n <= epsilon_degenerate) {
        throw degenerate_torso_error("torso joints are (near-)collinear");
    }
    return avg / n;
}

body_frame build_body_frame(const pose_frame& frame) {
    const vec3 origin = torso_center(frame);

    const vec3 midpoint =
        (frame.at(joint_id::left_hip) + frame.at(joint_id::right_hip)) * 0.5;
    const vec3 toward_hips = midpoint - origin;
    if (toward_hips.norm() <= epsilon_degenerate) {
        throw coincident_midpoint_error("hip midpoint coincides with torso center");
    }

    const vec3 z = facing_direction(frame);

    // Real pose noise bends the torso out of plane, so the hip-midpoint
    // direction is not guaranteed orthogonal to z. Project it into the
    // plane orthogonal to z; for planar torsos this is a no-op.
    vec3 y = toward_hips - z * toward_hips.dot(z);
    const double yn = y.norm();
    if (yn <= epsilon_degenerate) {
        throw coincident_midpoint_error("hip midpoint direction parallel to facing axis");
    }
    y = y / yn;

    const vec3 x = y.cross(z);

    return body_frame{origin, x, y, z};
}

mat3 rotation_of(const body_frame& bf) {
    return mat3::from_columns(bf.x_axis, bf.y_axis, bf.z_axis);
}

euler_angles euler_from_frame(const body_frame& bf) {
    constexpr double tol = 1e-6;
    const vec3& x = bf.x_axis;
    const vec3& y = bf.y_axis;
    const vec3& z = bf.z_axis;
    if (std::abs(x.norm() - 1.0) > tol || std::abs(y.norm() - 1.0) > tol ||
        std::abs(z.norm() - 1.0) > tol || std::abs(x.dot(y)) > tol ||
        std::abs(y.dot(z)) > tol || std::abs(x.dot(z)) > tol ||
        (x - y.cross(z)).norm() > tol) {
        throw non_orthonormal_frame_error("body frame axes are not a right-handed orthonormal triad");
    }

    const mat3 r = rotation_of(bf);

    const double sin_phi = std::clamp(-r(2, 0), -1.0, 1.0);
    const double phi = std::asin(sin_phi);
    const double cos_phi = std::cos(phi);

    euler_angles out;
    out.phi = phi;
    if (cos_phi < gimbal_lock_cos_threshold) {
        // x-rotation and z-rotation are indistinguishable here: pin theta
        // to 0 and fold the residual into psi.
        out.gimbal_locked = true;
        out.theta = 0.0;
        if (sin_phi > 0.0) {
            out.psi = canonical_angle(std::atan2(-r(0, 1), r(0, 2)));
        } else {
            out.psi = canonical_angle(std::atan2(-r(0, 1), -r(0, 2)));
        }
    } else {
        out.theta = canonical_angle(std::atan2(r(2, 1), r(2, 2)));
        out.psi = canonical_angle(std::atan2(r(1, 0), r(0, 0)));
    }
    return out;
}

mat3 rotation_from_euler(const euler_angles& a) {
    return mat3::rotation_z(a.psi) * mat3::rotation_y(a.phi) * mat3::rotation_x(a.theta);
}

}  // namespace pimu
