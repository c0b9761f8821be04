#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "pimu/error.hpp"
#include "pimu/geometry.hpp"

namespace pimu {

/// The twelve tracked joints, in the canonical order used everywhere:
/// serialization, feature layout, and model files all follow this order.
enum class joint_id : std::uint8_t {
    left_shoulder = 0,
    right_shoulder,
    left_elbow,
    right_elbow,
    left_wrist,
    right_wrist,
    left_hip,
    right_hip,
    left_knee,
    right_knee,
    left_ankle,
    right_ankle,
};

inline constexpr std::size_t joint_count = 12;

std::string_view joint_name(joint_id id);
std::optional<joint_id> joint_from_name(std::string_view name);

/// Mirror-image counterpart (left_shoulder <-> right_shoulder, ...).
joint_id mirrored_joint(joint_id id);

/// One timestamped set of 3D joint positions in camera coordinates.
/// Positions are up-to-scale: consistent within a sequence, not metric.
struct pose_frame {
    double t = 0.0;
    std::array<vec3, joint_count> position{};
    std::array<bool, joint_count> present{};

    bool has(joint_id id) const { return present[static_cast<std::size_t>(id)]; }
    const vec3& at(joint_id id) const { return position[static_cast<std::size_t>(id)]; }
    void set(joint_id id, const vec3& p) {
        position[static_cast<std::size_t>(id)] = p;
        present[static_cast<std::size_t>(id)] = true;
    }
    void clear(joint_id id) { present[static_cast<std::size_t>(id)] = false; }
};

struct validation_result {
    std::vector<joint_id> missing;
    std::vector<joint_id> nonfinite;

    bool complete() const { return missing.empty() && nonfinite.empty(); }
};

/// Total function: never throws, reports which joints are absent or non-finite.
validation_result validate_frame(const pose_frame& frame);

bool frame_complete(const pose_frame& frame);

/// Re-expresses every joint relative to the left hip (which maps to the
/// zero vector). Removes camera translation from downstream differences.
/// Throws incomplete_frame_error unless the frame is complete.
pose_frame relative_to_left_hip(const pose_frame& frame);

struct pose_sequence {
    std::vector<pose_frame> frames;
    double nominal_dt = 0.0;
};

inline constexpr std::size_t default_max_gap = 2;

/// Allowed deviation of consecutive timestamps from the nominal interval,
/// as a fraction of that interval. The difference stencil assumes a uniform
/// grid; beyond this we refuse rather than silently degrade.
inline constexpr double dt_jitter_tolerance = 0.1;

/// Fills runs of at most max_gap consecutive incomplete frames that are
/// bounded on both sides by complete frames, interpolating each absent or
/// non-finite joint linearly in time. Longer runs (and runs touching either
/// end of the sequence) are left incomplete. Idempotent.
pose_sequence interpolate_gaps(const pose_sequence& seq, std::size_t max_gap = default_max_gap);

/// Fills f's absent or non-finite joints by interpolating linearly in time
/// between the two bounding complete frames. Measured joints are kept.
void fill_missing_joints(pose_frame& f, const pose_frame& before, const pose_frame& after);

}  // namespace pimu
