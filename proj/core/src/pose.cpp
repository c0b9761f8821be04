#include "pimu/pose.hpp"

#include <algorithm>

namespace pimu {

namespace {

constexpr std::array<std::string_view, joint_count> joint_names = {
    "left_shoulder", "right_shoulder", "left_elbow", "right_elbow",
    "left_wrist",    "right_wrist",    "left_hip",   "right_hip",
    "left_knee",     "right_knee",     "left_ankle", "right_ankle",
};

}  // namespace

std::string_view joint_name(joint_id id) {
    return joint_names[static_cast<std::size_t>(id)];
}

std::optional<joint_id> joint_from_name(std::string_view name) {
    for (std::size_t i = 0; i < joint_count; ++i) {
        if (joint_names[i] == name) return static_cast<joint_id>(i);
    }
    return std::nullopt;
}

joint_id mirrored_joint(joint_id id) {
    const auto i = static_cast<std::size_t>(id);
    // Joints come in left/right pairs at even/odd indices.
    return static_cast<joint_id>(i % 2 == 0 ? i + 1 : i - 1);
}

validation_result validate_frame(const pose_frame& frame) {
    validation_result result;
    for (std::size_t i = 0; i < joint_count; ++i) {
        const auto id = static_cast<joint_id>(i);
        if (!frame.present[i]) {
            result.missing.push_back(id);
        } else if (!frame.position[i].finite()) {
            result.nonfinite.push_back(id);
        }
    }
    return result;
}

bool frame_complete(const pose_frame& frame) {
    return validate_frame(frame).complete();
}

pose_frame relative_to_left_hip(const pose_frame& frame) {
    if (!frame_complete(frame)) {
        throw incomplete_frame_error("relative_to_left_hip: frame is not complete");
    }
    pose_frame out = frame;
    const vec3 origin = frame.at(joint_id::left_hip);
    for (auto& p : out.position) p -= origin;
    return out;
}

namespace {

bool joint_usable(const pose_frame& frame, std::size_t j) {
    return frame.present[j] && frame.position[j].finite();
}

}  // namespace

pose_sequence interpolate_gaps(const pose_sequence& seq, std::size_t max_gap) {
    pose_sequence out = seq;
    const std::size_t n = out.frames.size();

    std::vector<bool> complete(n);
    for (std::size_t i = 0; i < n; ++i) complete[i] = frame_complete(out.frames[i]);

    std::size_t i = 0;
    while (i < n) {
        if (complete[i]) {
            ++i;
            continue;
        }
        const std::size_t run_begin = i;
        while (i < n && !complete[i]) ++i;
        const std::size_t run_end = i;  // one past the run

        const bool bounded = run_begin > 0 && run_end < n;
        if (!bounded || run_end - run_begin > max_gap) continue;

        const pose_frame& lo = out.frames[run_begin - 1];
        const pose_frame& hi = out.frames[run_end];
        for (std::size_t k = run_begin; k < run_end; ++k) {
            fill_missing_joints(out.frames[k], lo, hi);
            complete[k] = true;
        }
    }
    return out;
}

void fill_missing_joints(pose_frame& f, const pose_frame& before, const pose_frame& after) {
    const double a = (f.t - before.t) / (after.t - before.t);
    for (std::size_t j = 0; j < joint_count; ++j) {
        if (joint_usable(f, j)) continue;  // keep measured values
        f.position[j] = before.position[j] + (after.position[j] - before.position[j]) * a;
        f.present[j] = true;
    }
}

}  // namespace pimu
