#include "pimu/synth.hpp"

#include <cmath>
#include <numbers>

#include "pimu/rng.hpp"

namespace pimu {

namespace {

// Canonical skeleton in body-local coordinates: y up, shoulders at +0.3,
// hips at -0.3, facing -z. Proportions only need internal consistency;
// keypoints are up-to-scale anyway.
constexpr double shoulder_half_width = 0.2;
constexpr double torso_half_height = 0.3;
constexpr double limb_segment = 0.3;

std::array<vec3, joint_count> base_skeleton() {
    std::array<vec3, joint_count> p{};
    auto set = [&p](joint_id id, const vec3& v) { p[static_cast<std::size_t>(id)] = v; };

    const vec3 ls{-shoulder_half_width, torso_half_height, 0.0};
    const vec3 rs{shoulder_half_width, torso_half_height, 0.0};
    const vec3 lh{-shoulder_half_width, -torso_half_height, 0.0};
    const vec3 rh{shoulder_half_width, -torso_half_height, 0.0};

    const vec3 arm_seg = vec3{0.0, -1.0, -0.2}.normalized() * limb_segment;
    const vec3 leg_seg = vec3{0.0, -1.0, 0.15}.normalized() * limb_segment;

    set(joint_id::left_shoulder, ls);
    set(joint_id::right_shoulder, rs);
    set(joint_id::left_elbow, ls + arm_seg);
    set(joint_id::right_elbow, rs + arm_seg);
    set(joint_id::left_wrist, ls + arm_seg + arm_seg);
    set(joint_id::right_wrist, rs + arm_seg + arm_seg);
    set(joint_id::left_hip, lh);
    set(joint_id::right_hip, rh);
    set(joint_id::left_knee, lh + leg_seg);
    set(joint_id::right_knee, rh + leg_seg);
    set(joint_id::left_ankle, lh + leg_seg + leg_seg);
    set(joint_id::right_ankle, rh + leg_seg + leg_seg);
    return p;
}

mat3 pose_rotation(pose_class pose) {
    const double half_pi = std::numbers::pi / 2.0;
    switch (pose) {
        case pose_class::prone_down: return mat3::rotation_x(-half_pi);
        case pose_class::prone_up: return mat3::rotation_x(half_pi);
        case pose_class::inverted: return mat3::rotation_z(std::numbers::pi);
        case pose_class::upright: return mat3::identity();
    }
    return mat3::identity();
}

constexpr vec3 gravity_dir{0.0, -1.0, 0.0};
constexpr vec3 scene_offset{0.0, 0.0, 4.0};

// Kick amplitude multiplier per joint; displacement runs along the
// body-local z axis (perpendicular to the torso plane).
double kick_gain(joint_id id) {
    switch (id) {
        case joint_id::left_ankle:
        case joint_id::right_ankle:
        case joint_id::left_knee:
        case joint_id::right_knee:
            return 1.0;
        case joint_id::left_wrist:
        case joint_id::right_wrist:
            return 0.5;
        default:
            return 0.0;
    }
}

bool right_side(joint_id id) {
    return static_cast<std::size_t>(id) % 2 == 1;
}

}  // namespace

std::string_view pose_class_name(pose_class p) {
    switch (p) {
        case pose_class::prone_down: return "prone_down";
        case pose_class::prone_up: return "prone_up";
        case pose_class::inverted: return "inverted";
        case pose_class::upright: return "upright";
    }
    return "?";
}

std::optional<pose_class> pose_class_from_name(std::string_view name) {
    for (const pose_class p : {pose_class::prone_down, pose_class::prone_up,
                               pose_class::inverted, pose_class::upright}) {
        if (pose_class_name(p) == name) return p;
    }
    return std::nullopt;
}

void synth_params::validate() const {
    if (!(swim_amp >= 0.0) || !(swim_freq > 0.0) || !(jitter_sigma >= 0.0) || !(fps > 0.0)) {
        throw error("synth params require swim_amp >= 0, swim_freq > 0, jitter_sigma >= 0, fps > 0");
    }
    if (!std::isfinite(sink_rate)) throw error("synth sink_rate must be finite");
}

labeled_sequence generate_sequence(const synth_params& params, double swim_secs,
                                   double stop_secs) {
    params.validate();
    if (!(swim_secs > 0.0) || !(stop_secs > 0.0)) {
        throw error("generate_sequence requires positive phase durations");
    }

    const auto n_frames = static_cast<std::size_t>(std::llround((swim_secs + stop_secs) * params.fps));
    const auto transition = static_cast<std::size_t>(std::llround(swim_secs * params.fps));
    const double t_stop = static_cast<double>(transition) / params.fps;
    const double omega = 2.0 * std::numbers::pi * params.swim_freq;

    const auto base = base_skeleton();
    const mat3 orientation = pose_rotation(params.pose);
    rng noise(splitmix64(params.seed));

    labeled_sequence out;
    out.sequence.nominal_dt = 1.0 / params.fps;
    out.sequence.frames.reserve(n_frames);
    out.labels.reserve(n_frames);
    out.transition_index = transition;

    for (std::size_t k = 0; k < n_frames; ++k) {
        const double t = static_cast<double>(k) / params.fps;
        const bool stopped = k >= transition;
        // Freeze the kick phase at the stop instant so positions stay
        // continuous while all self-motion ceases.
        const double kick_t = stopped ? t_stop : t;
        const vec3 sink = stopped ? gravity_dir * (params.sink_rate * (t - t_stop)) : vec3{};

        pose_frame frame;
        frame.t = t;
        for (std::size_t j = 0; j < joint_count; ++j) {
            const auto id = static_cast<joint_id>(j);
            vec3 local = base[j];
            const double gain = kick_gain(id);
            if (gain != 0.0) {
                const double phase = right_side(id) ? std::numbers::pi : 0.0;
                local.z += gain * params.swim_amp * std::sin(omega * kick_t + phase);
            }
            vec3 p = orientation * local + scene_offset + sink;
            if (params.jitter_sigma > 0.0) p += noise.gaussian_vec3(params.jitter_sigma);
            frame.set(id, p);
        }
        out.sequence.frames.push_back(frame);
        out.labels.push_back(stopped ? swim_label::not_swimming : swim_label::swimming);
    }
    return out;
}

labeled_sequence inject_camera_motion(const labeled_sequence& seq,
                                      const std::function<vec3(double)>& path) {
    labeled_sequence out = seq;
    for (pose_frame& frame : out.sequence.frames) {
        const vec3 offset = path(frame.t);
        if (!offset.finite()) throw error("camera path produced a non-finite offset");
        for (std::size_t j = 0; j < joint_count; ++j) {
            if (frame.present[j]) frame.position[j] += offset;
        }
    }
    return out;
}

std::vector<labeled_window> generate_dataset(const dataset_grid& grid,
                                             std::size_t windows_per_class,
                                             std::uint64_t seed) {
    if (windows_per_class == 0) {
        throw degenerate_dataset_error("generate_dataset needs windows for both classes");
    }
    if (grid.poses.empty() || grid.amplitudes.empty() || grid.frequencies.empty()) {
        throw error("dataset grid must not be empty");
    }

    const std::size_t len = grid.window_len;
    // A couple of spare frames per phase so both windows fit strictly inside
    // their phase.
    const double phase_secs = static_cast<double>(len + 4) / grid.fps;

    std::vector<labeled_window> out;
    out.reserve(2 * windows_per_class);

    std::size_t combo = 0;
    const std::size_t n_combos =
        grid.poses.size() * grid.amplitudes.size() * grid.frequencies.size();
    for (std::size_t w = 0; w < windows_per_class; ++w, combo = (combo + 1) % n_combos) {
        std::size_t ix = combo;
        const pose_class pose = grid.poses[ix % grid.poses.size()];
        ix /= grid.poses.size();
        const double amp = grid.amplitudes[ix % grid.amplitudes.size()];
        ix /= grid.amplitudes.size();
        const double freq = grid.frequencies[ix % grid.frequencies.size()];

        synth_params params;
        params.pose = pose;
        params.swim_amp = amp;
        params.swim_freq = freq;
        params.jitter_sigma = grid.jitter_sigma;
        params.sink_rate = grid.sink_rate;
        params.fps = grid.fps;
        params.seed = splitmix64(seed + 0x51ed270b * (w + 1));

        const labeled_sequence seq = generate_sequence(params, phase_secs, phase_secs);
        const std::size_t transition = *seq.transition_index;

        const auto frames = std::span<const pose_frame>(seq.sequence.frames);
        labeled_window swim;
        swim.features = extract_features(frames.subspan(0, len), grid.mode);
        swim.label = swim_label::swimming;
        out.push_back(std::move(swim));

        labeled_window stop;
        stop.features = extract_features(frames.subspan(transition, len), grid.mode);
        stop.label = swim_label::not_swimming;
        out.push_back(std::move(stop));
    }
    return out;
}

}  // namespace pimu
