#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "pimu/features.hpp"
#include "pimu/labels.hpp"
#include "pimu/pose.hpp"
#include "pimu/tsf.hpp"

namespace pimu {

/// Body orientation held through a simulated dive segment.
enum class pose_class : std::uint8_t {
    prone_down = 0,
    prone_up = 1,
    inverted = 2,
    upright = 3,
};

std::string_view pose_class_name(pose_class p);
std::optional<pose_class> pose_class_from_name(std::string_view name);

struct synth_params {
    pose_class pose = pose_class::prone_down;
    double swim_amp = 0.3;      // kick displacement, keypoint units
    double swim_freq = 1.0;     // Hz
    double jitter_sigma = 0.01; // per-joint Gaussian noise, keypoint units
    double sink_rate = 0.1;     // post-stop drift along gravity, units/s
    double fps = 10.0;
    std::uint64_t seed = 0;

    void validate() const;
};

struct labeled_sequence {
    pose_sequence sequence;
    std::vector<swim_label> labels;  // one per frame
    std::optional<std::size_t> transition_index;  // first not_swimming frame
};

/// Deterministic articulated 12-joint diver: fixed limb proportions, a swim
/// phase where ankles/knees kick sinusoidally (left/right antiphase, wrists
/// at half amplitude), then a stop phase where all self-motion freezes and
/// the whole body drifts along gravity at sink_rate. Per-joint Gaussian
/// jitter is added every frame. Identical (params, seed) pairs produce
/// bitwise-identical sequences.
labeled_sequence generate_sequence(const synth_params& params, double swim_secs,
                                   double stop_secs);

/// Adds path(t_i) to every joint of frame i; labels unchanged. Left-hip
/// normalization must cancel this exactly, which is what tests assert.
labeled_sequence inject_camera_motion(const labeled_sequence& seq,
                                      const std::function<vec3(double)>& path);

/// Parameter grid the corpus builder cycles through.
struct dataset_grid {
    std::vector<pose_class> poses = {pose_class::prone_down, pose_class::prone_up,
                                     pose_class::inverted, pose_class::upright};
    std::vector<double> amplitudes = {0.3, 0.45};
    std::vector<double> frequencies = {0.5, 1.0, 1.5};  // flutter-kick cadence
    double jitter_sigma = 0.01;
    double sink_rate = 0.1;
    double fps = 10.0;
    feature_mode mode = feature_mode::combined;
    std::size_t window_len = 52;
};

/// Balanced labeled feature windows: windows_per_class of each label, cycled
/// across the grid, deterministic in (grid, seed).
std::vector<labeled_window> generate_dataset(const dataset_grid& grid,
                                             std::size_t windows_per_class,
                                             std::uint64_t seed);

}  // namespace pimu
