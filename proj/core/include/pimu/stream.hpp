#pragma once

#include <deque>
#include <vector>

#include "pimu/detector.hpp"
#include "pimu/features.hpp"
#include "pimu/pose.hpp"
#include "pimu/tsf.hpp"

namespace pimu {

struct stream_config {
    std::size_t stride = 1;               // frames between predictions
    std::size_t max_gap = default_max_gap;  // lookahead for gap interpolation
    feature_options features{};
};

struct stream_prediction {
    std::size_t index = 0;  // 0-based prediction index
    prediction pred{};
    double t = 0.0;          // timestamp of the window's last frame
    double elapsed_ms = 0.0; // feature extraction + classification time
};

struct stream_output {
    std::vector<stream_prediction> predictions;
    std::vector<transition_event> events;
};

/// Online pipeline: rolling pose window -> features -> classifier ->
/// transition detector. Memory stays O(window length + max_gap + G)
/// regardless of stream length.
///
/// Small dropouts (runs of incomplete frames up to max_gap) are repaired by
/// linear interpolation once the next complete frame arrives, which delays
/// those predictions by the gap length. Longer dropouts pass through
/// unrepaired and the windows covering them are skipped.
class stream_driver {
public:
    stream_driver(const classifier& model, const feature_layout& layout,
                  stream_config cfg = {}, detector_config detector_cfg = {});

    stream_output push_frame(const pose_frame& frame);

    /// Flushes any frames still waiting for a gap boundary.
    stream_output finish();

    std::size_t window_length() const { return window_length_; }
    std::size_t buffered_frames() const { return window_.size(); }
    std::size_t pending_frames() const { return pending_.size(); }
    std::size_t predictions_made() const { return predictions_made_; }
    std::size_t windows_skipped() const { return windows_skipped_; }
    const transition_detector& detector() const { return detector_; }

private:
    void process(const pose_frame& frame, stream_output& out);

    const classifier& model_;
    feature_layout layout_;
    stream_config cfg_;
    std::size_t window_length_;

    std::deque<pose_frame> window_;
    std::size_t incomplete_in_window_ = 0;
    std::vector<pose_frame> scratch_;

    std::vector<pose_frame> pending_;
    bool have_last_complete_ = false;
    bool in_long_gap_ = false;
    pose_frame last_complete_{};

    std::size_t frames_processed_ = 0;
    std::size_t predictions_made_ = 0;
    std::size_t windows_skipped_ = 0;
    transition_detector detector_;
};

}  // namespace pimu
