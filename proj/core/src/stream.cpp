#include "pimu/stream.hpp"

#include <chrono>

namespace pimu {

stream_driver::stream_driver(const classifier& model, const feature_layout& layout,
                             stream_config cfg, detector_config detector_cfg)
    : model_(model),
      layout_(layout),
      cfg_(cfg),
      window_length_(layout.rows + 2),
      detector_(detector_cfg) {
    if (layout.rows == 0) throw error("stream driver needs a layout with at least one row");
    if (cfg_.stride == 0) throw error("stream stride must be >= 1");
}

stream_output stream_driver::push_frame(const pose_frame& frame) {
    stream_output out;
    const bool complete = frame_complete(frame);

    if (complete) {
        if (!pending_.empty()) {
            if (have_last_complete_ && pending_.size() <= cfg_.max_gap) {
                for (pose_frame& f : pending_) fill_missing_joints(f, last_complete_, frame);
            }
            for (const pose_frame& f : pending_) process(f, out);
            pending_.clear();
        }
        process(frame, out);
        last_complete_ = frame;
        have_last_complete_ = true;
        in_long_gap_ = false;
        return out;
    }

    if (in_long_gap_) {
        process(frame, out);  // already unrepairable
        return out;
    }
    pending_.push_back(frame);
    if (pending_.size() > cfg_.max_gap) {
        for (const pose_frame& f : pending_) process(f, out);
        pending_.clear();
        in_long_gap_ = true;
    }
    return out;
}

stream_output stream_driver::finish() {
    stream_output out;
    for (const pose_frame& f : pending_) process(f, out);  // no right boundary
    pending_.clear();
    return out;
}

void stream_driver::process(const pose_frame& frame, stream_output& out) {
    window_.push_back(frame);
    if (!frame_complete(frame)) ++incomplete_in_window_;
    if (window_.size() > window_length_) {
        if (!frame_complete(window_.front())) --incomplete_in_window_;
        window_.pop_front();
    }
    ++frames_processed_;

    if (window_.size() < window_length_) return;
    if ((frames_processed_ - window_length_) % cfg_.stride != 0) return;
    if (incomplete_in_window_ > 0) {
        ++windows_skipped_;
        return;
    }

    scratch_.assign(window_.begin(), window_.end());
    const auto t0 = std::chrono::steady_clock::now();
    stream_prediction sp;
    try {
        const feature_matrix features =
            extract_features(scratch_, layout_.mode, cfg_.features);
        sp.pred = model_.classify(features);
    } catch (const error&) {
        // Degenerate torso, gimbal contamination, timing jitter: the window
        // is unusable, the stream keeps going.
        ++windows_skipped_;
        return;
    }
    const auto t1 = std::chrono::steady_clock::now();

    sp.index = predictions_made_++;
    sp.t = window_.back().t;
    sp.elapsed_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    out.predictions.push_back(sp);

    if (const auto event = detector_.push(sp.pred, sp.t)) {
        out.events.push_back(*event);
    }
}

}  // namespace pimu
