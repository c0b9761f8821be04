#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <string>

#include "pimu/error.hpp"
#include "pimu/labels.hpp"
#include "pimu/tsf.hpp"

namespace pimu {

/// Sliding-window consistency check over the prediction stream. A center
/// prediction j fires when the mean of its delta past neighbors reaches
/// high_mean and the mean of its delta future neighbors stays at or below
/// low_mean (the center itself is excluded from both sides).
struct detector_config {
    std::size_t window = 15;         // G: buffered predictions
    std::size_t neighbor_span = 7;   // delta: neighbors on each side
    double high_mean = 1.0;          // swimming-side bound (literal reading)
    double low_mean = 0.0;           // stopped-side bound
    bool detect_recovery = false;    // also fire the mirrored stop-to-swim check

    void validate() const {
        if (neighbor_span == 0 || window < 2 * neighbor_span + 1) {
            throw error("detector config requires G >= 2*delta + 1 with delta >= 1");
        }
        if (!(low_mean >= 0.0) || !(low_mean < high_mean) || !(high_mean <= 1.0)) {
            throw error("detector config requires 0 <= low_mean < high_mean <= 1");
        }
    }
};

enum class transition_kind : std::uint8_t {
    swim_to_stop = 0,
    stop_to_swim = 1,
};

struct transition_event {
    transition_kind kind = transition_kind::swim_to_stop;
    std::size_t at_index = 0;  // 0-based prediction index of the firing center
    double t = 0.0;            // timestamp of the center's window
};

/// Line-delimited JSON record for the event log.
std::string event_json_line(const transition_event& e);

/// Single-writer streaming state: a ring of the last G predictions plus
/// bookkeeping so each center index fires at most once.
class transition_detector {
public:
    explicit transition_detector(detector_config cfg = {}) : cfg_(cfg) { cfg_.validate(); }

    /// Appends one prediction (with the timestamp of its window) and runs the
    /// consistency check over every admissible center. No event can fire
    /// before G predictions have been consumed.
    std::optional<transition_event> push(swim_label label, double t);
    std::optional<transition_event> push(const prediction& p, double t) {
        return push(p.label, t);
    }

    void reset();

    std::size_t consumed() const { return consumed_; }
    std::size_t buffered() const { return buffer_.size(); }
    const detector_config& config() const { return cfg_; }

private:
    struct entry {
        std::size_t index;
        bool swimming;
        double t;
    };

    bool fires(std::size_t center, transition_kind kind) const;

    detector_config cfg_;
    std::deque<entry> buffer_;
    std::size_t consumed_ = 0;
    std::optional<std::size_t> last_emitted_[2];
};

}  // namespace pimu
