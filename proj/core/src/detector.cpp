#include "pimu/detector.hpp"

#include <nlohmann/json.hpp>

namespace pimu {

std::string event_json_line(const transition_event& e) {
    nlohmann::ordered_json j;
    j["event"] = e.kind == transition_kind::swim_to_stop ? "swim_to_stop" : "stop_to_swim";
    j["index"] = e.at_index;
    j["t"] = e.t;
    return j.dump();
}

bool transition_detector::fires(std::size_t center, transition_kind kind) const {
    const std::size_t d = cfg_.neighbor_span;
    double past = 0.0, future = 0.0;
    for (std::size_t k = 1; k <= d; ++k) {
        past += buffer_[center - k].swimming ? 1.0 : 0.0;
        future += buffer_[center + k].swimming ? 1.0 : 0.0;
    }
    past /= static_cast<double>(d);
    future /= static_cast<double>(d);
    if (kind == transition_kind::swim_to_stop) {
        return past >= cfg_.high_mean && future <= cfg_.low_mean;
    }
    return past <= cfg_.low_mean && future >= cfg_.high_mean;
}

std::optional<transition_event> transition_detector::push(swim_label label, double t) {
    buffer_.push_back(entry{consumed_, label == swim_label::swimming, t});
    ++consumed_;
    if (buffer_.size() > cfg_.window) buffer_.pop_front();

    // The first G classifications are required before any check runs.
    if (consumed_ < cfg_.window) return std::nullopt;

    const std::size_t d = cfg_.neighbor_span;
    const std::size_t kinds = cfg_.detect_recovery ? 2 : 1;
    for (std::size_t p = d; p + d < buffer_.size(); ++p) {
        const entry& center = buffer_[p];
        for (std::size_t k = 0; k < kinds; ++k) {
            const auto kind = static_cast<transition_kind>(k);
            auto& last = last_emitted_[k];
            // Adjacent centers around one transition all satisfy the check
            // (the center itself is excluded from both means). Distinct
            // same-kind transitions are provably more than 2*delta apart at
            // strict thresholds, so anything closer is the same event.
            if (last && center.index <= *last + 2 * d) continue;
            if (!fires(p, kind)) continue;
            last = center.index;
            return transition_event{kind, center.index, center.t};
        }
    }
    return std::nullopt;
}

void transition_detector::reset() {
    buffer_.clear();
    consumed_ = 0;
    last_emitted_[0].reset();
    last_emitted_[1].reset();
}

}  // namespace pimu
