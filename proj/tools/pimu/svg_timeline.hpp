#pragma once

#include <filesystem>
#include <vector>

#include "pimu/detector.hpp"

namespace pimu_cli {

/// Static timeline: one green/red block per prediction (swimming / not
/// swimming), a yellow-bordered rectangle spanning the delta-wide
/// consistency-check neighborhood of each fired event, and an index axis.
void write_timeline_svg(const std::filesystem::path& path,
                        const std::vector<bool>& swimming,
                        const std::vector<pimu::transition_event>& events,
                        std::size_t neighbor_span);

}  // namespace pimu_cli
