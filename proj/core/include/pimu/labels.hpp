#pragma once

#include <cstdint>
#include <string_view>

namespace pimu {

enum class swim_label : std::uint8_t {
    not_swimming = 0,
    swimming = 1,
};

inline std::string_view label_name(swim_label l) {
    return l == swim_label::swimming ? "swimming" : "not_swimming";
}

}  // namespace pimu
