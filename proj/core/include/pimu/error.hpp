#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pimu {

/// Base class of every error thrown by this library.
class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// --- frame / sequence validation ---

struct incomplete_frame_error : error {
    using error::error;
};
struct incomplete_torso_error : error {
    using error::error;
};
struct non_monotone_timestamps_error : error {
    using error::error;
};
struct non_uniform_sampling_error : error {
    using error::error;
};

// --- body-frame construction ---

struct degenerate_torso_error : error {
    using error::error;
};
struct coincident_midpoint_error : error {
    using error::error;
};
struct non_orthonormal_frame_error : error {
    using error::error;
};

// --- feature extraction ---

struct too_short_error : error {
    using error::error;
};
struct non_positive_dt_error : error {
    using error::error;
};
// Too many gimbal-locked frames inside one window; the window is unusable.
struct gimbal_contamination_error : error {
    using error::error;
};

// --- classifier ---

struct shape_mismatch_error : error {
    using error::error;
};
struct degenerate_dataset_error : error {
    using error::error;
};
struct layout_mismatch_error : error {
    using error::error;
};
struct version_mismatch_error : error {
    using error::error;
};
struct corrupt_file_error : error {
    using error::error;
};

// --- I/O ---

struct io_error : error {
    using error::error;
};

/// Malformed record in a line-delimited stream; carries the 1-based line number.
class parse_error : public error {
public:
    parse_error(std::size_t line, const std::string& what_arg)
        : error("line " + std::to_string(line) + ": " + what_arg), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

}  // namespace pimu
