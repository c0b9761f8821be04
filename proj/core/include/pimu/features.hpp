#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pimu/error.hpp"
#include "pimu/pose.hpp"

namespace pimu {

/// Which blocks the feature matrix carries. Column counts are fixed by the
/// layout: 3 axes x 11 joints (all but the left-hip reference) = 33
/// translational columns, plus 3 angular columns when rotation is included.
enum class feature_mode : std::uint8_t {
    translational_only = 0,  // D = 33
    rotational_only = 1,     // D = 3
    combined = 2,            // D = 36
};

std::size_t feature_dims(feature_mode mode);
std::string_view feature_mode_name(feature_mode mode);
std::optional<feature_mode> feature_mode_from_name(std::string_view name);

/// Number of translational columns in front of the angular block.
std::size_t translational_dims(feature_mode mode);

/// Dense row-major matrix of per-step accelerations. Rows are time steps,
/// columns follow the canonical layout: for each non-left-hip joint in
/// canonical order (ax, ay, az), then (theta_dd, phi_dd, psi_dd).
struct feature_matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    feature_matrix() = default;
    feature_matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

    bool operator==(const feature_matrix&) const = default;
};

/// Second-order central difference on a uniform grid: value k is
/// (s[k+2] - 2 s[k+1] + s[k]) / dt^2, so the output is two shorter than the
/// input. Throws too_short_error (length < 3) and non_positive_dt_error.
std::vector<double> central_second_difference(std::span<const double> series, double dt);

/// Removes 2*pi jumps: output[0] = input[0], each successive difference is
/// mapped into (-pi, pi].
std::vector<double> unwrap_angles(std::span<const double> series);

struct feature_options {
    /// Reject the window when more than this fraction of frames hit gimbal
    /// lock during angle extraction.
    double max_gimbal_fraction = 0.1;
    /// Per-step timestamp tolerance as a fraction of the window's mean dt.
    double dt_tolerance = dt_jitter_tolerance;
};

/// Turns N+2 complete pose frames into an N x D acceleration window.
/// Positions are normalized to the left hip per frame before differencing;
/// angle series are unwrapped before differencing.
/// Throws too_short_error, incomplete_frame_error, non_uniform_sampling_error,
/// degenerate_torso_error (and friends), gimbal_contamination_error.
feature_matrix extract_features(std::span<const pose_frame> poses, feature_mode mode,
                                const feature_options& opts = {});

/// Column headers in layout order, e.g. "left_shoulder.ax", ..., "psi_dd".
std::vector<std::string> feature_column_names(feature_mode mode);

/// Comma-separated dump, one row per time step, with a header row.
void write_feature_csv(std::ostream& os, const feature_matrix& m, feature_mode mode);

}  // namespace pimu
