#include "pimu/features.hpp"

#include <cmath>
#include <numbers>
#include <ostream>

#include "pimu/body_frame.hpp"

namespace pimu {

namespace {

constexpr std::size_t moving_joint_count = joint_count - 1;  // left hip is the reference

std::array<joint_id, moving_joint_count> moving_joints() {
    std::array<joint_id, moving_joint_count> out{};
    std::size_t k = 0;
    for (std::size_t i = 0; i < joint_count; ++i) {
        const auto id = static_cast<joint_id>(i);
        if (id != joint_id::left_hip) out[k++] = id;
    }
    return out;
}

double wrap_to_pi(double a) {
    if (a > -std::numbers::pi && a <= std::numbers::pi) return a;  // already canonical
    const double two_pi = 2.0 * std::numbers::pi;
    double d = std::fmod(a + std::numbers::pi, two_pi);
    if (d <= 0.0) d += two_pi;
    return d - std::numbers::pi;
}

/// Mean frame interval, validated uniform: every step must stay within
/// opts.dt_tolerance of the mean.
double window_dt(std::span<const pose_frame> poses, double tolerance) {
    const std::size_t n = poses.size();
    const double span = poses.back().t - poses.front().t;
    const double mean_dt = span / static_cast<double>(n - 1);
    if (!(mean_dt > 0.0)) {
        throw non_monotone_timestamps_error("window timestamps are not increasing");
    }
    for (std::size_t i = 1; i < n; ++i) {
        const double dt = poses[i].t - poses[i - 1].t;
        if (std::abs(dt - mean_dt) > tolerance * mean_dt) {
            throw non_uniform_sampling_error("frame interval deviates beyond tolerance");
        }
    }
    return mean_dt;
}

}  // namespace

std::size_t feature_dims(feature_mode mode) {
    switch (mode) {
        case feature_mode::translational_only: return 3 * moving_joint_count;      // 33
        case feature_mode::rotational_only: return 3;                              // 3
        case feature_mode::combined: return 3 * moving_joint_count + 3;            // 36
    }
    return 0;
}

std::size_t translational_dims(feature_mode mode) {
    return mode == feature_mode::rotational_only ? 0 : 3 * moving_joint_count;
}

std::string_view feature_mode_name(feature_mode mode) {
    switch (mode) {
        case feature_mode::translational_only: return "translational";
        case feature_mode::rotational_only: return "rotational";
        case feature_mode::combined: return "combined";
    }
    return "?";
}

std::optional<feature_mode> feature_mode_from_name(std::string_view name) {
    if (name == "translational" || name == "trans") return feature_mode::translational_only;
    if (name == "rotational" || name == "rot") return feature_mode::rotational_only;
    if (name == "combined") return feature_mode::combined;
    return std::nullopt;
}

std::vector<double> central_second_difference(std::span<const double> series, double dt) {
    if (series.size() < 3) {
        throw too_short_error("central_second_difference needs at least 3 samples");
    }
    if (!(dt > 0.0)) {
        throw non_positive_dt_error("central_second_difference needs dt > 0");
    }
    const double inv_dt2 = 1.0 / (dt * dt);
    std::vector<double> out(series.size() - 2);
    for (std::size_t k = 0; k + 2 < series.size(); ++k) {
        out[k] = (series[k + 2] - 2.0 * series[k + 1] + series[k]) * inv_dt2;
    }
    return out;
}

std::vector<double> unwrap_angles(std::span<const double> series) {
    std::vector<double> out;
    out.reserve(series.size());
    if (series.empty()) return out;
    out.push_back(series[0]);
    for (std::size_t i = 1; i < series.size(); ++i) {
        out.push_back(out.back() + wrap_to_pi(series[i] - series[i - 1]));
    }
    return out;
}

feature_matrix extract_features(std::span<const pose_frame> poses, feature_mode mode,
                                const feature_options& opts) {
    const std::size_t len = poses.size();
    if (len < 3) throw too_short_error("a feature window needs at least 3 poses");

    for (const pose_frame& f : poses) {
        if (!frame_complete(f)) {
            throw incomplete_frame_error("feature window contains an incomplete frame");
        }
    }
    const double dt = window_dt(poses, opts.dt_tolerance);

    const std::size_t n = len - 2;
    const bool want_trans = mode != feature_mode::rotational_only;
    const bool want_rot = mode != feature_mode::translational_only;

    feature_matrix out(n, feature_dims(mode));
    std::vector<double> series(len);

    if (want_trans) {
        std::vector<pose_frame> rel;
        rel.reserve(len);
        for (const pose_frame& f : poses) rel.push_back(relative_to_left_hip(f));

        const auto joints = moving_joints();
        for (std::size_t j = 0; j < joints.size(); ++j) {
            for (int axis = 0; axis < 3; ++axis) {
                for (std::size_t i = 0; i < len; ++i) {
                    const vec3& p = rel[i].at(joints[j]);
                    series[i] = axis == 0 ? p.x : axis == 1 ? p.y : p.z;
                }
                const auto acc = central_second_difference(series, dt);
                const std::size_t col = 3 * j + static_cast<std::size_t>(axis);
                for (std::size_t k = 0; k < n; ++k) out.at(k, col) = acc[k];
            }
        }
    }

    if (want_rot) {
        std::vector<double> theta(len), phi(len), psi(len);
        std::size_t locked = 0;
        for (std::size_t i = 0; i < len; ++i) {
            const euler_angles a = euler_from_frame(build_body_frame(poses[i]));
            theta[i] = a.theta;
            phi[i] = a.phi;
            psi[i] = a.psi;
            if (a.gimbal_locked) ++locked;
        }
        if (static_cast<double>(locked) > opts.max_gimbal_fraction * static_cast<double>(len)) {
            throw gimbal_contamination_error("too many gimbal-locked frames in window");
        }

        const std::size_t base = translational_dims(mode);
        const std::array<const std::vector<double>*, 3> angle_series = {&theta, &phi, &psi};
        for (std::size_t a = 0; a < 3; ++a) {
            const auto unwrapped = unwrap_angles(*angle_series[a]);
            const auto acc = central_second_difference(unwrapped, dt);
            for (std::size_t k = 0; k < n; ++k) out.at(k, base + a) = acc[k];
        }
    }

    return out;
}

std::vector<std::string> feature_column_names(feature_mode mode) {
    std::vector<std::string> names;
    names.reserve(feature_dims(mode));
    if (mode != feature_mode::rotational_only) {
        for (const joint_id id : moving_joints()) {
            const std::string joint(joint_name(id));
            names.push_back(joint + ".ax");
            names.push_back(joint + ".ay");
            names.push_back(joint + ".az");
        }
    }
    if (mode != feature_mode::translational_only) {
        names.emplace_back("theta_dd");
        names.emplace_back("phi_dd");
        names.emplace_back("psi_dd");
    }
    return names;
}

void write_feature_csv(std::ostream& os, const feature_matrix& m, feature_mode mode) {
    const auto names = feature_column_names(mode);
    for (std::size_t c = 0; c < names.size(); ++c) {
        if (c) os << ',';
        os << names[c];
    }
    os << '\n';
    os.precision(17);
    for (std::size_t r = 0; r < m.rows; ++r) {
        for (std::size_t c = 0; c < m.cols; ++c) {
            if (c) os << ',';
            os << m.at(r, c);
        }
        os << '\n';
    }
}

}  // namespace pimu
