#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "pimu/error.hpp"
#include "pimu/labels.hpp"
#include "pimu/pose.hpp"
#include "pimu/rng.hpp"
#include "pimu/synth.hpp"

namespace pimu {

// ---------------------------------------------------------------------------
// Frame streams: one JSON record per line,
//   {"t": <seconds>, "joints": {"left_shoulder": [x, y, z], ...}}
// Joint keys use the canonical names; absent keys mean missing joints.

/// Parses one frame record; line_no is 1-based and used in errors only.
/// Timestamp monotonicity is the caller's concern.
pose_frame parse_frame_line(const std::string& line, std::size_t line_no);

/// One frame as a single JSON line (no trailing newline).
std::string frame_json_line(const pose_frame& frame);

pose_sequence read_frames(std::istream& is);
pose_sequence read_frames(const std::filesystem::path& path);
void write_frames(const pose_sequence& seq, std::ostream& os);
void write_frames(const pose_sequence& seq, const std::filesystem::path& path);

// Label sidecar: {"transition_index": k} when a single swim-to-stop
// transition is known, otherwise {"labels": [1, 1, 0, ...]}.
void write_labels(const labeled_sequence& seq, const std::filesystem::path& path);
labeled_sequence read_labeled(const std::filesystem::path& frames_path,
                              const std::filesystem::path& labels_path);

// ---------------------------------------------------------------------------
// Dataset manifest: lists frame/label file pairs plus the seeds needed to
// reproduce them.

struct manifest_entry {
    std::filesystem::path frames;
    std::filesystem::path labels;
};

struct dataset_manifest {
    std::vector<manifest_entry> sequences;
    std::uint64_t seed = 0;
    std::optional<feature_mode> mode;  // declared layout, when pinned
};

void write_manifest(const dataset_manifest& manifest, const std::filesystem::path& path);
/// Relative entry paths are resolved against the manifest's directory.
dataset_manifest read_manifest(const std::filesystem::path& path);

std::vector<labeled_sequence> load_manifest_sequences(const dataset_manifest& manifest);

// ---------------------------------------------------------------------------
// Windowing

struct window_spec {
    enum class policy : std::uint8_t { strict = 0, majority = 1 };

    std::size_t length = 52;  // N + 2 poses per N-step feature window
    std::size_t stride = 52;  // 1 for streaming
    policy label_policy = policy::strict;

    void validate() const {
        if (length < 3 || stride < 1) {
            throw error("window spec requires length >= 3 and stride >= 1");
        }
    }
};

struct pose_window {
    std::vector<pose_frame> frames;
    swim_label label = swim_label::not_swimming;
};

/// Cuts the sequence into windows of `length` complete frames at `stride`.
/// Windows containing incomplete frames are dropped. Strict policy drops
/// windows that straddle the transition; majority policy labels by majority
/// frame label (ties to not_swimming).
std::vector<pose_window> window_dataset(const labeled_sequence& seq, const window_spec& spec);

// ---------------------------------------------------------------------------
// Augmentation

/// Mirror: negates x and swaps left/right joint identities, so anatomical
/// naming stays correct. An involution.
std::vector<pose_frame> augment_flip(std::span<const pose_frame> window);

/// Applies one fixed rotation to every joint of every frame.
std::vector<pose_frame> apply_rotation(std::span<const pose_frame> window, const mat3& rotation);

/// One rotation drawn uniformly over the rotation group, applied identically
/// to every joint of every frame.
std::vector<pose_frame> augment_rotate(std::span<const pose_frame> window, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Deterministic splits

struct split_spec {
    double train = 0.65;
    double val = 0.16;
    double test = 0.19;
    std::uint64_t seed = 0;

    void validate() const {
        const double sum = train + val + test;
        if (!(train > 0.0) || !(val > 0.0) || !(test > 0.0) || std::abs(sum - 1.0) > 1e-9) {
            throw error("split fractions must be positive and sum to 1");
        }
    }
};

template <class T>
struct split_result {
    std::vector<T> train, val, test;
};

/// Largest-remainder partition sizes for n items (train, val, test order
/// breaks remainder ties).
std::array<std::size_t, 3> split_sizes(std::size_t n, const split_spec& spec);

template <class T>
split_result<T> split(const std::vector<T>& dataset, const split_spec& spec) {
    spec.validate();
    if (dataset.empty()) throw error("split needs a nonempty dataset");

    std::vector<std::size_t> order(dataset.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    rng shuffle_rng(splitmix64(spec.seed ^ 0x5917a55eedULL));
    for (std::size_t i = order.size() - 1; i > 0; --i) {
        std::swap(order[i], order[shuffle_rng.below(i + 1)]);
    }

    const auto sizes = split_sizes(dataset.size(), spec);
    split_result<T> out;
    std::size_t at = 0;
    for (std::size_t i = 0; i < sizes[0]; ++i) out.train.push_back(dataset[order[at++]]);
    for (std::size_t i = 0; i < sizes[1]; ++i) out.val.push_back(dataset[order[at++]]);
    for (std::size_t i = 0; i < sizes[2]; ++i) out.test.push_back(dataset[order[at++]]);
    return out;
}

}  // namespace pimu
