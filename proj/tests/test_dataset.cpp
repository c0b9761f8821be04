#include <doctest.h>

#include <unistd.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "pimu/dataset.hpp"
#include "pimu/synth.hpp"
#include "test_util.hpp"

using namespace pimu;
using namespace pimu::test;

namespace {

namespace fs = std::filesystem;

struct temp_dir {
    fs::path path;
    temp_dir() {
        path = fs::temp_directory_path() /
               ("pimu_dataset_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter++));
        fs::create_directories(path);
    }
    ~temp_dir() { fs::remove_all(path); }
    static inline int counter = 0;
};

labeled_sequence sample_sequence(double swim_secs = 6.0, double stop_secs = 6.0) {
    synth_params p;
    p.seed = 77;
    return generate_sequence(p, swim_secs, stop_secs);
}

}  // namespace

TEST_SUITE_BEGIN("dataset");

TEST_CASE("frame files round-trip losslessly through files") {
    temp_dir dir;
    const labeled_sequence seq = sample_sequence();
    const fs::path frames = dir.path / "frames.jsonl";
    write_frames(seq.sequence, frames);

    const pose_sequence back = read_frames(frames);
    REQUIRE(back.frames.size() == seq.sequence.frames.size());
    CHECK(back.nominal_dt == doctest::Approx(0.1).epsilon(1e-12));
    for (std::size_t i = 0; i < back.frames.size(); ++i) {
        CHECK(back.frames[i].t == seq.sequence.frames[i].t);
        CHECK(back.frames[i].present == seq.sequence.frames[i].present);
        CHECK(back.frames[i].position == seq.sequence.frames[i].position);
    }
}

TEST_CASE("absent joint keys stay missing through the round trip") {
    pose_sequence seq;
    seq.nominal_dt = 0.1;
    pose_frame f = full_frame(0.0);
    f.clear(joint_id::right_elbow);
    seq.frames = {f, full_frame(0.1)};

    std::stringstream ss;
    write_frames(seq, ss);
    const pose_sequence back = read_frames(ss);
    CHECK_FALSE(back.frames[0].has(joint_id::right_elbow));
    CHECK(back.frames[1].has(joint_id::right_elbow));
}

TEST_CASE("parse errors carry the offending line number") {
    std::stringstream unknown(R"({"t": 0.0, "joints": {}}
{"t": 0.1, "joints": {"nose": [0, 0, 0]}}
)");
    try {
        read_frames(unknown);
        FAIL("expected parse_error");
    } catch (const parse_error& e) {
        CHECK(e.line() == 2);
    }

    std::stringstream garbage("{\"t\": 0.0}\nnot json at all\n");
    try {
        read_frames(garbage);
        FAIL("expected parse_error");
    } catch (const parse_error& e) {
        CHECK(e.line() == 2);
    }

    std::stringstream bad_joint(R"({"t": 0.0, "joints": {"left_hip": [1, 2]}}
)");
    CHECK_THROWS_AS(read_frames(bad_joint), parse_error);

    std::stringstream no_t(R"({"joints": {}}
)");
    CHECK_THROWS_AS(read_frames(no_t), parse_error);
}

TEST_CASE("decreasing timestamps are rejected") {
    std::stringstream ss(R"({"t": 1.0, "joints": {}}
{"t": 0.5, "joints": {}}
)");
    CHECK_THROWS_AS(read_frames(ss), non_monotone_timestamps_error);
}

TEST_CASE("label sidecars round-trip both encodings") {
    temp_dir dir;
    const labeled_sequence seq = sample_sequence();
    const fs::path frames = dir.path / "frames.jsonl";
    const fs::path labels = dir.path / "labels.json";
    write_frames(seq.sequence, frames);
    write_labels(seq, labels);

    const labeled_sequence back = read_labeled(frames, labels);
    CHECK(back.transition_index == seq.transition_index);
    CHECK(back.labels == seq.labels);

    labeled_sequence no_transition = seq;
    no_transition.transition_index.reset();
    write_labels(no_transition, labels);
    const labeled_sequence back2 = read_labeled(frames, labels);
    CHECK_FALSE(back2.transition_index.has_value());
    CHECK(back2.labels == seq.labels);

    std::ofstream(labels) << R"({"labels": [1, 0]})";
    CHECK_THROWS_AS(read_labeled(frames, labels), parse_error);  // wrong length
}

TEST_CASE("manifest round-trips and resolves relative paths") {
    temp_dir dir;
    dataset_manifest manifest;
    manifest.seed = 99;
    manifest.mode = feature_mode::combined;
    manifest.sequences.push_back({"a.jsonl", "a.labels.json"});
    const fs::path path = dir.path / "manifest.json";
    write_manifest(manifest, path);

    const dataset_manifest back = read_manifest(path);
    CHECK(back.seed == 99);
    REQUIRE(back.mode.has_value());
    CHECK(*back.mode == feature_mode::combined);
    REQUIRE(back.sequences.size() == 1);
    CHECK(back.sequences[0].frames == dir.path / "a.jsonl");
    CHECK(back.sequences[0].labels == dir.path / "a.labels.json");

    std::ofstream(path) << R"({"format": "other"})";
    CHECK_THROWS_AS(read_manifest(path), parse_error);
}

TEST_CASE("window counts follow length and stride arithmetic") {
    synth_params p;
    p.seed = 31;
    window_spec spec;

    const labeled_sequence seq104 = generate_sequence(p, 5.2, 5.2);  // 104 frames
    REQUIRE(seq104.sequence.frames.size() == 104);
    CHECK(window_dataset(seq104, spec).size() == 2);

    labeled_sequence seq60 = generate_sequence(p, 6.0, 6.0);
    seq60.sequence.frames.resize(60);
    seq60.labels.resize(60);
    seq60.labels.assign(60, swim_label::swimming);
    seq60.transition_index.reset();
    window_spec sliding;
    sliding.stride = 1;
    CHECK(window_dataset(seq60, sliding).size() == 9);  // 60 - 52 + 1

    labeled_sequence tiny = seq60;
    tiny.sequence.frames.resize(10);
    tiny.labels.resize(10);
    CHECK(window_dataset(tiny, sliding).empty());
}

TEST_CASE("strict windows drop the transition, majority windows vote") {
    const labeled_sequence seq = sample_sequence();  // transition at frame 60
    window_spec strict;
    strict.stride = 1;
    const auto strict_windows = window_dataset(seq, strict);
    // 120 frames, transition at 60: swim windows start 0..8, stop start 60..68
    CHECK(strict_windows.size() == 18);
    std::size_t swim = 0;
    for (const pose_window& w : strict_windows) {
        if (w.label == swim_label::swimming) ++swim;
    }
    CHECK(swim == 9);

    window_spec majority;
    majority.stride = 1;
    majority.label_policy = window_spec::policy::majority;
    const auto maj_windows = window_dataset(seq, majority);
    CHECK(maj_windows.size() == 120 - 52 + 1);
    // window starting at 30 holds frames 30..81: 30 swim, 22 stop -> swimming
    CHECK(maj_windows[30].label == swim_label::swimming);
    // window starting at 40 holds frames 40..91: 20 swim, 32 stop -> not swimming
    CHECK(maj_windows[40].label == swim_label::not_swimming);
    // 26/26 tie at start 34 falls to the safe side
    CHECK(maj_windows[34].label == swim_label::not_swimming);
}

TEST_CASE("windows containing incomplete frames are dropped") {
    labeled_sequence seq = sample_sequence();
    seq.sequence.frames[55].clear(joint_id::left_knee);
    window_spec spec;
    spec.stride = 1;
    const auto windows = window_dataset(seq, spec);
    // strict windows: swim starts 0..3 (4..8 touch frame 55), stop starts 60..68
    CHECK(windows.size() == 13);
}

TEST_CASE("flip negates x, swaps sides, and is an involution") {
    const labeled_sequence seq = sample_sequence();
    const auto window = std::span<const pose_frame>(seq.sequence.frames).subspan(0, 52);

    const auto flipped = augment_flip(window);
    REQUIRE(flipped.size() == window.size());
    for (std::size_t i = 0; i < window.size(); ++i) {
        const vec3 la = window[i].at(joint_id::left_ankle);
        const vec3 ra_flipped = flipped[i].at(joint_id::right_ankle);
        CHECK(ra_flipped == vec3{-la.x, la.y, la.z});
    }

    const auto twice = augment_flip(flipped);
    for (std::size_t i = 0; i < window.size(); ++i) {
        CHECK(twice[i].position == window[i].position);
        CHECK(twice[i].present == window[i].present);
    }

    pose_frame partial = full_frame();
    partial.clear(joint_id::left_wrist);
    const auto one = augment_flip(std::vector<pose_frame>{partial});
    CHECK_FALSE(one[0].has(joint_id::right_wrist));  // missingness mirrors too
    CHECK(one[0].has(joint_id::left_wrist));
}

TEST_CASE("flip preserves translational feature energy when both hips rest") {
    // Zero-jitter kick: hip accelerations vanish, so re-referencing to the
    // mirrored hip cannot change the energy.
    synth_params p;
    p.jitter_sigma = 0.0;
    p.seed = 13;
    const labeled_sequence seq = generate_sequence(p, 6.0, 6.0);
    const auto window = std::span<const pose_frame>(seq.sequence.frames).subspan(0, 52);
    const auto flipped = augment_flip(window);

    const feature_matrix a = extract_features(window, feature_mode::translational_only);
    const feature_matrix b = extract_features(flipped, feature_mode::translational_only);
    double ea = 0.0, eb = 0.0;
    for (const double v : a.data) ea += v * v;
    for (const double v : b.data) eb += v * v;
    CHECK(ea > 1.0);  // the kick is actually there
    CHECK(std::abs(ea - eb) <= 1e-9 * ea);
}

TEST_CASE("rotation augmentation: identity is a no-op, magnitudes survive") {
    const labeled_sequence seq = sample_sequence();
    const auto window = std::span<const pose_frame>(seq.sequence.frames).subspan(0, 52);

    const auto same = apply_rotation(window, mat3::identity());
    for (std::size_t i = 0; i < window.size(); ++i) {
        CHECK(same[i].position == window[i].position);
    }

    const auto rotated = augment_rotate(window, 2024);
    const feature_matrix a = extract_features(window, feature_mode::translational_only);
    const feature_matrix b = extract_features(rotated, feature_mode::translational_only);
    for (std::size_t r = 0; r < a.rows; ++r) {
        for (std::size_t joint = 0; joint < 11; ++joint) {
            const vec3 va{a.at(r, 3 * joint), a.at(r, 3 * joint + 1), a.at(r, 3 * joint + 2)};
            const vec3 vb{b.at(r, 3 * joint), b.at(r, 3 * joint + 1), b.at(r, 3 * joint + 2)};
            CHECK(std::abs(va.norm() - vb.norm()) <= 1e-9);
        }
    }

    const auto r1 = augment_rotate(window, 5);
    const auto r2 = augment_rotate(window, 5);
    CHECK(r1[0].position == r2[0].position);  // seeded determinism
}

TEST_CASE("split sizes, determinism, and partition") {
    std::vector<int> items(10);
    for (int i = 0; i < 10; ++i) items[static_cast<std::size_t>(i)] = i;

    split_spec spec;
    spec.train = 0.6;
    spec.val = 0.2;
    spec.test = 0.2;
    spec.seed = 4;
    const auto parts = split(items, spec);
    CHECK(parts.train.size() == 6);
    CHECK(parts.val.size() == 2);
    CHECK(parts.test.size() == 2);

    const auto again = split(items, spec);
    CHECK(parts.train == again.train);
    CHECK(parts.val == again.val);
    CHECK(parts.test == again.test);

    std::vector<int> all = parts.train;
    all.insert(all.end(), parts.val.begin(), parts.val.end());
    all.insert(all.end(), parts.test.begin(), parts.test.end());
    std::sort(all.begin(), all.end());
    CHECK(all == items);

    split_spec bad;
    bad.train = 0.5;
    bad.val = 0.2;
    bad.test = 0.2;
    CHECK_THROWS_AS(split(items, bad), error);

    // paper-proportioned default: 0.65 / 0.16 / 0.19
    const auto sizes = split_sizes(100, split_spec{});
    CHECK(sizes[0] == 65);
    CHECK(sizes[1] == 16);
    CHECK(sizes[2] == 19);
}

TEST_SUITE_END();
