#include <doctest.h>

#include <algorithm>

#include "pimu/stream.hpp"
#include "pimu/synth.hpp"
#include "test_util.hpp"

using namespace pimu;

namespace {

const forest& fixture_model() {
    static const forest model = [] {
        dataset_grid grid;
        grid.mode = feature_mode::translational_only;
        const auto windows = generate_dataset(grid, 40, 1234);
        forest_params params;
        params.n_trees = 15;
        params.seed = 3;
        return forest::train(windows, grid.mode, params);
    }();
    return model;
}

detector_config relaxed_detector() {
    detector_config cfg;
    cfg.high_mean = 6.0 / 7.0;
    cfg.low_mean = 1.0 / 7.0;
    return cfg;
}

labeled_sequence stream_sequence(double swim = 10.0, double stop = 10.0,
                                 std::uint64_t seed = 200) {
    synth_params p;
    p.seed = seed;
    return generate_sequence(p, swim, stop);
}

stream_output run_all(stream_driver& driver, const labeled_sequence& seq) {
    stream_output all;
    for (const pose_frame& f : seq.sequence.frames) {
        stream_output step = driver.push_frame(f);
        all.predictions.insert(all.predictions.end(), step.predictions.begin(),
                               step.predictions.end());
        all.events.insert(all.events.end(), step.events.begin(), step.events.end());
    }
    stream_output tail = driver.finish();
    all.predictions.insert(all.predictions.end(), tail.predictions.begin(),
                           tail.predictions.end());
    all.events.insert(all.events.end(), tail.events.begin(), tail.events.end());
    return all;
}

}  // namespace

TEST_SUITE_BEGIN("stream");

TEST_CASE("stride-1 streaming emits one prediction per filled window") {
    const labeled_sequence seq = stream_sequence();  // 200 frames
    stream_driver driver(fixture_model(), fixture_model().layout(), {}, relaxed_detector());
    const stream_output out = run_all(driver, seq);
    CHECK(out.predictions.size() == 200 - 52 + 1);
    CHECK(driver.predictions_made() == out.predictions.size());
    for (std::size_t i = 0; i < out.predictions.size(); ++i) {
        CHECK(out.predictions[i].index == i);
    }
    // timestamps follow the window's trailing frame
    CHECK(out.predictions[0].t == doctest::Approx(5.1));
}

TEST_CASE("streams shorter than one window predict nothing and exit cleanly") {
    const labeled_sequence seq = stream_sequence(2.0, 2.0);  // 40 frames
    stream_driver driver(fixture_model(), fixture_model().layout(), {}, relaxed_detector());
    const stream_output out = run_all(driver, seq);
    CHECK(out.predictions.empty());
    CHECK(out.events.empty());
}

TEST_CASE("a stride skips intermediate windows") {
    const labeled_sequence seq = stream_sequence();
    stream_config cfg;
    cfg.stride = 5;
    stream_driver driver(fixture_model(), fixture_model().layout(), cfg, relaxed_detector());
    const stream_output out = run_all(driver, seq);
    CHECK(out.predictions.size() == (200 - 52) / 5 + 1);
}

TEST_CASE("the swim-to-stop transition raises exactly one event near the truth") {
    const labeled_sequence seq = stream_sequence();
    const std::size_t transition = *seq.transition_index;  // frame 100
    stream_driver driver(fixture_model(), fixture_model().layout(), {}, relaxed_detector());
    const stream_output out = run_all(driver, seq);

    REQUIRE(out.events.size() == 1);
    CHECK(out.events[0].kind == transition_kind::swim_to_stop);
    // prediction index p covers frames [p, p+52); the event may sit anywhere
    // between the first straddling window and delta past the fully-stopped one
    CHECK(out.events[0].at_index + 52 >= transition);
    CHECK(out.events[0].at_index <= transition + 7);
}

TEST_CASE("an all-swimming stream raises no events") {
    synth_params p;
    p.seed = 77;
    labeled_sequence seq = generate_sequence(p, 20.0, 1.0);
    seq.sequence.frames.resize(200);
    seq.labels.resize(200);
    stream_driver driver(fixture_model(), fixture_model().layout(), {}, relaxed_detector());
    const stream_output out = run_all(driver, seq);
    CHECK(out.predictions.size() == 149);
    CHECK(out.events.empty());
}

TEST_CASE("short dropouts are interpolated without losing predictions") {
    labeled_sequence seq = stream_sequence();
    seq.sequence.frames[70].clear(joint_id::left_ankle);
    seq.sequence.frames[71].clear(joint_id::right_knee);

    stream_driver driver(fixture_model(), fixture_model().layout(), {}, relaxed_detector());
    const stream_output out = run_all(driver, seq);
    CHECK(out.predictions.size() == 149);
    CHECK(driver.windows_skipped() == 0);
}

TEST_CASE("long dropouts skip exactly the windows that cover them") {
    labeled_sequence seq = stream_sequence();
    for (std::size_t k = 70; k < 75; ++k) {
        seq.sequence.frames[k].clear(joint_id::left_wrist);
    }
    stream_driver driver(fixture_model(), fixture_model().layout(), {}, relaxed_detector());
    const stream_output out = run_all(driver, seq);
    // windows starting 19..74 contain an incomplete frame
    CHECK(driver.windows_skipped() == 56);
    CHECK(out.predictions.size() == 149 - 56);
}

TEST_CASE("memory stays bounded by window, gap, and detector sizes") {
    const labeled_sequence seq = stream_sequence(30.0, 30.0, 11);  // 600 frames
    stream_driver driver(fixture_model(), fixture_model().layout(), {}, relaxed_detector());
    for (const pose_frame& f : seq.sequence.frames) {
        driver.push_frame(f);
        CHECK(driver.buffered_frames() <= 52);
        CHECK(driver.pending_frames() <= 2);
        CHECK(driver.detector().buffered() <= 15);
    }
}

TEST_SUITE_END();
