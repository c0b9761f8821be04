#include "pimu/commands.hpp"

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>

#include <nlohmann/json.hpp>

#include "pimu/dataset.hpp"
#include "pimu/detector.hpp"
#include "pimu/log.hpp"
#include "pimu/stream.hpp"
#include "pimu/svg_timeline.hpp"
#include "pimu/synth.hpp"
#include "pimu/tsf.hpp"

namespace pimu_cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace pimu;

namespace {

std::uint64_t fnv64(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ULL;
    for (const unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[19];
    std::snprintf(buf, sizeof(buf), "%016" PRIx64, v);
    return buf;
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw io_error("cannot create output directory: " + dir.string());
}

/// Every command drops a run manifest next to its outputs so a run can be
/// reproduced from the recorded configuration alone.
void write_run_json(const fs::path& path, const std::string& command,
                    ordered_json config) {
    ordered_json run;
    run["command"] = command;
    run["config"] = std::move(config);
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw io_error("cannot write run manifest: " + path.string());
    os << run.dump(2) << '\n';
}

feature_mode parse_mode(const std::string& name) {
    const auto mode = feature_mode_from_name(name);
    if (!mode) throw error("unknown feature mode: " + name);
    return *mode;
}

labeled_sequence fill_gaps(const labeled_sequence& seq, std::size_t max_gap) {
    labeled_sequence out = seq;
    out.sequence = interpolate_gaps(seq.sequence, max_gap);
    return out;
}

struct window_corpus {
    std::vector<labeled_window> windows;
    std::size_t skipped = 0;
};

window_corpus extract_corpus(const std::vector<labeled_sequence>& sequences,
                             const window_spec& spec, feature_mode mode, std::size_t max_gap) {
    window_corpus out;
    for (const labeled_sequence& raw : sequences) {
        const labeled_sequence seq = fill_gaps(raw, max_gap);
        for (const pose_window& w : window_dataset(seq, spec)) {
            try {
                labeled_window lw;
                lw.features = extract_features(w.frames, mode);
                lw.label = w.label;
                out.windows.push_back(std::move(lw));
            } catch (const error& e) {
                ++out.skipped;
                logging::debug(std::string("window skipped: ") + e.what());
            }
        }
    }
    return out;
}

// --- simulate ----------------------------------------------------------------

struct simulate_options {
    std::string pose = "prone_down";
    double swim_secs = 10.0;
    double stop_secs = 5.0;
    double amp = 0.3;
    double freq = 1.0;
    double jitter = 0.01;
    double sink_rate = 0.1;
    double fps = 10.0;
    std::uint64_t seed = 0;
    std::string out;
};

void run_simulate(const simulate_options& opt) {
    synth_params params;
    const auto pose = pose_class_from_name(opt.pose);
    if (!pose) throw error("unknown pose class: " + opt.pose);
    params.pose = *pose;
    params.swim_amp = opt.amp;
    params.swim_freq = opt.freq;
    params.jitter_sigma = opt.jitter;
    params.sink_rate = opt.sink_rate;
    params.fps = opt.fps;
    params.seed = opt.seed;

    const labeled_sequence seq = generate_sequence(params, opt.swim_secs, opt.stop_secs);

    const fs::path dir(opt.out);
    ensure_dir(dir);
    write_frames(seq.sequence, dir / "frames.jsonl");
    write_labels(seq, dir / "labels.json");

    dataset_manifest manifest;
    manifest.seed = opt.seed;
    manifest.sequences.push_back({"frames.jsonl", "labels.json"});
    write_manifest(manifest, dir / "manifest.json");

    ordered_json config;
    config["pose"] = opt.pose;
    config["swim_secs"] = opt.swim_secs;
    config["stop_secs"] = opt.stop_secs;
    config["amp"] = opt.amp;
    config["freq"] = opt.freq;
    config["jitter"] = opt.jitter;
    config["sink_rate"] = opt.sink_rate;
    config["fps"] = opt.fps;
    config["seed"] = opt.seed;  // recorded even when defaulted
    write_run_json(dir / "run.json", "simulate", std::move(config));

    std::cout << "wrote " << seq.sequence.frames.size() << " frames ("
              << opt.swim_secs + opt.stop_secs << " s at " << opt.fps
              << " fps), transition at frame " << *seq.transition_index << "\n"
              << "frames:   " << (dir / "frames.jsonl").string() << "\n"
              << "labels:   " << (dir / "labels.json").string() << "\n"
              << "manifest: " << (dir / "manifest.json").string() << "\n";
}

void register_simulate_impl(CLI::App& app) {
    auto opt = std::make_shared<simulate_options>();
    CLI::App* sub = app.add_subcommand(
        "simulate", "Generate a synthetic labeled diver sequence (swim phase then stop phase)");
    sub->add_option("--pose", opt->pose, "Body pose class")
        ->check(CLI::IsMember({"prone_down", "prone_up", "inverted", "upright"}))
        ->capture_default_str();
    sub->add_option("--swim-secs", opt->swim_secs, "Swim phase duration, seconds")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sub->add_option("--stop-secs", opt->stop_secs, "Stop phase duration, seconds")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sub->add_option("--amp", opt->amp, "Kick amplitude, keypoint units")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    sub->add_option("--freq", opt->freq, "Kick frequency, Hz")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sub->add_option("--jitter", opt->jitter, "Per-joint Gaussian noise sigma")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    sub->add_option("--sink-rate", opt->sink_rate, "Post-stop drift along gravity, units/s")
        ->capture_default_str();
    sub->add_option("--fps", opt->fps, "Frame rate")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sub->add_option("--seed", opt->seed, "Generator seed (defaults to 0, noted in run.json)")
        ->capture_default_str();
    sub->add_option("--out", opt->out, "Output directory")->required();
    sub->callback([opt] { run_simulate(*opt); });
}

// --- train -------------------------------------------------------------------

struct train_options {
    std::string manifest;
    std::string mode = "combined";
    std::string model;
    std::size_t trees = 500;
    std::uint64_t seed = 0;
    std::size_t window_len = 52;
    std::size_t stride = 0;  // 0 = window length
    std::size_t max_gap = default_max_gap;
    std::size_t min_leaf = 1;
    std::size_t threads = 0;
    std::string label_policy = "strict";
};

void run_train(const train_options& opt) {
    const feature_mode mode = parse_mode(opt.mode);
    const dataset_manifest manifest = read_manifest(opt.manifest);
    if (manifest.mode && *manifest.mode != mode) {
        throw layout_mismatch_error("manifest declares mode \"" +
                                    std::string(feature_mode_name(*manifest.mode)) +
                                    "\" but --mode is \"" + opt.mode + "\"");
    }

    window_spec spec;
    spec.length = opt.window_len;
    spec.stride = opt.stride == 0 ? opt.window_len : opt.stride;
    spec.label_policy = opt.label_policy == "majority" ? window_spec::policy::majority
                                                       : window_spec::policy::strict;

    const auto sequences = load_manifest_sequences(manifest);
    const window_corpus corpus = extract_corpus(sequences, spec, mode, opt.max_gap);
    logging::info("extracted " + std::to_string(corpus.windows.size()) + " windows (" +
                  std::to_string(corpus.skipped) + " skipped) from " +
                  std::to_string(sequences.size()) + " sequences");

    split_spec split_cfg;
    split_cfg.seed = splitmix64(opt.seed ^ 0x5e11775eedULL);
    const auto parts = split(corpus.windows, split_cfg);

    forest_params params;
    params.n_trees = opt.trees;
    params.seed = opt.seed;
    params.min_leaf = opt.min_leaf;
    params.threads = opt.threads;
    const forest model = forest::train(parts.train, mode, params);

    std::size_t val_hits = 0;
    for (const labeled_window& w : parts.val) {
        if (model.classify(w.features).label == w.label) ++val_hits;
    }
    const double val_accuracy = parts.val.empty()
                                    ? 0.0
                                    : static_cast<double>(val_hits) /
                                          static_cast<double>(parts.val.size());

    const fs::path model_path(opt.model);
    if (model_path.has_parent_path()) ensure_dir(model_path.parent_path());
    model.save(model_path);
    const std::string model_hash = hex64(fnv64(model.serialize()));

    ordered_json metrics;
    metrics["val_accuracy"] = val_accuracy;
    metrics["n_train"] = parts.train.size();
    metrics["n_val"] = parts.val.size();
    metrics["n_test"] = parts.test.size();
    metrics["windows_skipped"] = corpus.skipped;
    metrics["model_hash"] = model_hash;
    std::ofstream metrics_os(model_path.string() + ".metrics.json", std::ios::trunc);
    metrics_os << metrics.dump(2) << '\n';

    ordered_json config;
    config["manifest"] = opt.manifest;
    config["mode"] = opt.mode;
    config["trees"] = opt.trees;
    config["seed"] = opt.seed;
    config["window_len"] = opt.window_len;
    config["stride"] = spec.stride;
    config["max_gap"] = opt.max_gap;
    config["min_leaf"] = opt.min_leaf;
    config["label_policy"] = opt.label_policy;
    write_run_json(model_path.string() + ".run.json", "train", std::move(config));

    std::cout << "trained " << opt.trees << " trees on " << parts.train.size() << " windows ("
              << feature_mode_name(mode) << ", " << model.layout().rows << "x"
              << model.layout().cols << ")\n"
              << "val accuracy: " << val_accuracy << " (" << parts.val.size() << " windows)\n"
              << "model: " << model_path.string() << "\n"
              << "model hash: " << model_hash << "\n";
}

void register_train_impl(CLI::App& app) {
    auto opt = std::make_shared<train_options>();
    CLI::App* sub = app.add_subcommand(
        "train", "Train a time-series forest on a dataset manifest and write the model file");
    sub->add_option("--manifest", opt->manifest, "Dataset manifest path")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--mode", opt->mode, "Feature mode")
        ->check(CLI::IsMember({"translational", "trans", "rotational", "rot", "combined"}))
        ->capture_default_str();
    sub->add_option("--model", opt->model, "Output model path")->required();
    sub->add_option("--trees", opt->trees, "Number of trees")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sub->add_option("--seed", opt->seed, "Training seed")->capture_default_str();
    sub->add_option("--window-len", opt->window_len, "Poses per window (N + 2)")
        ->check(CLI::Range(std::size_t{3}, std::size_t{100000}))
        ->capture_default_str();
    sub->add_option("--stride", opt->stride, "Window stride in frames (0 = window length)")
        ->capture_default_str();
    sub->add_option("--max-gap", opt->max_gap, "Longest dropout repaired by interpolation")
        ->capture_default_str();
    sub->add_option("--min-leaf", opt->min_leaf, "Minimum samples per leaf")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sub->add_option("--threads", opt->threads, "Training threads (0 = hardware)")
        ->capture_default_str();
    sub->add_option("--label-policy", opt->label_policy, "Window label policy")
        ->check(CLI::IsMember({"strict", "majority"}))
        ->capture_default_str();
    sub->callback([opt] { run_train(*opt); });
}

// --- stream ------------------------------------------------------------------

struct stream_options {
    std::string model;
    std::string frames;
    std::string out;
    std::size_t stride = 1;
    std::size_t max_gap = default_max_gap;
    std::size_t g = 15;
    std::size_t delta = 7;
    double high_mean = 1.0;
    double low_mean = 0.0;
    bool recovery = false;
    std::string svg;
};

void run_stream(const stream_options& opt) {
    const forest model = forest::load(opt.model);

    stream_config cfg;
    cfg.stride = opt.stride;
    cfg.max_gap = opt.max_gap;

    detector_config det;
    det.window = opt.g;
    det.neighbor_span = opt.delta;
    det.high_mean = opt.high_mean;
    det.low_mean = opt.low_mean;
    det.detect_recovery = opt.recovery;

    const fs::path dir(opt.out);
    ensure_dir(dir);
    std::ofstream events_os(dir / "events.jsonl", std::ios::trunc);
    if (!events_os) throw io_error("cannot open event log for writing");

    ordered_json config;
    config["model"] = opt.model;
    config["frames"] = opt.frames;
    config["stride"] = opt.stride;
    config["max_gap"] = opt.max_gap;
    config["g"] = opt.g;
    config["delta"] = opt.delta;
    config["high_mean"] = opt.high_mean;
    config["low_mean"] = opt.low_mean;
    config["recovery"] = opt.recovery;
    write_run_json(dir / "run.json", "stream", std::move(config));

    std::ifstream is(opt.frames);
    if (!is) throw io_error("cannot open frames file: " + opt.frames);

    stream_driver driver(model, model.layout(), cfg, det);
    // The SVG needs the full prediction strip; it is only buffered on demand
    // so plain streaming keeps O(window + G) memory.
    std::vector<bool> strip;
    std::vector<transition_event> all_events;
    const bool keep_strip = !opt.svg.empty();

    std::size_t line_no = 0;
    std::size_t frames_read = 0;
    std::optional<double> last_t;

    auto handle = [&](const stream_output& out) {
        for (const stream_prediction& p : out.predictions) {
            std::printf("%zu, %s, %.4f, %.3f\n", p.index,
                        std::string(label_name(p.pred.label)).c_str(), p.pred.confidence,
                        p.elapsed_ms);
            if (keep_strip) strip.push_back(p.pred.label == swim_label::swimming);
        }
        for (const transition_event& e : out.events) {
            events_os << event_json_line(e) << '\n';
            events_os.flush();
            logging::info("transition event: " + event_json_line(e));
            if (keep_strip) all_events.push_back(e);
        }
    };

    std::string line;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        pose_frame frame = parse_frame_line(line, line_no);
        if (last_t && frame.t <= *last_t) {
            throw non_monotone_timestamps_error("timestamps must be strictly increasing (line " +
                                                std::to_string(line_no) + ")");
        }
        last_t = frame.t;
        ++frames_read;
        handle(driver.push_frame(frame));
    }
    handle(driver.finish());

    if (keep_strip) {
        write_timeline_svg(opt.svg, strip, all_events, opt.delta);
        logging::info("timeline written to " + opt.svg);
    }

    logging::info("stream done: " + std::to_string(frames_read) + " frames, " +
                  std::to_string(driver.predictions_made()) + " predictions, " +
                  std::to_string(driver.windows_skipped()) + " windows skipped");
}

void register_stream_impl(CLI::App& app) {
    auto opt = std::make_shared<stream_options>();
    CLI::App* sub = app.add_subcommand(
        "stream",
        "Classify a frame stream online and detect swim-to-stop transitions");
    sub->add_option("--model", opt->model, "Trained model file")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--frames", opt->frames, "Frame stream (JSON lines)")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--out", opt->out, "Output directory (events.jsonl, run.json)")->required();
    sub->add_option("--stride", opt->stride, "Frames between predictions")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sub->add_option("--max-gap", opt->max_gap, "Longest dropout repaired by interpolation")
        ->capture_default_str();
    sub->add_option("--g", opt->g, "Predictions buffered by the consistency check (G)")
        ->capture_default_str();
    sub->add_option("--delta", opt->delta, "Neighbors on each side of the check center")
        ->capture_default_str();
    sub->add_option("--high-mean", opt->high_mean, "Swimming-side mean bound")
        ->capture_default_str();
    sub->add_option("--low-mean", opt->low_mean, "Stopped-side mean bound")
        ->capture_default_str();
    sub->add_flag("--recovery", opt->recovery, "Also detect stop-to-swim transitions");
    sub->add_option("--svg", opt->svg, "Write a static timeline SVG to this path");
    sub->callback([opt] { run_stream(*opt); });
}

// --- eval --------------------------------------------------------------------

struct eval_options {
    std::string manifest;
    std::vector<std::string> models;
    std::string out;
    std::size_t window_len = 52;
    std::size_t stride = 0;
    std::size_t max_gap = default_max_gap;
};

struct eval_result {
    feature_mode mode;
    double accuracy = 0.0;
    std::size_t n = 0;
    // confusion[truth][predicted], 0 = not_swimming, 1 = swimming
    std::array<std::array<std::size_t, 2>, 2> confusion{};
};

void run_eval(const eval_options& opt) {
    std::vector<forest> models;
    models.reserve(opt.models.size());
    std::map<feature_mode, std::size_t> mode_index;
    for (const std::string& path : opt.models) {
        forest model = forest::load(path);
        if (mode_index.contains(model.layout().mode)) {
            throw error("two models share feature mode \"" +
                        std::string(feature_mode_name(model.layout().mode)) + "\"");
        }
        mode_index[model.layout().mode] = models.size();
        models.push_back(std::move(model));
    }

    const dataset_manifest manifest = read_manifest(opt.manifest);
    const auto sequences = load_manifest_sequences(manifest);

    window_spec spec;
    spec.length = opt.window_len;
    spec.stride = opt.stride == 0 ? opt.window_len : opt.stride;

    std::vector<eval_result> results;
    for (const forest& model : models) {
        const feature_mode mode = model.layout().mode;
        const window_corpus corpus = extract_corpus(sequences, spec, mode, opt.max_gap);
        eval_result r;
        r.mode = mode;
        r.n = corpus.windows.size();
        std::size_t hits = 0;
        for (const labeled_window& w : corpus.windows) {
            const prediction p = model.classify(w.features);
            ++r.confusion[static_cast<std::size_t>(w.label)]
                         [static_cast<std::size_t>(p.label)];
            if (p.label == w.label) ++hits;
        }
        r.accuracy = r.n == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(r.n);
        results.push_back(r);
    }

    auto cell = [&](feature_mode mode) -> std::string {
        const auto it = mode_index.find(mode);
        if (it == mode_index.end()) return "-";
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.2f", 100.0 * results[it->second].accuracy);
        return buf;
    };

    std::ostringstream report;
    report << "classification accuracy (% correct)\n";
    report << "method               trans            rot              combined\n";
    report << "time_series_forest   " << std::left;
    for (const feature_mode m : {feature_mode::translational_only, feature_mode::rotational_only,
                                 feature_mode::combined}) {
        report.width(17);
        report << cell(m);
    }
    report << "\n\n";
    for (const eval_result& r : results) {
        report << "confusion (" << feature_mode_name(r.mode) << ", " << r.n
               << " windows; rows = truth, cols = predicted; order: not_swimming, swimming)\n";
        report << "  " << r.confusion[0][0] << "  " << r.confusion[0][1] << "\n";
        report << "  " << r.confusion[1][0] << "  " << r.confusion[1][1] << "\n";
    }

    const fs::path dir(opt.out);
    ensure_dir(dir);
    std::ofstream(dir / "report.txt", std::ios::trunc) << report.str();
    {
        std::ofstream csv(dir / "report.csv", std::ios::trunc);
        csv << "method,translational,rotational,combined\n";
        csv << "time_series_forest," << cell(feature_mode::translational_only) << ","
            << cell(feature_mode::rotational_only) << "," << cell(feature_mode::combined)
            << "\n";
    }

    ordered_json config;
    config["manifest"] = opt.manifest;
    config["models"] = opt.models;
    config["window_len"] = opt.window_len;
    config["stride"] = spec.stride;
    write_run_json(dir / "run.json", "eval", std::move(config));

    std::cout << report.str();
}

void register_eval_impl(CLI::App& app) {
    auto opt = std::make_shared<eval_options>();
    CLI::App* sub = app.add_subcommand(
        "eval", "Evaluate trained models on a labeled manifest; per-mode comparison table");
    sub->add_option("--manifest", opt->manifest, "Labeled dataset manifest")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--model", opt->models, "Model file (repeat for per-mode comparison)")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--out", opt->out, "Output directory (report.txt, report.csv)")->required();
    sub->add_option("--window-len", opt->window_len, "Poses per window")
        ->capture_default_str();
    sub->add_option("--stride", opt->stride, "Window stride (0 = window length)")
        ->capture_default_str();
    sub->callback([opt] { run_eval(*opt); });
}

// --- features (CSV dump) ------------------------------------------------------

struct features_options {
    std::string frames;
    std::string mode = "combined";
    std::string out;
    std::size_t window_start = 0;
    std::size_t window_len = 52;
    std::size_t max_gap = default_max_gap;
};

void run_features(const features_options& opt) {
    const feature_mode mode = parse_mode(opt.mode);
    const pose_sequence seq = interpolate_gaps(read_frames(opt.frames), opt.max_gap);
    if (opt.window_start + opt.window_len > seq.frames.size()) {
        throw error("window [" + std::to_string(opt.window_start) + ", " +
                    std::to_string(opt.window_start + opt.window_len) +
                    ") exceeds the stream length " + std::to_string(seq.frames.size()));
    }
    const auto window = std::span<const pose_frame>(seq.frames)
                            .subspan(opt.window_start, opt.window_len);
    const feature_matrix m = extract_features(window, mode);

    std::ofstream os(opt.out, std::ios::trunc);
    if (!os) throw io_error("cannot open CSV for writing: " + opt.out);
    write_feature_csv(os, m, mode);
    std::cout << "wrote " << m.rows << "x" << m.cols << " feature matrix to " << opt.out
              << "\n";
}

void register_features_impl(CLI::App& app) {
    auto opt = std::make_shared<features_options>();
    CLI::App* sub = app.add_subcommand(
        "features", "Dump one window's feature matrix as CSV with a header row");
    sub->add_option("--frames", opt->frames, "Frame stream (JSON lines)")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--mode", opt->mode, "Feature mode")
        ->check(CLI::IsMember({"translational", "trans", "rotational", "rot", "combined"}))
        ->capture_default_str();
    sub->add_option("--out", opt->out, "Output CSV path")->required();
    sub->add_option("--window-start", opt->window_start, "First frame of the window")
        ->capture_default_str();
    sub->add_option("--window-len", opt->window_len, "Poses in the window")
        ->capture_default_str();
    sub->callback([opt] { run_features(*opt); });
}

}  // namespace

void register_simulate(CLI::App& app) { register_simulate_impl(app); }
void register_train(CLI::App& app) { register_train_impl(app); }
void register_stream(CLI::App& app) { register_stream_impl(app); }
void register_eval(CLI::App& app) { register_eval_impl(app); }
void register_features(CLI::App& app) { register_features_impl(app); }

}  // namespace pimu_cli
