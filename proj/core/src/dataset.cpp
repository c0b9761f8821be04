#include "pimu/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace pimu {

using nlohmann::json;
using nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Frames

pose_frame parse_frame_line(const std::string& line, std::size_t line_no) {
    json record;
    try {
        record = json::parse(line);
    } catch (const json::exception& e) {
        throw parse_error(line_no, std::string("invalid JSON: ") + e.what());
    }
    if (!record.is_object()) throw parse_error(line_no, "record is not an object");
    if (!record.contains("t") || !record["t"].is_number()) {
        throw parse_error(line_no, "missing numeric \"t\"");
    }

    pose_frame frame;
    frame.t = record["t"].get<double>();
    if (!std::isfinite(frame.t)) throw parse_error(line_no, "non-finite timestamp");

    if (record.contains("joints")) {
        const json& joints = record["joints"];
        if (!joints.is_object()) throw parse_error(line_no, "\"joints\" is not an object");
        for (const auto& [key, value] : joints.items()) {
            const auto id = joint_from_name(key);
            if (!id) throw parse_error(line_no, "unknown joint name \"" + key + "\"");
            if (!value.is_array() || value.size() != 3 || !value[0].is_number() ||
                !value[1].is_number() || !value[2].is_number()) {
                throw parse_error(line_no, "joint \"" + key + "\" is not [x, y, z]");
            }
            frame.set(*id, vec3{value[0].get<double>(), value[1].get<double>(),
                                value[2].get<double>()});
        }
    }
    return frame;
}

std::string frame_json_line(const pose_frame& frame) {
    ordered_json joints = ordered_json::object();
    for (std::size_t j = 0; j < joint_count; ++j) {
        if (!frame.present[j]) continue;
        const vec3& p = frame.position[j];
        if (!p.finite()) throw io_error("refusing to serialize a non-finite joint position");
        joints[std::string(joint_name(static_cast<joint_id>(j)))] = {p.x, p.y, p.z};
    }
    ordered_json record;
    record["t"] = frame.t;
    record["joints"] = std::move(joints);
    return record.dump();
}

pose_sequence read_frames(std::istream& is) {
    pose_sequence seq;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        pose_frame frame = parse_frame_line(line, line_no);
        if (!seq.frames.empty() && frame.t <= seq.frames.back().t) {
            throw non_monotone_timestamps_error(
                "timestamps must be strictly increasing (line " + std::to_string(line_no) + ")");
        }
        seq.frames.push_back(std::move(frame));
    }

    if (seq.frames.size() >= 2) {
        std::vector<double> dts;
        dts.reserve(seq.frames.size() - 1);
        for (std::size_t i = 1; i < seq.frames.size(); ++i) {
            dts.push_back(seq.frames[i].t - seq.frames[i - 1].t);
        }
        const auto mid = dts.begin() + static_cast<std::ptrdiff_t>(dts.size() / 2);
        std::nth_element(dts.begin(), mid, dts.end());
        seq.nominal_dt = *mid;
    }
    return seq;
}

pose_sequence read_frames(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw io_error("cannot open frames file: " + path.string());
    return read_frames(is);
}

void write_frames(const pose_sequence& seq, std::ostream& os) {
    for (const pose_frame& frame : seq.frames) {
        os << frame_json_line(frame) << '\n';
    }
}

void write_frames(const pose_sequence& seq, const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw io_error("cannot open frames file for writing: " + path.string());
    write_frames(seq, os);
    if (!os) throw io_error("failed writing frames file: " + path.string());
}

// ---------------------------------------------------------------------------
// Labels

void write_labels(const labeled_sequence& seq, const std::filesystem::path& path) {
    ordered_json j;
    if (seq.transition_index) {
        j["transition_index"] = *seq.transition_index;
    } else {
        json labels = json::array();
        for (const swim_label l : seq.labels) labels.push_back(static_cast<int>(l));
        j["labels"] = std::move(labels);
    }
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw io_error("cannot open labels file for writing: " + path.string());
    os << j.dump() << '\n';
    if (!os) throw io_error("failed writing labels file: " + path.string());
}

labeled_sequence read_labeled(const std::filesystem::path& frames_path,
                              const std::filesystem::path& labels_path) {
    labeled_sequence out;
    out.sequence = read_frames(frames_path);
    const std::size_t n = out.sequence.frames.size();

    std::ifstream is(labels_path);
    if (!is) throw io_error("cannot open labels file: " + labels_path.string());
    json j;
    try {
        is >> j;
    } catch (const json::exception& e) {
        throw parse_error(1, std::string("invalid labels JSON: ") + e.what());
    }

    if (j.contains("transition_index")) {
        if (!j["transition_index"].is_number_unsigned()) {
            throw parse_error(1, "\"transition_index\" must be a nonnegative integer");
        }
        const auto k = j["transition_index"].get<std::size_t>();
        if (k > n) throw parse_error(1, "\"transition_index\" exceeds frame count");
        out.transition_index = k;
        out.labels.assign(n, swim_label::swimming);
        for (std::size_t i = k; i < n; ++i) out.labels[i] = swim_label::not_swimming;
    } else if (j.contains("labels")) {
        const json& labels = j["labels"];
        if (!labels.is_array() || labels.size() != n) {
            throw parse_error(1, "\"labels\" must be an array with one entry per frame");
        }
        out.labels.reserve(n);
        for (const json& v : labels) {
            if (!v.is_number_integer() || (v.get<int>() != 0 && v.get<int>() != 1)) {
                throw parse_error(1, "label entries must be 0 or 1");
            }
            out.labels.push_back(static_cast<swim_label>(v.get<int>()));
        }
    } else {
        throw parse_error(1, "labels file needs \"transition_index\" or \"labels\"");
    }
    return out;
}

// ---------------------------------------------------------------------------
// Manifest

namespace {
constexpr const char* manifest_format = "pimu-dataset-v1";
}

void write_manifest(const dataset_manifest& manifest, const std::filesystem::path& path) {
    ordered_json j;
    j["format"] = manifest_format;
    j["seed"] = manifest.seed;
    if (manifest.mode) j["mode"] = std::string(feature_mode_name(*manifest.mode));
    json sequences = json::array();
    for (const manifest_entry& e : manifest.sequences) {
        sequences.push_back({{"frames", e.frames.string()}, {"labels", e.labels.string()}});
    }
    j["sequences"] = std::move(sequences);

    std::ofstream os(path, std::ios::trunc);
    if (!os) throw io_error("cannot open manifest for writing: " + path.string());
    os << j.dump(2) << '\n';
    if (!os) throw io_error("failed writing manifest: " + path.string());
}

dataset_manifest read_manifest(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw io_error("cannot open manifest: " + path.string());
    json j;
    try {
        is >> j;
    } catch (const json::exception& e) {
        throw parse_error(1, std::string("invalid manifest JSON: ") + e.what());
    }
    if (!j.is_object() || j.value("format", "") != manifest_format) {
        throw parse_error(1, std::string("manifest format must be \"") + manifest_format + "\"");
    }

    dataset_manifest out;
    out.seed = j.value("seed", std::uint64_t{0});
    if (j.contains("mode")) {
        const auto mode = feature_mode_from_name(j["mode"].get<std::string>());
        if (!mode) throw parse_error(1, "unknown feature mode in manifest");
        out.mode = *mode;
    }
    if (!j.contains("sequences") || !j["sequences"].is_array()) {
        throw parse_error(1, "manifest needs a \"sequences\" array");
    }

    const std::filesystem::path base = path.parent_path();
    for (const json& e : j["sequences"]) {
        if (!e.is_object() || !e.contains("frames") || !e.contains("labels")) {
            throw parse_error(1, "each sequence needs \"frames\" and \"labels\" paths");
        }
        std::filesystem::path frames = e["frames"].get<std::string>();
        std::filesystem::path labels = e["labels"].get<std::string>();
        if (frames.is_relative()) frames = base / frames;
        if (labels.is_relative()) labels = base / labels;
        out.sequences.push_back({std::move(frames), std::move(labels)});
    }
    return out;
}

std::vector<labeled_sequence> load_manifest_sequences(const dataset_manifest& manifest) {
    std::vector<labeled_sequence> out;
    out.reserve(manifest.sequences.size());
    for (const manifest_entry& e : manifest.sequences) {
        out.push_back(read_labeled(e.frames, e.labels));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Windowing

std::vector<pose_window> window_dataset(const labeled_sequence& seq, const window_spec& spec) {
    spec.validate();
    const std::size_t n = seq.sequence.frames.size();
    if (seq.labels.size() != n) {
        throw error("labeled sequence has mismatched label count");
    }

    std::vector<pose_window> out;
    if (n < spec.length) return out;

    for (std::size_t start = 0; start + spec.length <= n; start += spec.stride) {
        const std::size_t end = start + spec.length;

        bool all_complete = true;
        std::size_t swim_frames = 0;
        for (std::size_t i = start; i < end; ++i) {
            if (!frame_complete(seq.sequence.frames[i])) {
                all_complete = false;
                break;
            }
            if (seq.labels[i] == swim_label::swimming) ++swim_frames;
        }
        if (!all_complete) continue;

        const std::size_t stop_frames = spec.length - swim_frames;
        swim_label label;
        if (spec.label_policy == window_spec::policy::strict) {
            if (swim_frames != 0 && stop_frames != 0) continue;  // straddles the transition
            label = swim_frames ? swim_label::swimming : swim_label::not_swimming;
        } else {
            label = swim_frames > stop_frames ? swim_label::swimming : swim_label::not_swimming;
        }

        pose_window w;
        w.frames.assign(seq.sequence.frames.begin() + static_cast<std::ptrdiff_t>(start),
                        seq.sequence.frames.begin() + static_cast<std::ptrdiff_t>(end));
        w.label = label;
        out.push_back(std::move(w));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Augmentation

std::vector<pose_frame> augment_flip(std::span<const pose_frame> window) {
    std::vector<pose_frame> out;
    out.reserve(window.size());
    for (const pose_frame& frame : window) {
        pose_frame flipped;
        flipped.t = frame.t;
        for (std::size_t j = 0; j < joint_count; ++j) {
            if (!frame.present[j]) continue;
            const auto target = mirrored_joint(static_cast<joint_id>(j));
            vec3 p = frame.position[j];
            p.x = -p.x;
            flipped.set(target, p);
        }
        out.push_back(std::move(flipped));
    }
    return out;
}

std::vector<pose_frame> apply_rotation(std::span<const pose_frame> window, const mat3& rotation) {
    std::vector<pose_frame> out;
    out.reserve(window.size());
    for (const pose_frame& frame : window) {
        pose_frame rotated = frame;
        for (std::size_t j = 0; j < joint_count; ++j) {
            if (rotated.present[j]) rotated.position[j] = rotation * rotated.position[j];
        }
        out.push_back(std::move(rotated));
    }
    return out;
}

std::vector<pose_frame> augment_rotate(std::span<const pose_frame> window, std::uint64_t seed) {
    rng r(splitmix64(seed));
    return apply_rotation(window, random_rotation(r));
}

// ---------------------------------------------------------------------------
// Splits

std::array<std::size_t, 3> split_sizes(std::size_t n, const split_spec& spec) {
    const std::array<double, 3> fractions = {spec.train, spec.val, spec.test};
    std::array<std::size_t, 3> sizes{};
    std::array<double, 3> remainders{};
    std::size_t assigned = 0;
    for (std::size_t i = 0; i < 3; ++i) {
        const double target = fractions[i] * static_cast<double>(n);
        sizes[i] = static_cast<std::size_t>(std::floor(target));
        remainders[i] = target - static_cast<double>(sizes[i]);
        assigned += sizes[i];
    }
    std::array<std::size_t, 3> order = {0, 1, 2};
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return remainders[a] > remainders[b]; });
    for (std::size_t i = 0; assigned < n; ++i, ++assigned) ++sizes[order[i % 3]];
    return sizes;
}

}  // namespace pimu
