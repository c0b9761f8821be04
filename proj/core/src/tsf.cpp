#include "pimu/tsf.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <thread>

#include "pimu/rng.hpp"

namespace pimu {

namespace {

double sum_of_squared_indices(std::uint64_t m) {
    // sum_{x=0}^{m-1} x^2
    if (m == 0) return 0.0;
    const double md = static_cast<double>(m - 1);
    return md * (md + 1.0) * (2.0 * md + 1.0) / 6.0;
}

struct interval_sums {
    double n = 0.0;
    double sum = 0.0;     // sum of values
    double sum_sq = 0.0;  // sum of squared values
    double sum_xv = 0.0;  // sum of index * value, global time index
    double start = 0.0;
    double end = 0.0;
};

double stat_from_sums(const interval_sums& s, interval_stat stat) {
    switch (stat) {
        case interval_stat::mean:
            return s.sum / s.n;
        case interval_stat::stddev: {
            const double mean = s.sum / s.n;
            const double var = std::max(0.0, s.sum_sq / s.n - mean * mean);
            return std::sqrt(var);
        }
        case interval_stat::slope: {
            if (s.n < 2.0) return 0.0;
            const double sx = (s.start + s.end - 1.0) * s.n / 2.0;
            const double sxx = sum_of_squared_indices(static_cast<std::uint64_t>(s.end)) -
                               sum_of_squared_indices(static_cast<std::uint64_t>(s.start));
            const double denom = s.n * sxx - sx * sx;
            if (denom == 0.0) return 0.0;
            return (s.n * s.sum_xv - sx * s.sum) / denom;
        }
    }
    return 0.0;
}

void validate_interval(const feature_matrix& m, const interval_feature& f) {
    if (f.column >= m.cols || f.start >= f.end || f.end > m.rows) {
        throw shape_mismatch_error("interval feature out of bounds for matrix shape");
    }
}

// Per-sample, per-column prefix sums so any interval statistic of any
// training sample evaluates in O(1) during tree growth.
class stat_tables {
public:
    stat_tables(const std::vector<labeled_window>& dataset, std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), stride_(rows + 1) {
        const std::size_t per_sample = cols * stride_;
        sum_.assign(dataset.size() * per_sample, 0.0);
        sum_sq_.assign(dataset.size() * per_sample, 0.0);
        sum_xv_.assign(dataset.size() * per_sample, 0.0);
        for (std::size_t s = 0; s < dataset.size(); ++s) {
            const feature_matrix& m = dataset[s].features;
            for (std::size_t c = 0; c < cols; ++c) {
                const std::size_t base = (s * cols + c) * stride_;
                for (std::size_t t = 0; t < rows; ++t) {
                    const double v = m.at(t, c);
                    sum_[base + t + 1] = sum_[base + t] + v;
                    sum_sq_[base + t + 1] = sum_sq_[base + t] + v * v;
                    sum_xv_[base + t + 1] = sum_xv_[base + t] + static_cast<double>(t) * v;
                }
            }
        }
    }

    double value(std::size_t sample, const interval_feature& f) const {
        const std::size_t base = (sample * cols_ + f.column) * stride_;
        interval_sums s;
        s.n = static_cast<double>(f.end - f.start);
        s.sum = sum_[base + f.end] - sum_[base + f.start];
        s.sum_sq = sum_sq_[base + f.end] - sum_sq_[base + f.start];
        s.sum_xv = sum_xv_[base + f.end] - sum_xv_[base + f.start];
        s.start = static_cast<double>(f.start);
        s.end = static_cast<double>(f.end);
        return stat_from_sums(s, f.stat);
    }

private:
    std::size_t rows_, cols_, stride_;
    std::vector<double> sum_, sum_sq_, sum_xv_;
};

constexpr std::array<interval_stat, 3> all_stats = {
    interval_stat::mean, interval_stat::stddev, interval_stat::slope};

struct split_choice {
    interval_feature feature{};
    double threshold = 0.0;
    double gain = -1.0;
};

class tree_builder {
public:
    tree_builder(const std::vector<labeled_window>& dataset, const stat_tables& tables,
                 const forest_params& params, rng stream)
        : dataset_(dataset), tables_(tables), params_(params), rng_(std::move(stream)) {
        rows_ = dataset.front().features.rows;
        cols_ = dataset.front().features.cols;
        interval_trials_ =
            static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(rows_))));
    }

    ts_tree build() {
        std::vector<std::size_t> indices(dataset_.size());
        for (auto& i : indices) i = rng_.below(dataset_.size());

        ts_tree tree;
        grow(tree, indices);
        return tree;
    }

private:
    class_counts count(const std::vector<std::size_t>& indices) const {
        class_counts c;
        for (const std::size_t i : indices) c.add(dataset_[i].label);
        return c;
    }

    std::uint32_t make_leaf(ts_tree& tree, const class_counts& counts) const {
        tree_node node;
        node.leaf = true;
        node.counts = counts;
        tree.nodes.push_back(node);
        return static_cast<std::uint32_t>(tree.nodes.size() - 1);
    }

    // Evaluates candidate thresholds of one interval feature over the node's
    // samples; updates `best` when a strictly better entrance gain appears.
    void score_feature(const interval_feature& feature, const std::vector<std::size_t>& indices,
                       const class_counts& parent, split_choice& best) const {
        std::vector<std::pair<double, swim_label>> values;
        values.reserve(indices.size());
        for (const std::size_t i : indices) {
            values.emplace_back(tables_.value(i, feature), dataset_[i].label);
        }
        std::sort(values.begin(), values.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });

        const double lo = values.front().first;
        const double hi = values.back().first;
        const double range = hi - lo;
        if (!(range > 0.0)) return;  // constant feature cannot split

        std::vector<std::uint64_t> swim_prefix(values.size() + 1, 0);
        for (std::size_t i = 0; i < values.size(); ++i) {
            swim_prefix[i + 1] =
                swim_prefix[i] + (values[i].second == swim_label::swimming ? 1 : 0);
        }

        const std::size_t m = values.size();
        const std::size_t t_count = params_.thresholds_per_feature;
        for (std::size_t q = 1; q <= t_count; ++q) {
            const double pos = static_cast<double>(q) / static_cast<double>(t_count + 1) *
                               static_cast<double>(m - 1);
            const std::size_t lo_idx = static_cast<std::size_t>(pos);
            const double frac = pos - static_cast<double>(lo_idx);
            const double v0 = values[lo_idx].first;
            const double v1 = values[std::min(lo_idx + 1, m - 1)].first;
            const double threshold = v0 + frac * (v1 - v0);

            const auto it = std::upper_bound(
                values.begin(), values.end(), threshold,
                [](double t, const auto& p) { return t < p.first; });
            const std::size_t left_m = static_cast<std::size_t>(it - values.begin());
            if (left_m < params_.min_leaf || m - left_m < params_.min_leaf || left_m == 0 ||
                left_m == m) {
                continue;
            }

            class_counts left, right;
            left.n[1] = swim_prefix[left_m];
            left.n[0] = left_m - swim_prefix[left_m];
            right.n[1] = parent.n[1] - left.n[1];
            right.n[0] = parent.n[0] - left.n[0];

            const double margin =
                std::min(threshold - values[left_m - 1].first, values[left_m].first - threshold);
            const double gain =
                entrance_gain(left, right, margin / range, params_.margin_alpha);
            if (gain > best.gain) {
                best.gain = gain;
                best.feature = feature;
                best.threshold = threshold;
            }
        }
    }

    std::uint32_t grow(ts_tree& tree, const std::vector<std::size_t>& indices) {
        const class_counts counts = count(indices);
        if (counts.pure() || indices.size() < 2 * params_.min_leaf) {
            return make_leaf(tree, counts);
        }

        split_choice best;
        if (rows_ >= params_.min_interval) {
            for (std::size_t a = 0; a < interval_trials_; ++a) {
                const std::uint32_t size = static_cast<std::uint32_t>(
                    params_.min_interval + rng_.below(rows_ - params_.min_interval + 1));
                for (std::size_t b = 0; b < interval_trials_; ++b) {
                    const std::uint32_t start =
                        static_cast<std::uint32_t>(rng_.below(rows_ - size + 1));
                    const std::uint32_t column = static_cast<std::uint32_t>(rng_.below(cols_));
                    for (const interval_stat stat : all_stats) {
                        score_feature({column, start, start + size, stat}, indices, counts, best);
                    }
                }
            }
        }
        if (best.gain < 0.0) {
            return make_leaf(tree, counts);  // no informative split
        }

        std::vector<std::size_t> left_idx, right_idx;
        left_idx.reserve(indices.size());
        right_idx.reserve(indices.size());
        for (const std::size_t i : indices) {
            if (tables_.value(i, best.feature) <= best.threshold) {
                left_idx.push_back(i);
            } else {
                right_idx.push_back(i);
            }
        }

        tree_node node;
        node.leaf = false;
        node.split = best.feature;
        node.threshold = best.threshold;
        tree.nodes.push_back(node);
        const std::uint32_t self = static_cast<std::uint32_t>(tree.nodes.size() - 1);

        const std::uint32_t left_child = grow(tree, left_idx);
        const std::uint32_t right_child = grow(tree, right_idx);
        tree.nodes[self].left = left_child;
        tree.nodes[self].right = right_child;
        return self;
    }

    const std::vector<labeled_window>& dataset_;
    const stat_tables& tables_;
    const forest_params& params_;
    rng rng_;
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::size_t interval_trials_ = 0;
};

}  // namespace

double interval_stats(const feature_matrix& m, const interval_feature& f) {
    validate_interval(m, f);
    interval_sums s;
    s.n = static_cast<double>(f.end - f.start);
    s.start = static_cast<double>(f.start);
    s.end = static_cast<double>(f.end);
    for (std::uint32_t t = f.start; t < f.end; ++t) {
        const double v = m.at(t, f.column);
        s.sum += v;
        s.sum_sq += v * v;
        s.sum_xv += static_cast<double>(t) * v;
    }
    return stat_from_sums(s, f.stat);
}

double entropy_bits(const class_counts& c) {
    const double total = static_cast<double>(c.total());
    if (total == 0.0) return 0.0;
    double h = 0.0;
    for (const std::uint64_t k : c.n) {
        if (k == 0) continue;
        const double p = static_cast<double>(k) / total;
        h -= p * std::log2(p);
    }
    return h;
}

double entrance_gain(const class_counts& left, const class_counts& right, double margin,
                     double alpha) {
    class_counts parent;
    parent.n[0] = left.n[0] + right.n[0];
    parent.n[1] = left.n[1] + right.n[1];
    const double total = static_cast<double>(parent.total());
    const double weighted_child_entropy =
        (static_cast<double>(left.total()) * entropy_bits(left) +
         static_cast<double>(right.total()) * entropy_bits(right)) /
        total;
    return entropy_bits(parent) - weighted_child_entropy + alpha * margin;
}

swim_label ts_tree::classify(const feature_matrix& m) const {
    std::size_t at = 0;
    for (;;) {
        const tree_node& node = nodes[at];
        if (node.leaf) {
            // Equal leaf counts fall back to not_swimming, the safe side.
            return node.counts.n[1] > node.counts.n[0] ? swim_label::swimming
                                                       : swim_label::not_swimming;
        }
        const double v = interval_stats(m, node.split);
        at = v <= node.threshold ? node.left : node.right;
    }
}

forest::forest(std::vector<ts_tree> trees, feature_layout layout, std::uint64_t seed,
               std::uint64_t dataset_hash)
    : trees_(std::move(trees)),
      layout_(std::move(layout)),
      seed_(seed),
      dataset_hash_(dataset_hash) {
    if (trees_.empty()) throw error("a forest needs at least one tree");
    for (const ts_tree& t : trees_) {
        if (t.nodes.empty()) throw error("a tree needs at least one node");
    }
}

forest forest::train(const std::vector<labeled_window>& dataset, feature_mode mode,
                     const forest_params& params) {
    if (dataset.size() < 2) {
        throw degenerate_dataset_error("training needs at least 2 examples");
    }
    class_counts label_census;
    for (const labeled_window& w : dataset) label_census.add(w.label);
    if (label_census.pure()) {
        throw degenerate_dataset_error("training needs both classes present");
    }

    const std::size_t rows = dataset.front().features.rows;
    const std::size_t cols = dataset.front().features.cols;
    for (const labeled_window& w : dataset) {
        if (w.features.rows != rows || w.features.cols != cols) {
            throw shape_mismatch_error("training windows have mixed shapes");
        }
    }
    if (cols != feature_dims(mode)) {
        throw layout_mismatch_error("window width does not match the requested feature mode");
    }
    if (rows == 0) throw shape_mismatch_error("training windows are empty");

    forest out;
    out.layout_.mode = mode;
    out.layout_.rows = rows;
    out.layout_.cols = cols;
    out.layout_.column_names = feature_column_names(mode);
    out.seed_ = params.seed;
    out.dataset_hash_ = hash_dataset(dataset);
    out.trees_.resize(params.n_trees);

    const stat_tables tables(dataset, rows, cols);

    std::size_t n_threads = params.threads == 0
                                ? std::max<std::size_t>(1, std::thread::hardware_concurrency())
                                : params.threads;
    n_threads = std::min(n_threads, params.n_trees);

    auto build_range = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            tree_builder builder(dataset, tables, params, rng::derive(params.seed, i));
            out.trees_[i] = builder.build();
        }
    };

    if (n_threads <= 1) {
        build_range(0, params.n_trees);
    } else {
        std::vector<std::thread> workers;
        workers.reserve(n_threads);
        const std::size_t chunk = (params.n_trees + n_threads - 1) / n_threads;
        for (std::size_t w = 0; w < n_threads; ++w) {
            const std::size_t begin = w * chunk;
            const std::size_t end = std::min(params.n_trees, begin + chunk);
            if (begin >= end) break;
            workers.emplace_back(build_range, begin, end);
        }
        for (auto& t : workers) t.join();
    }

    return out;
}

std::array<std::size_t, 2> forest::tally(const feature_matrix& window) const {
    if (trees_.empty()) throw error("forest has no trees");
    if (window.rows != layout_.rows || window.cols != layout_.cols) {
        throw layout_mismatch_error("window shape does not match the trained layout");
    }
    std::array<std::size_t, 2> votes{0, 0};
    for (const ts_tree& t : trees_) {
        ++votes[static_cast<std::size_t>(t.classify(window))];
    }
    return votes;
}

prediction forest::classify(const feature_matrix& window) const {
    const auto votes = tally(window);
    prediction p;
    // Ties go to not_swimming: a false alarm is cheaper than a missed stop.
    p.label = votes[1] > votes[0] ? swim_label::swimming : swim_label::not_swimming;
    p.confidence = static_cast<double>(votes[static_cast<std::size_t>(p.label)]) /
                   static_cast<double>(trees_.size());
    return p;
}

prediction baseline_energy_classify(const feature_matrix& m, feature_mode mode,
                                    double threshold) {
    const std::size_t block = translational_dims(mode);
    const std::size_t cols = block == 0 ? m.cols : std::min(block, m.cols);
    double sum_abs = 0.0;
    std::size_t count = 0;
    for (std::size_t r = 0; r < m.rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            sum_abs += std::abs(m.at(r, c));
            ++count;
        }
    }
    const double mean_abs = count == 0 ? 0.0 : sum_abs / static_cast<double>(count);
    prediction p;
    p.label = mean_abs > threshold ? swim_label::swimming : swim_label::not_swimming;
    p.confidence = 1.0;
    return p;
}

std::uint64_t hash_dataset(const std::vector<labeled_window>& dataset) {
    std::uint64_t h = 1469598103934665603ULL;
    const auto mix = [&h](std::uint64_t v) {
        for (int i = 0; i < 8; ++i) {
            h ^= (v >> (8 * i)) & 0xffULL;
            h *= 1099511628211ULL;
        }
    };
    mix(dataset.size());
    for (const labeled_window& w : dataset) {
        mix(w.features.rows);
        mix(w.features.cols);
        for (const double v : w.features.data) mix(std::bit_cast<std::uint64_t>(v));
        mix(static_cast<std::uint64_t>(w.label));
    }
    return h;
}

// ---------------------------------------------------------------------------
// Serialization: little-endian, versioned, magic "PIMU".

namespace {

constexpr char model_magic[4] = {'P', 'I', 'M', 'U'};
constexpr std::uint32_t model_version = 1;

void put_u8(std::string& out, std::uint8_t v) { out.push_back(static_cast<char>(v)); }

void put_u16(std::string& out, std::uint16_t v) {
    for (int i = 0; i < 2; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f64(std::string& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

class cursor {
public:
    explicit cursor(const std::string& bytes) : bytes_(bytes) {}

    std::uint8_t u8() { return take(1)[0]; }
    std::uint16_t u16() { return static_cast<std::uint16_t>(uint_le(2)); }
    std::uint32_t u32() { return static_cast<std::uint32_t>(uint_le(4)); }
    std::uint64_t u64() { return uint_le(8); }
    double f64() { return std::bit_cast<double>(u64()); }

    std::string str(std::size_t n) {
        const unsigned char* p = take(n);
        return std::string(reinterpret_cast<const char*>(p), n);
    }

    bool exhausted() const { return at_ == bytes_.size(); }

private:
    const unsigned char* take(std::size_t n) {
        if (bytes_.size() - at_ < n) throw corrupt_file_error("model file truncated");
        const auto* p = reinterpret_cast<const unsigned char*>(bytes_.data()) + at_;
        at_ += n;
        return p;
    }

    std::uint64_t uint_le(std::size_t n) {
        const unsigned char* p = take(n);
        std::uint64_t v = 0;
        for (std::size_t i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
        return v;
    }

    const std::string& bytes_;
    std::size_t at_ = 0;
};

}  // namespace

std::string forest::serialize() const {
    std::string out;
    out.append(model_magic, 4);
    put_u32(out, model_version);
    put_u8(out, static_cast<std::uint8_t>(layout_.mode));
    put_u32(out, static_cast<std::uint32_t>(layout_.rows));
    put_u32(out, static_cast<std::uint32_t>(layout_.cols));
    put_u32(out, static_cast<std::uint32_t>(trees_.size()));
    put_u64(out, seed_);
    put_u64(out, dataset_hash_);

    put_u32(out, static_cast<std::uint32_t>(layout_.column_names.size()));
    for (const std::string& name : layout_.column_names) {
        put_u16(out, static_cast<std::uint16_t>(name.size()));
        out.append(name);
    }

    for (const ts_tree& tree : trees_) {
        put_u32(out, static_cast<std::uint32_t>(tree.nodes.size()));
        for (const tree_node& node : tree.nodes) {
            put_u8(out, node.leaf ? 0 : 1);
            if (node.leaf) {
                put_u64(out, node.counts.n[0]);
                put_u64(out, node.counts.n[1]);
            } else {
                put_u32(out, node.split.column);
                put_u32(out, node.split.start);
                put_u32(out, node.split.end);
                put_u8(out, static_cast<std::uint8_t>(node.split.stat));
                put_f64(out, node.threshold);
                put_u32(out, node.left);
                put_u32(out, node.right);
            }
        }
    }
    return out;
}

forest forest::deserialize(const std::string& bytes) {
    cursor in(bytes);
    if (in.str(4) != std::string(model_magic, 4)) {
        throw corrupt_file_error("bad magic: not a PIMU model file");
    }
    const std::uint32_t version = in.u32();
    if (version != model_version) {
        throw version_mismatch_error("unsupported model file version " + std::to_string(version));
    }

    forest out;
    const std::uint8_t mode_byte = in.u8();
    if (mode_byte > 2) throw corrupt_file_error("invalid feature mode byte");
    out.layout_.mode = static_cast<feature_mode>(mode_byte);
    out.layout_.rows = in.u32();
    out.layout_.cols = in.u32();
    const std::uint32_t n_trees = in.u32();
    out.seed_ = in.u64();
    out.dataset_hash_ = in.u64();

    if (out.layout_.cols != feature_dims(out.layout_.mode)) {
        throw corrupt_file_error("column count inconsistent with feature mode");
    }

    const std::uint32_t n_names = in.u32();
    if (n_names != out.layout_.cols) {
        throw corrupt_file_error("column name count inconsistent with layout");
    }
    out.layout_.column_names.reserve(n_names);
    for (std::uint32_t i = 0; i < n_names; ++i) {
        const std::uint16_t len = in.u16();
        out.layout_.column_names.push_back(in.str(len));
    }

    out.trees_.resize(n_trees);
    for (std::uint32_t t = 0; t < n_trees; ++t) {
        const std::uint32_t n_nodes = in.u32();
        if (n_nodes == 0) throw corrupt_file_error("tree with no nodes");
        auto& nodes = out.trees_[t].nodes;
        nodes.resize(n_nodes);
        for (std::uint32_t i = 0; i < n_nodes; ++i) {
            tree_node& node = nodes[i];
            const std::uint8_t kind = in.u8();
            if (kind > 1) throw corrupt_file_error("invalid node kind");
            node.leaf = kind == 0;
            if (node.leaf) {
                node.counts.n[0] = in.u64();
                node.counts.n[1] = in.u64();
                if (node.counts.total() == 0) throw corrupt_file_error("empty leaf counts");
            } else {
                node.split.column = in.u32();
                node.split.start = in.u32();
                node.split.end = in.u32();
                const std::uint8_t stat = in.u8();
                if (stat > 2) throw corrupt_file_error("invalid interval stat");
                node.split.stat = static_cast<interval_stat>(stat);
                node.threshold = in.f64();
                node.left = in.u32();
                node.right = in.u32();
                if (node.split.column >= out.layout_.cols || node.split.start >= node.split.end ||
                    node.split.end > out.layout_.rows || node.left >= n_nodes ||
                    node.right >= n_nodes) {
                    throw corrupt_file_error("split node out of bounds");
                }
            }
        }
    }
    if (!in.exhausted()) throw corrupt_file_error("trailing bytes after model data");
    return out;
}

void forest::save(const std::filesystem::path& path) const {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw io_error("cannot open model file for writing: " + path.string());
    const std::string bytes = serialize();
    os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!os) throw io_error("failed writing model file: " + path.string());
}

forest forest::load(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw io_error("cannot open model file: " + path.string());
    std::string bytes((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    return deserialize(bytes);
}

}  // namespace pimu
