#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "pimu/error.hpp"
#include "pimu/features.hpp"
#include "pimu/labels.hpp"

namespace pimu {

/// One interval-statistic feature: a summary of matrix[start:end, column].
enum class interval_stat : std::uint8_t {
    mean = 0,
    stddev = 1,  // population
    slope = 2,   // least-squares over the time index
};

struct interval_feature {
    std::uint32_t column = 0;
    std::uint32_t start = 0;
    std::uint32_t end = 0;  // exclusive
    interval_stat stat = interval_stat::mean;
};

double interval_stats(const feature_matrix& m, const interval_feature& f);

struct class_counts {
    std::array<std::uint64_t, 2> n{0, 0};

    void add(swim_label l) { ++n[static_cast<std::size_t>(l)]; }
    std::uint64_t total() const { return n[0] + n[1]; }
    bool pure() const { return n[0] == 0 || n[1] == 0; }
};

/// Shannon entropy in bits of a binary label multiset.
double entropy_bits(const class_counts& c);

inline constexpr double default_margin_alpha = 1e-6;

/// Split score: entropy gain plus a sub-1e-6 margin term that breaks ties
/// between equal-entropy candidates in favor of thresholds far from the
/// training values. `margin` must be pre-normalized by the feature's value
/// range at the node so the term stays below alpha.
double entrance_gain(const class_counts& left, const class_counts& right, double margin,
                     double alpha = default_margin_alpha);

struct tree_node {
    bool leaf = true;
    interval_feature split{};
    double threshold = 0.0;
    std::uint32_t left = 0;   // node indices within the tree
    std::uint32_t right = 0;
    class_counts counts{};    // populated for leaves
};

struct ts_tree {
    std::vector<tree_node> nodes;  // nodes[0] is the root

    swim_label classify(const feature_matrix& m) const;
};

struct feature_layout {
    feature_mode mode = feature_mode::combined;
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<std::string> column_names;

    bool operator==(const feature_layout&) const = default;
};

struct prediction {
    swim_label label = swim_label::not_swimming;
    double confidence = 0.0;  // winning vote fraction, in [0.5, 1] up to ties
};

/// Minimal contract every window classifier satisfies: consume one feature
/// window, emit a binary prediction. The forest below is one implementation;
/// alternate backends plug in here.
class classifier {
public:
    virtual ~classifier() = default;
    virtual prediction classify(const feature_matrix& window) const = 0;
};

struct labeled_window {
    feature_matrix features;
    swim_label label = swim_label::not_swimming;
};

struct forest_params {
    std::size_t n_trees = 500;
    std::uint64_t seed = 0;
    std::size_t thresholds_per_feature = 20;
    std::size_t min_leaf = 1;
    std::size_t min_interval = 3;
    double margin_alpha = default_margin_alpha;
    std::size_t threads = 0;  // 0 = hardware concurrency
};

/// Bagged ensemble of interval-feature decision trees. Training is
/// deterministic for a fixed (dataset, params) pair: every tree derives its
/// random stream from (seed, tree index), so thread count does not matter.
class forest : public classifier {
public:
    forest() = default;

    /// Assembles a forest from explicit trees (used by loaders and tests).
    forest(std::vector<ts_tree> trees, feature_layout layout, std::uint64_t seed = 0,
           std::uint64_t dataset_hash = 0);

    static forest train(const std::vector<labeled_window>& dataset, feature_mode mode,
                        const forest_params& params);

    prediction classify(const feature_matrix& window) const override;

    /// Raw votes per label, index 0 = not_swimming, 1 = swimming.
    std::array<std::size_t, 2> tally(const feature_matrix& window) const;

    const feature_layout& layout() const { return layout_; }
    const std::vector<ts_tree>& trees() const { return trees_; }
    std::uint64_t seed() const { return seed_; }
    std::uint64_t dataset_hash() const { return dataset_hash_; }

    void save(const std::filesystem::path& path) const;
    static forest load(const std::filesystem::path& path);

    std::string serialize() const;
    static forest deserialize(const std::string& bytes);

private:
    std::vector<ts_tree> trees_;
    feature_layout layout_;
    std::uint64_t seed_ = 0;
    std::uint64_t dataset_hash_ = 0;
};

inline forest train_forest(const std::vector<labeled_window>& dataset, feature_mode mode,
                           const forest_params& params) {
    return forest::train(dataset, mode, params);
}

inline prediction predict(const forest& f, const feature_matrix& window) {
    return f.classify(window);
}

inline void save_model(const forest& f, const std::filesystem::path& path) { f.save(path); }

inline forest load_model(const std::filesystem::path& path) { return forest::load(path); }

/// Thresholded mean absolute acceleration over the translational block
/// (all columns when the layout has no translational block). A deliberately
/// crude cross-check for the forest: any motion classifier should beat it.
prediction baseline_energy_classify(const feature_matrix& m, feature_mode mode,
                                    double threshold);

/// Deterministic content hash of a training set (FNV-1a over shapes,
/// value bits and labels in dataset order).
std::uint64_t hash_dataset(const std::vector<labeled_window>& dataset);

}  // namespace pimu
