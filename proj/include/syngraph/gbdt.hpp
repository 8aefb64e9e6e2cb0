#pragma once

// Histogram gradient-boosted regression trees, squared-error loss.

#include <cstdint>
#include <span>
#include <vector>

namespace syngraph {

struct TreeNode {
    std::int32_t feature = -1; // -1 marks a leaf
    double threshold = 0.0;    // x[feature] < threshold goes left
    std::int32_t left = -1;
    std::int32_t right = -1;
    double value = 0.0; // leaf output
    friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

struct RegressionTree {
    std::vector<TreeNode> nodes; // nodes[0] is the root

    [[nodiscard]] double predict(std::span<const double> x) const;
    friend bool operator==(const RegressionTree&, const RegressionTree&) = default;
};

struct GbdtParams {
    int trees = 100;
    double learning_rate = 0.1;
    int max_depth = 5;
    double alpha = 10.0;  // L1 on leaf weights
    double lambda = 1.0;  // L2 on leaf weights
    double min_child_weight = 1.0;
    std::size_t max_bins = 256;
    std::size_t max_samples = 20000; // training rows beyond this are subsampled
};

struct GradientBoostedEnsemble {
    double base_score = 0.0;
    double learning_rate = 0.1;
    std::vector<RegressionTree> trees;

    // base + sum lr * tree(x)
    [[nodiscard]] double predict(std::span<const double> x) const;
    friend bool operator==(const GradientBoostedEnsemble&, const GradientBoostedEnsemble&) = default;
};

// x is row-major with `width` columns, one row per target.
GradientBoostedEnsemble fit_gbdt(std::span<const double> x, std::size_t width, std::span<const double> y,
                                 const GbdtParams& params = {}, std::uint64_t seed = 0);

} // namespace syngraph
