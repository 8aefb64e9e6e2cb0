#include "syngraph/gbdt.hpp"

#include "syngraph/error.hpp"
#include "syngraph/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace syngraph {

double RegressionTree::predict(std::span<const double> x) const {
    if (nodes.empty()) {
        return 0.0;
    }
    std::size_t i = 0;
    while (nodes[i].feature >= 0) {
        const auto& node = nodes[i];
        i = static_cast<std::size_t>(x[static_cast<std::size_t>(node.feature)] < node.threshold ? node.left
                                                                                                   : node.right);
    }
    return nodes[i].value;
}

double GradientBoostedEnsemble::predict(std::span<const double> x) const {
    double out = base_score;
    for (const auto& tree : trees) {
        out += learning_rate * tree.predict(x);
    }
    return out;
}

namespace {

double soft_threshold(double g, double alpha) {
    if (g > alpha) {
        return g - alpha;
    }
    if (g < -alpha) {
        return g + alpha;
    }
    return 0.0;
}

struct Builder {
    const GbdtParams& params;
    std::size_t width;
    std::size_t rows;
    const std::vector<std::uint16_t>& bins;         // rows x width
    const std::vector<std::vector<double>>& cuts;   // per feature
    const std::vector<double>& grad;
    std::vector<TreeNode> nodes;

    [[nodiscard]] double score(double g, double h) const {
        const double t = soft_threshold(g, params.alpha);
        return t * t / (h + params.lambda);
    }
    [[nodiscard]] double leaf(double g, double h) const { return -soft_threshold(g, params.alpha) / (h + params.lambda); }

    std::int32_t build(std::vector<std::size_t>& idx, int depth) {
        double g = 0.0;
        for (auto r : idx) {
            g += grad[r];
        }
        const double h = static_cast<double>(idx.size());
        const auto id = static_cast<std::int32_t>(nodes.size());
        nodes.push_back({-1, 0.0, -1, -1, leaf(g, h)});
        if (depth >= params.max_depth || h < 2.0 * params.min_child_weight) {
            return id;
        }
        const double parent = score(g, h);
        double best_gain = 0.0;
        std::size_t best_feature = 0;
        std::size_t best_cut = 0;
        bool found = false;
        std::vector<double> hist_g;
        std::vector<double> hist_h;
        for (std::size_t f = 0; f < width; ++f) {
            const auto& c = cuts[f];
            if (c.empty()) {
                continue;
            }
            hist_g.assign(c.size() + 1, 0.0);
            hist_h.assign(c.size() + 1, 0.0);
            for (auto r : idx) {
                const auto b = bins[r * width + f];
                hist_g[b] += grad[r];
                hist_h[b] += 1.0;
            }
            double lg = 0.0;
            double lh = 0.0;
            for (std::size_t j = 0; j < c.size(); ++j) {
                lg += hist_g[j];
                lh += hist_h[j];
                const double rh = h - lh;
                if (lh < params.min_child_weight || rh < params.min_child_weight) {
                    continue;
                }
                const double gain = score(lg, lh) + score(g - lg, rh) - parent;
                if (gain > best_gain + 1e-12) {
                    best_gain = gain;
                    best_feature = f;
                    best_cut = j;
                    found = true;
                }
            }
        }
        if (!found) {
            return id;
        }
        // bin <= cut index  <=>  x < cuts[cut]
        auto mid = std::stable_partition(idx.begin(), idx.end(), [&](std::size_t r) {
            return bins[r * width + best_feature] <= best_cut;
        });
        std::vector<std::size_t> right(mid, idx.end());
        idx.erase(mid, idx.end());
        nodes[static_cast<std::size_t>(id)].feature = static_cast<std::int32_t>(best_feature);
        nodes[static_cast<std::size_t>(id)].threshold = cuts[best_feature][best_cut];
        nodes[static_cast<std::size_t>(id)].value = 0.0;
        const auto l = build(idx, depth + 1);
        const auto rt = build(right, depth + 1);
        nodes[static_cast<std::size_t>(id)].left = l;
        nodes[static_cast<std::size_t>(id)].right = rt;
        return id;
    }
};

std::vector<double> make_cuts(std::vector<double> values, std::size_t max_bins) {
    std::sort(values.begin(), values.end());
    std::vector<double> distinct;
    for (double v : values) {
        if (distinct.empty() || v != distinct.back()) {
            distinct.push_back(v);
        }
    }
    std::vector<double> cuts;
    if (distinct.size() <= max_bins) {
        for (std::size_t i = 1; i < distinct.size(); ++i) {
            cuts.push_back(distinct[i - 1] + (distinct[i] - distinct[i - 1]) / 2.0);
        }
        return cuts;
    }
    for (std::size_t i = 1; i < max_bins; ++i) {
        const double cut = values[i * values.size() / max_bins];
        if (cut > values.front() && (cuts.empty() || cut > cuts.back())) {
            cuts.push_back(cut);
        }
    }
    return cuts;
}

} // namespace

GradientBoostedEnsemble fit_gbdt(std::span<const double> x, std::size_t width, std::span<const double> y,
                                 const GbdtParams& params, std::uint64_t seed) {
    if (width == 0 || x.size() != y.size() * width) {
        throw ConfigError("training matrix does not match target length");
    }
    if (y.empty()) {
        throw FitError("boosting needs at least one training row");
    }
    if (params.max_bins < 2 || params.max_bins > 65535) {
        throw ConfigError("max_bins must be in [2, 65535]");
    }
    std::vector<std::size_t> sample(y.size());
    std::iota(sample.begin(), sample.end(), std::size_t{0});
    if (sample.size() > params.max_samples) {
        Engine engine = make_stream(seed, 0, 0, 0x6bd7);
        for (std::size_t i = 0; i < params.max_samples; ++i) {
            std::swap(sample[i], sample[i + uniform_below(engine, sample.size() - i)]);
        }
        sample.resize(params.max_samples);
        std::sort(sample.begin(), sample.end());
    }
    const std::size_t rows = sample.size();

    GradientBoostedEnsemble out;
    out.learning_rate = params.learning_rate;
    double sum = 0.0;
    for (auto r : sample) {
        sum += y[r];
    }
    out.base_score = sum / static_cast<double>(rows);

    std::vector<std::vector<double>> cuts(width);
    std::vector<std::uint16_t> bins(rows * width);
    for (std::size_t f = 0; f < width; ++f) {
        std::vector<double> column(rows);
        for (std::size_t i = 0; i < rows; ++i) {
            column[i] = x[sample[i] * width + f];
        }
        cuts[f] = make_cuts(column, params.max_bins);
        for (std::size_t i = 0; i < rows; ++i) {
            const auto b = std::upper_bound(cuts[f].begin(), cuts[f].end(), column[i]) - cuts[f].begin();
            bins[i * width + f] = static_cast<std::uint16_t>(b);
        }
    }

    std::vector<double> pred(rows, out.base_score);
    std::vector<double> grad(rows);
    std::vector<std::size_t> idx;
    for (int t = 0; t < params.trees; ++t) {
        for (std::size_t i = 0; i < rows; ++i) {
            grad[i] = pred[i] - y[sample[i]];
        }
        // build() splits idx in place, so it is refilled every round.
        idx.resize(rows);
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        Builder builder{params, width, rows, bins, cuts, grad, {}};
        builder.build(idx, 0);
        RegressionTree tree{std::move(builder.nodes)};
        for (std::size_t i = 0; i < rows; ++i) {
            pred[i] += params.learning_rate * tree.predict(x.subspan(sample[i] * width, width));
        }
        out.trees.push_back(std::move(tree));
    }
    return out;
}

} // namespace syngraph
