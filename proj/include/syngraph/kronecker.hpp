#pragma once

// Generalized stochastic Kronecker structure model for (possibly
// non-square) N x M adjacency blocks.
//
// The cell distribution is theta_S^{(x) s} (x) pad, where s = min(n, m) square
// levels come first (most significant bits) and the remaining |n - m| levels
// use the row marginal [p; 1 - p] (n > m) or the column marginal [q, 1 - q]
// (m > n). Quadrant order is a = (0,0), b = (0,1), c = (1,0), d = (1,1), so
// p = a + b is the probability of a 0 row bit and q = a + c of a 0 column bit.

#include "syngraph/graph.hpp"
#include "syngraph/rng.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace syngraph {

struct SeedMatrix {
    double a = 0.25;
    double b = 0.25;
    double c = 0.25;
    double d = 0.25;

    [[nodiscard]] double p() const noexcept { return a + b; }
    [[nodiscard]] double q() const noexcept { return a + c; }
    [[nodiscard]] bool valid(double tolerance = 1e-12) const noexcept;
    friend bool operator==(const SeedMatrix&, const SeedMatrix&) = default;
};

struct ShapePlan {
    unsigned n = 0; // ceil(log2 rows)
    unsigned m = 0; // ceil(log2 cols)
    unsigned square_levels = 0;
    unsigned row_pad_levels = 0;
    unsigned col_pad_levels = 0;

    [[nodiscard]] unsigned levels() const noexcept { return square_levels + row_pad_levels + col_pad_levels; }
    friend bool operator==(const ShapePlan&, const ShapePlan&) = default;
};

unsigned ceil_log2(std::uint64_t value);
ShapePlan plan_shape(std::uint64_t rows, std::uint64_t cols);

struct NoiseConfig {
    double strength = 0.1;           // epsilon in [0, 1]
    std::vector<double> level_noise; // n_f per level; empty means noiseless
};

struct QuadrantRatios {
    double ab = 1.0; // a / b
    double ac = 1.0; // a / c
    std::array<double, 4> frequency{0.25, 0.25, 0.25, 0.25};
};

struct SeedModel {
    SeedMatrix seed;
    ShapePlan shape;
    std::uint64_t rows = 1;
    std::uint64_t cols = 1;
    std::uint64_t edges = 0;
    NoiseConfig noise;
    QuadrantRatios ratios;

    [[nodiscard]] double density() const noexcept {
        return static_cast<double>(edges) / (static_cast<double>(rows) * static_cast<double>(cols));
    }
};

// Expected number of rows (columns) with degree k, k = 0..k_max, when E
// edges fall independently on a 2^levels x 2^levels grid whose row (column)
// bits are 0 with probability `marginal`. Evaluated in log space.
std::vector<double> expected_degree_counts(double marginal, unsigned levels, std::uint64_t edges, std::uint64_t k_max);

inline std::vector<double> expected_out_degree_counts(double p, unsigned row_levels, std::uint64_t edges,
                                                      std::uint64_t k_max) {
    return expected_degree_counts(p, row_levels, edges, k_max);
}

inline std::vector<double> expected_in_degree_counts(double q, unsigned col_levels, std::uint64_t edges,
                                                     std::uint64_t k_max) {
    return expected_degree_counts(q, col_levels, edges, k_max);
}

// Pooled per-level quadrant frequencies over the square levels, Laplace +1.
QuadrantRatios mle_quadrant_ratios(std::span<const Edge> edges, const ShapePlan& shape);

struct SeedFit {
    SeedMatrix seed;
    double p = 0.5;
    double q = 0.5;
    double loss_out = 0.0;
    double loss_in = 0.0;
    std::vector<std::string> diagnostics;
};

// Minimizes the squared error between observed and expected degree counts,
// separately in p (out-degrees) and q (in-degrees), then picks a on the
// feasible segment {a + b = p, a + c = q, d >= 0} closest to the target
// ratios in least squares.
SeedFit fit_seed(const DegreeDistribution& out, const DegreeDistribution& in, const ShapePlan& shape,
                 std::uint64_t edges, const QuadrantRatios& ratios);

// Fits the full model of one edge type of g.
SeedModel fit_seed_model(const PartiteGraph& g, std::size_t edge_type, double noise_strength, SeedFit* fit = nullptr);

// Largest admissible n_f: min((a + d) / 2, b, c).
double noise_bound(const SeedMatrix& seed);

// theta_S + N(n_f) with N = [[-2 n_f a/(a+d), n_f], [n_f, -2 n_f d/(a+d)]].
SeedMatrix perturb(const SeedMatrix& seed, double noise_factor);

// n_f ~ U[0, eps * noise_bound] per level.
std::vector<double> draw_noise_factors(const SeedMatrix& seed, double strength, unsigned levels, Engine& engine);

// Perturbed seed for each of `levels` levels.
std::vector<SeedMatrix> sample_noise(const SeedMatrix& seed, double strength, unsigned levels, Engine& engine);

// Per-edge descent through the levels.
class Cascade {
public:
    Cascade(const ShapePlan& shape, std::span<const SeedMatrix> level_seeds);
    Cascade(const ShapePlan& shape, const SeedMatrix& seed);

    // (row, col) on the 2^n x 2^m grid.
    [[nodiscard]] std::pair<std::uint64_t, std::uint64_t> draw(Engine& engine) const;
    [[nodiscard]] const ShapePlan& shape() const noexcept { return shape_; }

private:
    struct Level {
        double t0, t1, t2; // cumulative thresholds (square) or t0 = marginal (pad)
    };
    ShapePlan shape_;
    std::vector<Level> levels_;
};

// E distinct in-range cells of the model's grid, sorted by (src, dst).
// Deterministic for a fixed (seed, workers); independent of thread count.
std::vector<Edge> sample_edges(const SeedModel& model, std::uint64_t edges, std::uint64_t seed, unsigned workers);

// E distinct cells uniform over rows x cols (the Erdos-Renyi baseline).
std::vector<Edge> sample_uniform_edges(std::uint64_t rows, std::uint64_t cols, std::uint64_t edges, std::uint64_t seed,
                                       unsigned workers);

namespace serial {
std::vector<Edge> sample_edges(const SeedModel& model, std::uint64_t edges, std::uint64_t seed, unsigned workers);
std::vector<Edge> sample_uniform_edges(std::uint64_t rows, std::uint64_t cols, std::uint64_t edges, std::uint64_t seed,
                                       unsigned workers);
} // namespace serial

// Nodes scale by sqrt(S) per partite, edges by S; seed and noise unchanged.
SeedModel scale_model(const SeedModel& model, double scale);

} // namespace syngraph
