#include "syngraph/kronecker.hpp"

#include "syngraph/error.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <optional>
#include <set>

namespace syngraph {

bool SeedMatrix::valid(double tolerance) const noexcept {
    for (double v : {a, b, c, d}) {
        if (!(v >= 0.0 && v <= 1.0)) {
            return false;
        }
    }
    return std::abs(a + b + c + d - 1.0) <= tolerance;
}

unsigned ceil_log2(std::uint64_t value) {
    if (value <= 1) {
        return 0;
    }
    return static_cast<unsigned>(std::bit_width(value - 1));
}

ShapePlan plan_shape(std::uint64_t rows, std::uint64_t cols) {
    if (rows == 0 || cols == 0) {
        throw ConfigError("shape needs at least one row and one column");
    }
    ShapePlan plan;
    plan.n = ceil_log2(rows);
    plan.m = ceil_log2(cols);
    plan.square_levels = std::min(plan.n, plan.m);
    plan.row_pad_levels = plan.n - plan.square_levels;
    plan.col_pad_levels = plan.m - plan.square_levels;
    return plan;
}

std::vector<double> expected_degree_counts(double marginal, unsigned levels, std::uint64_t edges,
                                           std::uint64_t k_max) {
    std::vector<double> out(k_max + 1, 0.0);
    const double rows = std::ldexp(1.0, static_cast<int>(levels));
    if (edges == 0) {
        out[0] = rows;
        return out;
    }
    const double log_x = std::log(marginal);
    const double log_1mx = std::log1p(-marginal);
    const double e = static_cast<double>(edges);
    std::vector<double> log_r(levels + 1);
    std::vector<double> log_choose_levels(levels + 1);
    const double lg_levels = std::lgamma(levels + 1.0);
    for (unsigned i = 0; i <= levels; ++i) {
        const double zeros = static_cast<double>(levels - i);
        const double ones = static_cast<double>(i);
        // 0 * log(0) is taken as 0: a row whose bits never use that branch.
        log_r[i] = (zeros > 0 ? zeros * log_x : 0.0) + (ones > 0 ? ones * log_1mx : 0.0);
        log_choose_levels[i] = lg_levels - std::lgamma(zeros + 1.0) - std::lgamma(ones + 1.0);
    }
    const double lg_e = std::lgamma(e + 1.0);
    const std::uint64_t k_end = std::min(k_max, edges);
    for (std::uint64_t k = 0; k <= k_end; ++k) {
        const double kd = static_cast<double>(k);
        const double rest = e - kd;
        const double log_choose_ek = lg_e - std::lgamma(kd + 1.0) - std::lgamma(rest + 1.0);
        double sum = 0.0;
        for (unsigned i = 0; i <= levels; ++i) {
            double term = log_choose_levels[i] + log_choose_ek;
            if (k > 0) {
                if (std::isinf(log_r[i])) {
                    continue; // r = 0 never produces a hit
                }
                term += kd * log_r[i];
            }
            if (rest > 0) {
                const double r = std::exp(log_r[i]);
                if (r >= 1.0) {
                    continue; // r = 1 always hits
                }
                term += rest * std::log1p(-r);
            }
            sum += std::exp(term);
        }
        out[k] = sum;
    }
    return out;
}

QuadrantRatios mle_quadrant_ratios(std::span<const Edge> edges, const ShapePlan& shape) {
    if (edges.empty()) {
        throw FitError("quadrant ratio estimation needs at least one edge");
    }
    std::array<double, 4> count{0.0, 0.0, 0.0, 0.0};
    for (const auto& e : edges) {
        for (unsigned level = 0; level < shape.square_levels; ++level) {
            const auto row_bit = (e.src >> (shape.n - 1 - level)) & 1U;
            const auto col_bit = (e.dst >> (shape.m - 1 - level)) & 1U;
            count[row_bit * 2 + col_bit] += 1.0;
        }
    }
    QuadrantRatios out;
    const double total = count[0] + count[1] + count[2] + count[3] + 4.0;
    for (std::size_t i = 0; i < 4; ++i) {
        out.frequency[i] = (count[i] + 1.0) / total;
    }
    out.ab = (count[0] + 1.0) / (count[1] + 1.0);
    out.ac = (count[0] + 1.0) / (count[2] + 1.0);
    return out;
}

namespace {

std::vector<double> dense_counts(const DegreeDistribution& dd) {
    std::vector<double> out(dd.max_degree() + 1, 0.0);
    for (auto [k, c] : dd.counts) {
        if (k < out.size()) {
            out[k] = static_cast<double>(c);
        }
    }
    return out;
}

struct MarginalFit {
    double value = 0.5;
    double loss = 0.0;
    bool flat = false;
    bool at_upper_bound = false;
};

// Expected counts assume 2^levels rows; the observed partite has
// node_count rows, so predictions are rescaled to the same total.
MarginalFit fit_marginal(const DegreeDistribution& dd, unsigned levels, std::uint64_t edges) {
    const auto observed = dense_counts(dd);
    const std::uint64_t k_max = observed.size() - 1;
    const double scale = static_cast<double>(dd.node_count()) / std::ldexp(1.0, static_cast<int>(levels));
    auto loss = [&](double x) {
        const auto expected = expected_degree_counts(x, levels, edges, k_max);
        double sum = 0.0;
        for (std::size_t k = 0; k < observed.size(); ++k) {
            const double diff = observed[k] - scale * expected[k];
            sum += diff * diff;
        }
        return sum;
    };

    // The loss is symmetric under x -> 1 - x, so search [0.5, upper].
    constexpr double lower = 0.5;
    constexpr double upper = 0.999;
    constexpr int grid = 50;
    std::vector<double> values(grid + 1);
    for (int j = 0; j <= grid; ++j) {
        values[j] = loss(lower + (upper - lower) * j / grid);
    }
    const auto best = static_cast<int>(std::min_element(values.begin(), values.end()) - values.begin());
    const double lo_val = *std::min_element(values.begin(), values.end());
    const double hi_val = *std::max_element(values.begin(), values.end());
    MarginalFit fit;
    if (hi_val - lo_val <= 1e-12 * (1.0 + lo_val)) {
        fit.value = lower;
        fit.loss = lo_val;
        fit.flat = true;
        return fit;
    }

    // Golden-section refinement inside the bracketing grid cells.
    double a = lower + (upper - lower) * std::max(0, best - 1) / grid;
    double b = lower + (upper - lower) * std::min(grid, best + 1) / grid;
    constexpr double inv_phi = 0.6180339887498949;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = loss(x1);
    double f2 = loss(x2);
    while (b - a > 1e-4) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = loss(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = loss(x2);
        }
    }
    fit.value = 0.5 * (a + b);
    fit.loss = loss(fit.value);
    if (values[best] < fit.loss) {
        fit.value = lower + (upper - lower) * best / grid;
        fit.loss = values[best];
    }
    fit.at_upper_bound = fit.value >= upper - 1e-3;
    return fit;
}

} // namespace

SeedFit fit_seed(const DegreeDistribution& out, const DegreeDistribution& in, const ShapePlan& shape,
                 std::uint64_t edges, const QuadrantRatios& ratios) {
    if (edges == 0) {
        throw FitError("seed fitting needs at least one edge");
    }
    SeedFit fit;
    const auto p_fit = fit_marginal(out, shape.n, edges);
    const auto q_fit = fit_marginal(in, shape.m, edges);
    fit.p = p_fit.value;
    fit.q = q_fit.value;
    fit.loss_out = p_fit.loss;
    fit.loss_in = q_fit.loss;
    if (p_fit.flat) {
        fit.diagnostics.emplace_back("out-degree counts do not constrain p; clamped to 0.5");
    }
    if (q_fit.flat) {
        fit.diagnostics.emplace_back("in-degree counts do not constrain q; clamped to 0.5");
    }
    if (p_fit.at_upper_bound) {
        fit.diagnostics.emplace_back("p reached the upper search bound");
    }
    if (q_fit.at_upper_bound) {
        fit.diagnostics.emplace_back("q reached the upper search bound");
    }

    // Residuals a - r_ab * b and a - r_ac * c are linear in a.
    const double p = fit.p;
    const double q = fit.q;
    const double rb = ratios.ab;
    const double rc = ratios.ac;
    double a = ((1.0 + rb) * rb * p + (1.0 + rc) * rc * q) / ((1.0 + rb) * (1.0 + rb) + (1.0 + rc) * (1.0 + rc));
    const double a_lo = std::max(0.0, p + q - 1.0);
    const double a_hi = std::min(p, q);
    if (a < a_lo || a > a_hi) {
        fit.diagnostics.emplace_back("quadrant ratios infeasible for fitted p, q; a clamped to feasible range");
        a = std::clamp(a, a_lo, a_hi);
    }
    fit.seed.a = a;
    fit.seed.b = std::max(0.0, p - a);
    fit.seed.c = std::max(0.0, q - a);
    fit.seed.d = std::max(0.0, 1.0 - fit.seed.a - fit.seed.b - fit.seed.c);
    return fit;
}

SeedModel fit_seed_model(const PartiteGraph& g, std::size_t edge_type, double noise_strength, SeedFit* fit_out) {
    const auto& type = g.edge_types.at(edge_type);
    SeedModel model;
    model.rows = g.partites.at(type.src_partite).size;
    model.cols = g.partites.at(type.dst_partite).size;
    model.edges = g.edges.at(edge_type).size();
    model.shape = plan_shape(model.rows, model.cols);
    model.noise.strength = noise_strength;
    model.ratios = mle_quadrant_ratios(g.edges[edge_type], model.shape);
    auto fit = fit_seed(degree_distribution(g, edge_type, Direction::out),
                        degree_distribution(g, edge_type, Direction::in), model.shape, model.edges, model.ratios);
    model.seed = fit.seed;
    if (fit_out) {
        *fit_out = std::move(fit);
    }
    return model;
}

double noise_bound(const SeedMatrix& seed) {
    return std::min({(seed.a + seed.d) / 2.0, seed.b, seed.c});
}

SeedMatrix perturb(const SeedMatrix& seed, double noise_factor) {
    const double diag = seed.a + seed.d;
    if (diag <= 0.0 || noise_factor == 0.0) {
        return seed;
    }
    SeedMatrix out;
    out.a = seed.a - 2.0 * noise_factor * seed.a / diag;
    out.b = seed.b + noise_factor;
    out.c = seed.c + noise_factor;
    out.d = seed.d - 2.0 * noise_factor * seed.d / diag;
    return out;
}

std::vector<double> draw_noise_factors(const SeedMatrix& seed, double strength, unsigned levels, Engine& engine) {
    if (!(strength >= 0.0 && strength <= 1.0)) {
        throw ConfigError("noise strength must lie in [0, 1]");
    }
    const double bound = seed.a + seed.d > 0.0 ? strength * noise_bound(seed) : 0.0;
    std::vector<double> factors(levels);
    for (auto& f : factors) {
        f = uniform01(engine) * bound;
    }
    return factors;
}

std::vector<SeedMatrix> sample_noise(const SeedMatrix& seed, double strength, unsigned levels, Engine& engine) {
    std::vector<SeedMatrix> out;
    for (double f : draw_noise_factors(seed, strength, levels, engine)) {
        out.push_back(perturb(seed, f));
    }
    return out;
}

Cascade::Cascade(const ShapePlan& shape, std::span<const SeedMatrix> level_seeds) : shape_(shape) {
    if (level_seeds.size() != shape.levels()) {
        throw ConfigError("cascade needs one seed per level");
    }
    for (unsigned level = 0; level < shape.levels(); ++level) {
        const auto& s = level_seeds[level];
        if (level < shape.square_levels) {
            levels_.push_back({s.a, s.a + s.b, s.a + s.b + s.c});
        } else if (shape.row_pad_levels > 0) {
            levels_.push_back({s.p(), 0.0, 0.0});
        } else {
            levels_.push_back({s.q(), 0.0, 0.0});
        }
    }
}

Cascade::Cascade(const ShapePlan& shape, const SeedMatrix& seed)
    : Cascade(shape, std::vector<SeedMatrix>(shape.levels(), seed)) {}

std::pair<std::uint64_t, std::uint64_t> Cascade::draw(Engine& engine) const {
    std::uint64_t row = 0;
    std::uint64_t col = 0;
    unsigned level = 0;
    for (; level < shape_.square_levels; ++level) {
        const double u = uniform01(engine);
        const auto& t = levels_[level];
        const std::uint64_t quadrant = u < t.t0 ? 0 : u < t.t1 ? 1 : u < t.t2 ? 2 : 3;
        row = (row << 1) | (quadrant >> 1);
        col = (col << 1) | (quadrant & 1U);
    }
    if (shape_.row_pad_levels > 0) {
        for (; level < shape_.levels(); ++level) {
            row = (row << 1) | (uniform01(engine) < levels_[level].t0 ? 0U : 1U);
        }
    } else {
        for (; level < shape_.levels(); ++level) {
            col = (col << 1) | (uniform01(engine) < levels_[level].t0 ? 0U : 1U);
        }
    }
    return {row, col};
}

namespace {

constexpr std::uint64_t kSampleTag = 0x5e1d;

void check_capacity(std::uint64_t rows, std::uint64_t cols, std::uint64_t edges) {
    if (static_cast<unsigned __int128>(rows) * cols < edges) {
        throw CapacityError("requested " + std::to_string(edges) + " edges exceed the " + std::to_string(rows) + " x " +
                            std::to_string(cols) + " capacity");
    }
    if (ceil_log2(rows) + ceil_log2(cols) > 63) {
        throw CapacityError("grid too large for 64-bit cell keys");
    }
}

// Rejection sampling of distinct cells. Each round splits the outstanding
// count across `workers` streams keyed by (seed, worker, round); candidates
// are merged into the accepted set in one pass. Draw returns nullopt for an
// out-of-range cell.
template <class Draw, class Merge>
std::vector<std::uint64_t> sample_distinct(std::uint64_t edges, std::uint64_t seed, unsigned workers, Draw&& draw,
                                           Merge&& merge, bool use_threads) {
    workers = std::max(1U, workers);
    const std::uint64_t budget = std::max<std::uint64_t>(100 * edges, 1000);
    std::uint64_t spent = 0;
    std::vector<std::uint64_t> accepted;
    std::vector<std::vector<std::uint64_t>> candidates(workers);
    std::vector<std::uint64_t> used(workers);
    for (std::uint64_t round = 0; accepted.size() < edges; ++round) {
        const std::uint64_t needed = edges - accepted.size();
        const std::uint64_t remaining = budget - spent;
        if (remaining == 0) {
            throw CapacityError("edge sampling gave up after " + std::to_string(budget) +
                                " draws; the graph is too dense for its grid, request fewer edges");
        }
        auto work = [&](unsigned w) {
            const std::uint64_t share = needed / workers + (w < needed % workers ? 1 : 0);
            const std::uint64_t cap = remaining / workers + (w < remaining % workers ? 1 : 0);
            auto& out = candidates[w];
            out.clear();
            out.reserve(share);
            used[w] = 0;
            if (share == 0) {
                return;
            }
            Engine engine = make_stream(seed, w, round, kSampleTag);
            while (out.size() < share && used[w] < cap) {
                ++used[w];
                if (auto key = draw(engine)) {
                    out.push_back(*key);
                }
            }
        };
        if (use_threads) {
#pragma omp parallel for schedule(dynamic, 1)
            for (int w = 0; w < static_cast<int>(workers); ++w) {
                work(static_cast<unsigned>(w));
            }
        } else {
            for (unsigned w = 0; w < workers; ++w) {
                work(w);
            }
        }
        for (auto u : used) {
            spent += u;
        }
        merge(accepted, candidates);
    }
    return accepted;
}

void merge_sorted(std::vector<std::uint64_t>& accepted, std::vector<std::vector<std::uint64_t>>& candidates) {
#pragma omp parallel for schedule(dynamic, 1)
    for (int w = 0; w < static_cast<int>(candidates.size()); ++w) {
        std::sort(candidates[w].begin(), candidates[w].end());
    }
    std::vector<std::uint64_t> fresh;
    for (const auto& c : candidates) {
        const auto mid = static_cast<std::ptrdiff_t>(fresh.size());
        fresh.insert(fresh.end(), c.begin(), c.end());
        std::inplace_merge(fresh.begin(), fresh.begin() + mid, fresh.end());
    }
    fresh.erase(std::unique(fresh.begin(), fresh.end()), fresh.end());
    std::vector<std::uint64_t> novel;
    novel.reserve(fresh.size());
    std::set_difference(fresh.begin(), fresh.end(), accepted.begin(), accepted.end(), std::back_inserter(novel));
    const auto mid = static_cast<std::ptrdiff_t>(accepted.size());
    accepted.insert(accepted.end(), novel.begin(), novel.end());
    std::inplace_merge(accepted.begin(), accepted.begin() + mid, accepted.end());
}

// Reference merge: an ordered set, inserted candidate by candidate.
void merge_with_set(std::vector<std::uint64_t>& accepted, std::vector<std::vector<std::uint64_t>>& candidates) {
    std::set<std::uint64_t> all(accepted.begin(), accepted.end());
    for (const auto& c : candidates) {
        for (auto key : c) {
            all.insert(key);
        }
    }
    accepted.assign(all.begin(), all.end());
}

std::vector<Edge> unpack(const std::vector<std::uint64_t>& keys, unsigned col_bits) {
    std::vector<Edge> out(keys.size());
    const std::uint64_t mask = col_bits == 0 ? 0 : (~std::uint64_t{0} >> (64 - col_bits));
    for (std::size_t i = 0; i < keys.size(); ++i) {
        out[i] = {keys[i] >> col_bits, keys[i] & mask};
    }
    return out;
}

std::vector<SeedMatrix> level_seeds(const SeedModel& model) {
    const unsigned levels = model.shape.levels();
    if (model.noise.level_noise.empty()) {
        return std::vector<SeedMatrix>(levels, model.seed);
    }
    if (model.noise.level_noise.size() != levels) {
        throw ConfigError("level noise has " + std::to_string(model.noise.level_noise.size()) + " entries, expected " +
                          std::to_string(levels));
    }
    std::vector<SeedMatrix> out;
    for (double f : model.noise.level_noise) {
        out.push_back(perturb(model.seed, f));
    }
    return out;
}

template <class Merge>
std::vector<Edge> sample_model(const SeedModel& model, std::uint64_t edges, std::uint64_t seed, unsigned workers,
                               Merge&& merge, bool use_threads) {
    check_capacity(model.rows, model.cols, edges);
    if (model.shape != plan_shape(model.rows, model.cols)) {
        throw ConfigError("model shape does not match its node counts");
    }
    const auto seeds = level_seeds(model);
    const Cascade cascade(model.shape, seeds);
    const unsigned col_bits = model.shape.m;
    const auto rows = model.rows;
    const auto cols = model.cols;
    auto draw = [&](Engine& engine) -> std::optional<std::uint64_t> {
        auto [r, c] = cascade.draw(engine);
        if (r >= rows || c >= cols) {
            return std::nullopt;
        }
        return (r << col_bits) | c;
    };
    return unpack(sample_distinct(edges, seed, workers, draw, merge, use_threads), col_bits);
}

template <class Merge>
std::vector<Edge> sample_uniform(std::uint64_t rows, std::uint64_t cols, std::uint64_t edges, std::uint64_t seed,
                                 unsigned workers, Merge&& merge, bool use_threads) {
    check_capacity(rows, cols, edges);
    const unsigned col_bits = ceil_log2(cols);
    auto draw = [&](Engine& engine) -> std::optional<std::uint64_t> {
        const auto r = uniform_below(engine, rows);
        const auto c = uniform_below(engine, cols);
        return (r << col_bits) | c;
    };
    return unpack(sample_distinct(edges, seed, workers, draw, merge, use_threads), col_bits);
}

} // namespace

std::vector<Edge> sample_edges(const SeedModel& model, std::uint64_t edges, std::uint64_t seed, unsigned workers) {
    return sample_model(model, edges, seed, workers, merge_sorted, true);
}

std::vector<Edge> sample_uniform_edges(std::uint64_t rows, std::uint64_t cols, std::uint64_t edges, std::uint64_t seed,
                                       unsigned workers) {
    return sample_uniform(rows, cols, edges, seed, workers, merge_sorted, true);
}

namespace serial {

std::vector<Edge> sample_edges(const SeedModel& model, std::uint64_t edges, std::uint64_t seed, unsigned workers) {
    return sample_model(model, edges, seed, workers, merge_with_set, false);
}

std::vector<Edge> sample_uniform_edges(std::uint64_t rows, std::uint64_t cols, std::uint64_t edges, std::uint64_t seed,
                                       unsigned workers) {
    return sample_uniform(rows, cols, edges, seed, workers, merge_with_set, false);
}

} // namespace serial

SeedModel scale_model(const SeedModel& model, double scale) {
    if (!(scale > 0.0) || !std::isfinite(scale)) {
        throw ConfigError("scale factor must be positive");
    }
    SeedModel out = model;
    const double root = std::sqrt(scale);
    out.rows = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::llround(root * static_cast<double>(model.rows))));
    out.cols = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::llround(root * static_cast<double>(model.cols))));
    out.edges = static_cast<std::uint64_t>(std::llround(scale * static_cast<double>(model.edges)));
    out.shape = plan_shape(out.rows, out.cols);
    if (out.shape != model.shape) {
        out.noise.level_noise.clear();
    }
    check_capacity(out.rows, out.cols, out.edges);
    return out;
}

} // namespace syngraph
