#include "syngraph/error.hpp"
#include "syngraph/gbdt.hpp"
#include "syngraph/rng.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace syngraph;

namespace {

struct Data {
    std::vector<double> x;
    std::vector<double> y;
};

// Three input columns; y = f(row, noise).
template <class F>
Data make_data(std::size_t n, std::uint64_t seed, F&& f) {
    Engine engine = make_stream(seed);
    Data d;
    for (std::size_t i = 0; i < n; ++i) {
        const double a = std::floor(uniform01(engine) * 50.0);
        const double b = uniform01(engine);
        const double c = standard_normal(engine);
        d.x.insert(d.x.end(), {a, b, c});
        d.y.push_back(f(a, b, c, standard_normal(engine)));
    }
    return d;
}

double r_squared(const GradientBoostedEnsemble& model, const Data& d) {
    double mean = 0.0;
    for (double v : d.y) {
        mean += v;
    }
    mean /= static_cast<double>(d.y.size());
    double ss_res = 0.0;
    double ss_tot = 0.0;
    for (std::size_t i = 0; i < d.y.size(); ++i) {
        const double p = model.predict(std::span<const double>(d.x).subspan(i * 3, 3));
        ss_res += (d.y[i] - p) * (d.y[i] - p);
        ss_tot += (d.y[i] - mean) * (d.y[i] - mean);
    }
    return 1.0 - ss_res / ss_tot;
}

} // namespace

TEST(Gbdt, PlantedRelationGeneralizes) {
    auto f = [](double a, double, double, double) { return 2.0 * a; };
    const auto train = make_data(4000, 1, f);
    const auto test = make_data(2000, 2, f);
    const auto model = fit_gbdt(train.x, 3, train.y);
    EXPECT_GT(r_squared(model, test), 0.95);
    EXPECT_EQ(model.trees.size(), 100U);
    // a training row is predicted within 10%
    const double p = model.predict(std::span<const double>(train.x).subspan(0, 3));
    EXPECT_NEAR(p, train.y[0], 0.1 * std::max(1.0, std::abs(train.y[0])));
}

TEST(Gbdt, NoiseDoesNotGeneralize) {
    auto f = [](double, double, double, double e) { return e; };
    const auto train = make_data(4000, 3, f);
    const auto test = make_data(2000, 4, f);
    EXPECT_LT(r_squared(fit_gbdt(train.x, 3, train.y), test), 0.1);
}

TEST(Gbdt, ConstantTarget) {
    const std::vector<double> x{1, 2, 3, 4, 5, 6};
    const std::vector<double> y{4.5, 4.5, 4.5, 4.5, 4.5, 4.5};
    const auto model = fit_gbdt(x, 1, y);
    for (double v : x) {
        EXPECT_DOUBLE_EQ(model.predict(std::span<const double>(&v, 1)), 4.5);
    }
}

TEST(Gbdt, ZeroTreesPredictBase) {
    GbdtParams params;
    params.trees = 0;
    const std::vector<double> x{1, 2, 3, 4};
    const std::vector<double> y{1, 2, 3, 6};
    const auto model = fit_gbdt(x, 1, y, params);
    EXPECT_TRUE(model.trees.empty());
    EXPECT_DOUBLE_EQ(model.base_score, 3.0);
    for (double v : x) {
        EXPECT_DOUBLE_EQ(model.predict(std::span<const double>(&v, 1)), 3.0);
    }
}

TEST(Gbdt, SingleStumpFindsTheStep) {
    GbdtParams params;
    params.trees = 1;
    params.max_depth = 1;
    params.learning_rate = 1.0;
    params.alpha = 0.0;
    params.lambda = 0.0;
    std::vector<double> x;
    std::vector<double> y;
    for (int i = 0; i < 10; ++i) {
        x.push_back(i);
        y.push_back(i < 5 ? 0.0 : 10.0);
    }
    const auto model = fit_gbdt(x, 1, y, params);
    ASSERT_EQ(model.trees.size(), 1U);
    ASSERT_EQ(model.trees[0].nodes.size(), 3U);
    EXPECT_EQ(model.trees[0].nodes[0].feature, 0);
    EXPECT_DOUBLE_EQ(model.trees[0].nodes[0].threshold, 4.5);
    for (int i = 0; i < 10; ++i) {
        const double v = i;
        EXPECT_DOUBLE_EQ(model.predict(std::span<const double>(&v, 1)), y[static_cast<std::size_t>(i)]);
    }
}

TEST(Gbdt, L1ShrinksLeafWeights) {
    // Leaf weight is -soft(G, alpha) / (H + lambda): with two rows per side
    // and residuals of +-1 the gradient sums are 2, below alpha = 10.
    const std::vector<double> x{0, 1, 2, 3};
    const std::vector<double> y{-1, -1, 1, 1};
    GbdtParams params;
    params.trees = 5;
    const auto shrunk = fit_gbdt(x, 1, y, params);
    for (double v : x) {
        EXPECT_DOUBLE_EQ(shrunk.predict(std::span<const double>(&v, 1)), 0.0);
    }
    params.alpha = 0.0;
    const auto free = fit_gbdt(x, 1, y, params);
    const double lo = 0.0;
    EXPECT_LT(free.predict(std::span<const double>(&lo, 1)), -0.1);
}

TEST(Gbdt, DeterministicGivenSeed) {
    auto f = [](double a, double b, double, double e) { return a * b + e; };
    const auto d = make_data(30000, 5, f);
    EXPECT_EQ(fit_gbdt(d.x, 3, d.y, {}, 7), fit_gbdt(d.x, 3, d.y, {}, 7));
}

TEST(Gbdt, Errors) {
    const std::vector<double> x{1, 2, 3};
    const std::vector<double> y{1, 2};
    EXPECT_THROW(fit_gbdt(x, 1, y), ConfigError);
    EXPECT_THROW(fit_gbdt(std::vector<double>{}, 1, std::vector<double>{}), FitError);
}
