#include "syngraph/features.hpp"

#include "syngraph/error.hpp"
#include "syngraph/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <optional>

namespace syngraph {

namespace {

constexpr std::size_t kChunk = 1024;
constexpr double kLog2Pi = 1.8378770664093453;

// Diagonal Gaussian mixture over n x d row-major data.
struct DiagGmm {
    std::size_t k = 0;
    std::size_t d = 0;
    std::vector<double> weight;
    std::vector<double> mean; // k x d
    std::vector<double> var;  // k x d
    double loglik = -std::numeric_limits<double>::infinity();
};

std::vector<std::size_t> sample_indices(std::size_t n, std::size_t cap, Engine& engine) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    if (n <= cap) {
        return idx;
    }
    for (std::size_t i = 0; i < cap; ++i) {
        std::swap(idx[i], idx[i + uniform_below(engine, n - i)]);
    }
    idx.resize(cap);
    std::sort(idx.begin(), idx.end());
    return idx;
}

// Per-component constants of the current parameters.
struct Precomputed {
    std::vector<double> log_norm; // log w - 0.5 sum (log 2 pi + log var)
    std::vector<double> inv_var;
};

Precomputed precompute(const DiagGmm& g) {
    Precomputed p;
    p.log_norm.resize(g.k);
    p.inv_var.resize(g.k * g.d);
    for (std::size_t c = 0; c < g.k; ++c) {
        double lp = std::log(g.weight[c]);
        for (std::size_t j = 0; j < g.d; ++j) {
            lp -= 0.5 * (kLog2Pi + std::log(g.var[c * g.d + j]));
            p.inv_var[c * g.d + j] = 1.0 / g.var[c * g.d + j];
        }
        p.log_norm[c] = lp;
    }
    return p;
}

// Responsibilities of row x written to `resp`; returns the row's log density.
double component_logs(const DiagGmm& g, const Precomputed& pre, const double* x, std::vector<double>& resp) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < g.k; ++c) {
        double q = 0.0;
        const double* mean = g.mean.data() + c * g.d;
        const double* inv = pre.inv_var.data() + c * g.d;
        for (std::size_t j = 0; j < g.d; ++j) {
            const double diff = x[j] - mean[j];
            q += diff * diff * inv[j];
        }
        resp[c] = pre.log_norm[c] - 0.5 * q;
        best = std::max(best, resp[c]);
    }
    double sum = 0.0;
    for (std::size_t c = 0; c < g.k; ++c) {
        resp[c] = std::exp(resp[c] - best);
        sum += resp[c];
    }
    for (std::size_t c = 0; c < g.k; ++c) {
        resp[c] /= sum;
    }
    return best + std::log(sum);
}

std::optional<std::vector<double>> kmeanspp(const std::vector<double>& x, std::size_t n, std::size_t d, std::size_t k,
                                            Engine& engine) {
    std::vector<double> centers;
    centers.reserve(k * d);
    const std::size_t first = uniform_below(engine, n);
    centers.insert(centers.end(), x.begin() + static_cast<std::ptrdiff_t>(first * d),
                   x.begin() + static_cast<std::ptrdiff_t>((first + 1) * d));
    std::vector<double> dist(n, std::numeric_limits<double>::infinity());
    for (std::size_t c = 1; c < k; ++c) {
        const double* center = centers.data() + (c - 1) * d;
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < d; ++j) {
                const double diff = x[i * d + j] - center[j];
                s += diff * diff;
            }
            dist[i] = std::min(dist[i], s);
            total += dist[i];
        }
        if (!(total > 0.0)) {
            return std::nullopt; // fewer distinct points than components
        }
        double target = uniform01(engine) * total;
        std::size_t pick = n - 1;
        for (std::size_t i = 0; i < n; ++i) {
            target -= dist[i];
            if (target < 0.0) {
                pick = i;
                break;
            }
        }
        centers.insert(centers.end(), x.begin() + static_cast<std::ptrdiff_t>(pick * d),
                       x.begin() + static_cast<std::ptrdiff_t>((pick + 1) * d));
    }
    return centers;
}

std::optional<DiagGmm> fit_diag_gmm(const std::vector<double>& x, std::size_t n, std::size_t d, std::size_t k,
                                    const std::vector<double>& var_floor, Engine& engine, int max_iterations,
                                    double tolerance) {
    auto centers = kmeanspp(x, n, d, k, engine);
    if (!centers) {
        return std::nullopt;
    }
    DiagGmm g;
    g.k = k;
    g.d = d;
    g.weight.assign(k, 1.0 / static_cast<double>(k));
    g.mean = std::move(*centers);
    g.var.resize(k * d);
    // Start every component at the pooled variance.
    for (std::size_t j = 0; j < d; ++j) {
        double mu = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            mu += x[i * d + j];
        }
        mu /= static_cast<double>(n);
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            s += (x[i * d + j] - mu) * (x[i * d + j] - mu);
        }
        const double v = std::max(s / static_cast<double>(n), var_floor[j]);
        for (std::size_t c = 0; c < k; ++c) {
            g.var[c * d + j] = v;
        }
    }

    const std::size_t chunks = (n + kChunk - 1) / kChunk;
    // Per chunk: [resp sum (k) | sum x (k*d) | sum x^2 (k*d) | loglik]
    const std::size_t stride = k + 2 * k * d + 1;
    std::vector<double> partial(chunks * stride);
    double previous = -std::numeric_limits<double>::infinity();
    for (int iter = 0; iter < max_iterations; ++iter) {
        const auto pre = precompute(g);
#pragma omp parallel for schedule(static)
        for (std::int64_t ch = 0; ch < static_cast<std::int64_t>(chunks); ++ch) {
            double* acc = partial.data() + static_cast<std::size_t>(ch) * stride;
            std::fill(acc, acc + stride, 0.0);
            std::vector<double> resp(k);
            const std::size_t end = std::min(n, static_cast<std::size_t>(ch + 1) * kChunk);
            for (std::size_t i = static_cast<std::size_t>(ch) * kChunk; i < end; ++i) {
                const double* row = x.data() + i * d;
                acc[stride - 1] += component_logs(g, pre, row, resp);
                for (std::size_t c = 0; c < k; ++c) {
                    acc[c] += resp[c];
                    for (std::size_t j = 0; j < d; ++j) {
                        acc[k + c * d + j] += resp[c] * row[j];
                        acc[k + k * d + c * d + j] += resp[c] * row[j] * row[j];
                    }
                }
            }
        }
        std::vector<double> total(stride, 0.0);
        for (std::size_t ch = 0; ch < chunks; ++ch) {
            for (std::size_t s = 0; s < stride; ++s) {
                total[s] += partial[ch * stride + s];
            }
        }
        const double loglik = total[stride - 1];
        g.loglik = loglik;
        for (std::size_t c = 0; c < k; ++c) {
            const double nk = std::max(total[c], 1e-12);
            g.weight[c] = std::max(total[c] / static_cast<double>(n), 1e-12);
            for (std::size_t j = 0; j < d; ++j) {
                const double mu = total[k + c * d + j] / nk;
                const double ex2 = total[k + k * d + c * d + j] / nk;
                g.mean[c * d + j] = mu;
                g.var[c * d + j] = std::max(ex2 - mu * mu, var_floor[j]);
            }
        }
        const double wsum = std::accumulate(g.weight.begin(), g.weight.end(), 0.0);
        for (auto& w : g.weight) {
            w /= wsum;
        }
        if (std::abs(loglik - previous) <= tolerance * static_cast<double>(n)) {
            break;
        }
        previous = loglik;
    }
    // Log-likelihood under the final parameters.
    double loglik = 0.0;
    std::vector<double> resp(k);
    const auto pre = precompute(g);
    for (std::size_t i = 0; i < n; ++i) {
        loglik += component_logs(g, pre, x.data() + i * d, resp);
    }
    g.loglik = loglik;
    return g;
}

double sample_variance(std::span<const double> values) {
    if (values.empty()) {
        return 0.0;
    }
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
    double s = 0.0;
    for (double v : values) {
        s += (v - mean) * (v - mean);
    }
    return s / static_cast<double>(values.size());
}

double variance_floor(double variance, double mean) {
    return variance > 0.0 ? 1e-6 * variance : 1e-12 * std::max(1.0, mean * mean);
}

std::size_t pick(std::span<const double> weights, double u) {
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        acc += weights[i];
        if (u < acc) {
            return i;
        }
    }
    return weights.size() - 1;
}

} // namespace

ContinuousNormalizer fit_normalizer(std::span<const double> values, std::uint64_t seed,
                                    const NormalizerOptions& options) {
    if (values.empty()) {
        throw FitError("normalizer needs at least one value");
    }
    for (double v : values) {
        if (!std::isfinite(v)) {
            throw DataError("normalizer input contains a non-finite value");
        }
    }
    ContinuousNormalizer out;
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    const double variance = sample_variance(values);
    if (*lo == *hi) {
        out.constant = true;
        out.modes.push_back({1.0, *lo, variance_floor(0.0, *lo)});
        return out;
    }
    if (values.size() < 10) {
        out.modes.push_back({1.0, mean, std::max(variance, variance_floor(variance, mean))});
        return out;
    }

    Engine engine = make_stream(seed, 0, 0, 0x17);
    const auto idx = sample_indices(values.size(), options.max_samples, engine);
    std::vector<double> x(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) {
        x[i] = values[idx[i]];
    }
    const std::vector<double> floor{variance_floor(variance, mean)};
    const double n = static_cast<double>(x.size());
    std::optional<DiagGmm> best;
    double best_bic = std::numeric_limits<double>::infinity();
    for (unsigned k = 1; k <= options.max_modes && k <= x.size(); ++k) {
        auto g = fit_diag_gmm(x, x.size(), 1, k, floor, engine, options.max_iterations, options.tolerance);
        if (!g) {
            break;
        }
        const double bic = -2.0 * g->loglik + (3.0 * k - 1.0) * std::log(n);
        if (bic < best_bic) {
            best_bic = bic;
            best = std::move(g);
        }
    }
    for (std::size_t c = 0; c < best->k; ++c) {
        out.modes.push_back({best->weight[c], best->mean[c], best->var[c]});
    }
    std::sort(out.modes.begin(), out.modes.end(),
              [](const GaussianMode& a, const GaussianMode& b) { return a.mean < b.mean; });
    return out;
}

NormalizedValue normalize(double value, const ContinuousNormalizer& normalizer) {
    NormalizedValue out;
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < normalizer.modes.size(); ++k) {
        const auto& m = normalizer.modes[k];
        const double diff = value - m.mean;
        const double lp = std::log(m.weight) - 0.5 * (std::log(m.variance) + diff * diff / m.variance);
        if (lp > best) {
            best = lp;
            out.mode = k;
        }
    }
    const auto& m = normalizer.modes[out.mode];
    out.scalar = std::clamp((value - m.mean) / (4.0 * std::sqrt(m.variance)), -1.0, 1.0);
    return out;
}

double denormalize(const NormalizedValue& value, const ContinuousNormalizer& normalizer) {
    const auto& m = normalizer.modes.at(value.mode);
    if (normalizer.constant) {
        return m.mean;
    }
    return m.mean + value.scalar * 4.0 * std::sqrt(m.variance);
}

std::size_t embedding_size(std::size_t vocabulary_size) {
    if (vocabulary_size == 0) {
        throw ConfigError("embedding size needs a non-empty vocabulary");
    }
    const double width = std::round(1.6 * std::pow(static_cast<double>(vocabulary_size), 0.56));
    return static_cast<std::size_t>(std::min(600.0, width));
}

std::string_view to_string(FeatureBackend backend) {
    return backend == FeatureBackend::mixture ? "mixture" : "independent";
}

FeatureBackend feature_backend_from_string(std::string_view text) {
    if (text == "mixture") {
        return FeatureBackend::mixture;
    }
    if (text == "independent" || text == "random") {
        return FeatureBackend::independent;
    }
    throw ConfigError("unknown feature backend '" + std::string(text) + "'");
}

std::vector<std::size_t> FeatureModel::continuous_columns() const {
    std::vector<std::size_t> out;
    for (std::size_t c = 0; c < schema.size(); ++c) {
        if (!schema[c].is_categorical()) {
            out.push_back(c);
        }
    }
    return out;
}

FeatureModel fit_feature_model(const FeatureTable& table, FeatureBackend backend, std::uint64_t seed,
                               const FeatureModelOptions& options) {
    const std::size_t rows = table.num_rows();
    if (rows == 0) {
        throw FitError("feature model needs a non-empty table");
    }
    table.validate();
    FeatureModel model;
    model.schema = table.schema();
    model.backend = backend;
    const std::size_t cols = table.num_cols();
    model.normalizers.resize(cols);
    const auto cont = model.continuous_columns();

#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t j = 0; j < static_cast<std::int64_t>(cont.size()); ++j) {
        const auto c = cont[static_cast<std::size_t>(j)];
        const auto column = table.column(c);
        model.normalizers[c] = fit_normalizer(column, seed + c, options.normalizer);
    }

    // Discrete code of every (row, column): vocabulary code or mode index.
    auto discrete_size = [&](std::size_t c) {
        return model.schema[c].is_categorical() ? model.schema[c].vocabulary.size() : model.normalizers[c].modes.size();
    };
    std::vector<std::uint32_t> codes(rows * cols);
    std::vector<double> scalars(rows * cont.size());
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t j = 0; j < cont.size(); ++j) {
            const auto nv = normalize(table.value(r, cont[j]), model.normalizers[cont[j]]);
            codes[r * cols + cont[j]] = static_cast<std::uint32_t>(nv.mode);
            scalars[r * cont.size() + j] = nv.scalar;
        }
        for (std::size_t c = 0; c < cols; ++c) {
            if (model.schema[c].is_categorical()) {
                codes[r * cols + c] = table.code(r, c);
            }
        }
    }

    if (backend == FeatureBackend::independent) {
        model.marginals.resize(cols);
        for (std::size_t c = 0; c < cols; ++c) {
            if (!model.schema[c].is_categorical()) {
                continue;
            }
            auto& freq = model.marginals[c];
            freq.assign(discrete_size(c), 0.0);
            for (std::size_t r = 0; r < rows; ++r) {
                freq[codes[r * cols + c]] += 1.0;
            }
            for (auto& f : freq) {
                f /= static_cast<double>(rows);
            }
        }
        return model;
    }

    const std::size_t d = cont.size();
    DiagGmm chosen;
    if (d == 0) {
        chosen.k = 1;
        chosen.weight = {1.0};
    } else {
        Engine engine = make_stream(seed, 0, 0, 0x3e);
        const auto idx = sample_indices(rows, options.max_samples, engine);
        std::vector<double> x(idx.size() * d);
        for (std::size_t i = 0; i < idx.size(); ++i) {
            std::copy_n(scalars.begin() + static_cast<std::ptrdiff_t>(idx[i] * d), d,
                        x.begin() + static_cast<std::ptrdiff_t>(i * d));
        }
        std::vector<double> floor(d);
        for (std::size_t j = 0; j < d; ++j) {
            std::vector<double> col(idx.size());
            for (std::size_t i = 0; i < idx.size(); ++i) {
                col[i] = x[i * d + j];
            }
            floor[j] = variance_floor(sample_variance(col), 0.0);
        }
        const double n = static_cast<double>(idx.size());
        double best_bic = std::numeric_limits<double>::infinity();
        for (auto k : options.candidate_components) {
            if (k == 0 || k > idx.size()) {
                continue;
            }
            auto g = fit_diag_gmm(x, idx.size(), d, k, floor, engine, options.max_iterations, options.tolerance);
            if (!g) {
                continue;
            }
            const double params = static_cast<double>(k * 2 * d + (k - 1));
            const double bic = -2.0 * g->loglik + params * std::log(n);
            model.bic.push_back({k, bic});
            if (bic < best_bic) {
                best_bic = bic;
                chosen = std::move(*g);
            }
        }
        if (chosen.k == 0) {
            throw FitError("mixture fit failed for every component count");
        }
    }

    // Categorical tables from responsibilities over every row, Laplace +1.
    const std::size_t k = chosen.k;
    std::vector<double> resp_sum(k, 0.0);
    std::vector<std::vector<std::vector<double>>> counts(k, std::vector<std::vector<double>>(cols));
    for (std::size_t c = 0; c < k; ++c) {
        for (std::size_t col = 0; col < cols; ++col) {
            counts[c][col].assign(discrete_size(col), 0.0);
        }
    }
    std::vector<double> resp(k, 1.0);
    const auto pre = precompute(chosen);
    for (std::size_t r = 0; r < rows; ++r) {
        if (d > 0) {
            component_logs(chosen, pre, scalars.data() + r * d, resp);
        }
        for (std::size_t c = 0; c < k; ++c) {
            resp_sum[c] += resp[c];
            for (std::size_t col = 0; col < cols; ++col) {
                counts[c][col][codes[r * cols + col]] += resp[c];
            }
        }
    }
    for (std::size_t c = 0; c < k; ++c) {
        MixtureComponent comp;
        comp.weight = chosen.weight[c];
        if (d > 0) {
            comp.mean.assign(chosen.mean.begin() + static_cast<std::ptrdiff_t>(c * d),
                             chosen.mean.begin() + static_cast<std::ptrdiff_t>((c + 1) * d));
            comp.variance.assign(chosen.var.begin() + static_cast<std::ptrdiff_t>(c * d),
                                 chosen.var.begin() + static_cast<std::ptrdiff_t>((c + 1) * d));
        }
        for (std::size_t col = 0; col < cols; ++col) {
            auto table_counts = counts[c][col];
            const double denom = resp_sum[c] + static_cast<double>(table_counts.size());
            for (auto& v : table_counts) {
                v = (v + 1.0) / denom;
            }
            comp.tables.push_back(std::move(table_counts));
        }
        model.components.push_back(std::move(comp));
    }
    return model;
}

FeatureTable sample_features(const FeatureModel& model, std::size_t count, std::uint64_t seed, unsigned workers) {
    workers = std::max(1U, workers);
    const std::size_t cols = model.schema.size();
    const auto cont = model.continuous_columns();
    std::vector<double> values(count * cols);
    std::vector<double> comp_weights;
    for (const auto& comp : model.components) {
        comp_weights.push_back(comp.weight);
    }

#pragma omp parallel for schedule(dynamic, 1)
    for (int w = 0; w < static_cast<int>(workers); ++w) {
        const std::size_t begin = count * static_cast<std::size_t>(w) / workers;
        const std::size_t end = count * (static_cast<std::size_t>(w) + 1) / workers;
        Engine engine = make_stream(seed, static_cast<std::uint64_t>(w), 0, 0xfea7);
        std::vector<double> mode_weights;
        for (std::size_t r = begin; r < end; ++r) {
            double* row = values.data() + r * cols;
            if (model.backend == FeatureBackend::independent) {
                for (std::size_t c = 0; c < cols; ++c) {
                    if (model.schema[c].is_categorical()) {
                        row[c] = static_cast<double>(pick(model.marginals[c], uniform01(engine)));
                        continue;
                    }
                    const auto& norm = model.normalizers[c];
                    mode_weights.clear();
                    for (const auto& m : norm.modes) {
                        mode_weights.push_back(m.weight);
                    }
                    const auto& m = norm.modes[pick(mode_weights, uniform01(engine))];
                    const double z = standard_normal(engine);
                    row[c] = norm.constant ? m.mean : m.mean + std::sqrt(m.variance) * z;
                }
                continue;
            }
            const auto& comp = model.components[pick(comp_weights, uniform01(engine))];
            for (std::size_t j = 0; j < cont.size(); ++j) {
                const auto c = cont[j];
                const double z = standard_normal(engine);
                NormalizedValue nv;
                nv.scalar = std::clamp(comp.mean[j] + std::sqrt(comp.variance[j]) * z, -1.0, 1.0);
                nv.mode = pick(comp.tables[c], uniform01(engine));
                row[c] = denormalize(nv, model.normalizers[c]);
            }
            for (std::size_t c = 0; c < cols; ++c) {
                if (model.schema[c].is_categorical()) {
                    row[c] = static_cast<double>(pick(comp.tables[c], uniform01(engine)));
                }
            }
        }
    }

    FeatureTable out(model.schema);
    out.reserve(count);
    for (std::size_t r = 0; r < count; ++r) {
        out.append_row(std::span<const double>(values.data() + r * cols, cols));
    }
    return out;
}

} // namespace syngraph
