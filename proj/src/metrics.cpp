#include "syngraph/metrics.hpp"

#include "syngraph/error.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <unordered_map>

namespace syngraph {

namespace {

struct Curve {
    std::vector<double> log_degree;
    std::vector<double> count;

    [[nodiscard]] double at(double log_x) const {
        if (log_degree.empty() || log_x < log_degree.front() || log_x > log_degree.back()) {
            return 0.0;
        }
        const auto it = std::lower_bound(log_degree.begin(), log_degree.end(), log_x);
        const auto i = static_cast<std::size_t>(it - log_degree.begin());
        if (log_degree[i] == log_x || i == 0) {
            return count[i];
        }
        const double t = (log_x - log_degree[i - 1]) / (log_degree[i] - log_degree[i - 1]);
        return count[i - 1] + t * (count[i] - count[i - 1]);
    }
};

Curve make_curve(const DegreeDistribution& dd, bool normalized) {
    Curve curve;
    double max_count = 0.0;
    for (const auto& [k, c] : dd.counts) {
        if (k > 0 && c > 0) {
            max_count = std::max(max_count, static_cast<double>(c));
        }
    }
    const double max_degree = static_cast<double>(dd.max_degree());
    for (const auto& [k, c] : dd.counts) {
        if (k == 0 || c == 0) {
            continue;
        }
        const double x = normalized ? static_cast<double>(k) / max_degree : static_cast<double>(k);
        curve.log_degree.push_back(std::log(x));
        curve.count.push_back(normalized ? static_cast<double>(c) / max_count : static_cast<double>(c));
    }
    return curve;
}

double dcc_impl(const DegreeDistribution& real, const DegreeDistribution& synth, std::size_t points, bool normalized) {
    if (points == 0) {
        throw ConfigError("dcc needs at least one sample point");
    }
    const Curve c = make_curve(real, normalized);
    const Curve s = make_curve(synth, normalized);
    if (c.count.empty() || s.count.empty()) {
        return c.count.empty() && s.count.empty() ? 0.0 : 1.0;
    }
    const double kmax = static_cast<double>(real.max_degree());
    // normalized axis spans [1 / kmax, 1], raw axis [1, kmax]
    const double lo = normalized ? -std::log(kmax) : 0.0;
    const double hi = normalized ? 0.0 : std::log(kmax);
    double total = 0.0;
    std::size_t used = 0;
    for (std::size_t i = 0; i < points; ++i) {
        const double t = points == 1 ? 1.0 : static_cast<double>(i) / static_cast<double>(points - 1);
        const double x = i + 1 == points ? hi : lo + t * (hi - lo);
        const double cv = c.at(x);
        if (cv > 0.0) {
            total += std::abs(cv - s.at(x)) / cv;
            ++used;
        }
    }
    return used == 0 ? 0.0 : total / static_cast<double>(used);
}

double entropy_of(const std::vector<double>& counts, double n) {
    double h = 0.0;
    for (double c : counts) {
        if (c > 0.0) {
            h -= (c / n) * std::log(c / n);
        }
    }
    return h;
}

std::vector<std::uint32_t> codes_of(const FeatureTable& t, std::size_t col) {
    std::vector<std::uint32_t> out(t.num_rows());
    for (std::size_t r = 0; r < out.size(); ++r) {
        out[r] = t.code(r, col);
    }
    return out;
}

} // namespace

double dcc_normalized(const DegreeDistribution& real, const DegreeDistribution& synth, std::size_t points) {
    return dcc_impl(real, synth, points, true);
}

double dcc_raw(const DegreeDistribution& real, const DegreeDistribution& synth, std::size_t points) {
    return dcc_impl(real, synth, points, false);
}

double dcc(const DegreeDistribution& real, const DegreeDistribution& synth, std::size_t points) {
    return real.degree_sum() == synth.degree_sum() ? dcc_raw(real, synth, points)
                                                   : dcc_normalized(real, synth, points);
}

double degree_dist_score(const DegreeDistribution& real, const DegreeDistribution& synth) {
    return std::max(0.0, 1.0 - dcc(real, synth));
}

double theils_u(std::span<const std::uint32_t> x, std::span<const std::uint32_t> y) {
    if (x.size() != y.size()) {
        throw DataError("theils_u: columns differ in length");
    }
    if (x.empty()) {
        return 0.0;
    }
    const double n = static_cast<double>(x.size());
    const std::uint32_t kx = *std::max_element(x.begin(), x.end()) + 1;
    const std::uint32_t ky = *std::max_element(y.begin(), y.end()) + 1;
    std::vector<double> px(kx, 0.0);
    std::vector<double> py(ky, 0.0);
    std::unordered_map<std::uint64_t, double> joint;
    for (std::size_t i = 0; i < x.size(); ++i) {
        px[x[i]] += 1.0;
        py[y[i]] += 1.0;
        joint[(static_cast<std::uint64_t>(x[i]) << 32) | y[i]] += 1.0;
    }
    const double hx = entropy_of(px, n);
    if (hx <= 0.0) {
        return 0.0;
    }
    // Sum in key order so the result does not depend on hash iteration.
    std::vector<std::pair<std::uint64_t, double>> cells(joint.begin(), joint.end());
    std::sort(cells.begin(), cells.end());
    double hxy = 0.0;
    for (const auto& [key, c] : cells) {
        const double cy = py[static_cast<std::uint32_t>(key)];
        hxy -= (c / n) * std::log(c / cy);
    }
    return std::clamp((hx - hxy) / hx, 0.0, 1.0);
}

double correlation_ratio(std::span<const std::uint32_t> category, std::span<const double> value) {
    if (category.size() != value.size()) {
        throw DataError("correlation_ratio: columns differ in length");
    }
    if (value.empty()) {
        return 0.0;
    }
    const double n = static_cast<double>(value.size());
    const double mean = std::accumulate(value.begin(), value.end(), 0.0) / n;
    const std::uint32_t k = *std::max_element(category.begin(), category.end()) + 1;
    std::vector<double> sum(k, 0.0);
    std::vector<double> cnt(k, 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < value.size(); ++i) {
        sum[category[i]] += value[i];
        cnt[category[i]] += 1.0;
        total += (value[i] - mean) * (value[i] - mean);
    }
    if (!(total > 0.0)) {
        return 0.0;
    }
    double between = 0.0;
    for (std::uint32_t j = 0; j < k; ++j) {
        if (cnt[j] > 0.0) {
            const double m = sum[j] / cnt[j];
            between += cnt[j] * (m - mean) * (m - mean);
        }
    }
    return std::clamp(std::sqrt(between / total), 0.0, 1.0);
}

double abs_pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) {
        throw DataError("abs_pearson: columns differ in length");
    }
    if (x.empty()) {
        return 0.0;
    }
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0.0;
    double sxx = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (!(sxx > 0.0) || !(syy > 0.0)) {
        return 0.0;
    }
    return std::clamp(std::abs(sxy) / std::sqrt(sxx * syy), 0.0, 1.0);
}

AssociationMatrix association_matrix(const FeatureTable& table) {
    AssociationMatrix m;
    const std::size_t k = table.num_cols();
    for (const auto& spec : table.schema()) {
        m.columns.push_back(spec.name);
    }
    m.values.assign(k * k, 0.0);
    std::vector<std::vector<double>> values(k);
    std::vector<std::vector<std::uint32_t>> codes(k);
    for (std::size_t c = 0; c < k; ++c) {
        if (table.schema()[c].is_categorical()) {
            codes[c] = codes_of(table, c);
        } else {
            values[c] = table.column(c);
        }
    }
#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t ii = 0; ii < static_cast<std::int64_t>(k); ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        const bool ci = table.schema()[i].is_categorical();
        for (std::size_t j = 0; j < k; ++j) {
            double v = 1.0;
            if (i != j) {
                const bool cj = table.schema()[j].is_categorical();
                if (ci && cj) {
                    v = theils_u(codes[i], codes[j]);
                } else if (ci) {
                    v = correlation_ratio(codes[i], values[j]);
                } else if (cj) {
                    v = correlation_ratio(codes[j], values[i]);
                } else {
                    v = abs_pearson(values[i], values[j]);
                }
            }
            m.values[i * k + j] = v;
        }
    }
    return m;
}

double feature_corr_score(const AssociationMatrix& real, const AssociationMatrix& synth,
                          std::vector<std::string>* diagnostics) {
    if (real.columns != synth.columns) {
        throw DataError("association matrices cover different columns");
    }
    const std::size_t k = real.size();
    if (k < 2) {
        if (diagnostics) {
            diagnostics->push_back("feature correlation: fewer than two columns, score set to 1");
        }
        return 1.0;
    }
    double total = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
            if (i != j) {
                total += std::abs(real.at(i, j) - synth.at(i, j));
            }
        }
    }
    return std::clamp(1.0 - total / static_cast<double>(k * (k - 1)), 0.0, 1.0);
}

double feature_corr_score(const FeatureTable& real, const FeatureTable& synth) {
    return feature_corr_score(association_matrix(real), association_matrix(synth));
}

std::size_t degree_bucket(std::uint64_t degree) {
    if (degree == 0) {
        return 0;
    }
    const auto bucket = static_cast<std::size_t>(std::bit_width(degree)); // floor(log2 k) + 1
    return std::min(bucket, degree_buckets - 1);
}

std::size_t ColumnBinning::bin(const FeatureTable& table, std::size_t row, std::size_t col) const {
    if (!categorical) {
        const double v = table.value(row, col);
        return static_cast<std::size_t>(std::upper_bound(cuts.begin(), cuts.end(), v) - cuts.begin());
    }
    const auto label = table.label(row, col);
    const auto it = std::find(labels.begin(), labels.end(), label);
    return it == labels.end() ? feature_bins - 1 : static_cast<std::size_t>(it - labels.begin());
}

ColumnBinning make_binning(const FeatureTable& real, std::size_t col) {
    ColumnBinning b;
    const auto& spec = real.schema().at(col);
    b.name = spec.name;
    b.categorical = spec.is_categorical();
    const std::size_t n = real.num_rows();
    if (b.categorical) {
        std::vector<double> freq(spec.vocabulary.size(), 0.0);
        for (std::size_t r = 0; r < n; ++r) {
            freq[real.code(r, col)] += 1.0;
        }
        std::vector<std::size_t> order(freq.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t c) { return freq[a] > freq[c]; });
        for (std::size_t i = 0; i < std::min(order.size(), feature_bins - 1); ++i) {
            if (freq[order[i]] > 0.0) {
                b.labels.push_back(spec.vocabulary[order[i]]);
            }
        }
        return b;
    }
    auto values = real.column(col);
    std::sort(values.begin(), values.end());
    for (std::size_t i = 1; i < feature_bins && n > 0; ++i) {
        const double cut = values[i * n / feature_bins];
        if (cut > values.front() && (b.cuts.empty() || cut > b.cuts.back())) {
            b.cuts.push_back(cut);
        }
    }
    return b;
}

double js_divergence(std::span<const double> p, std::span<const double> q) {
    if (p.size() != q.size()) {
        throw DataError("js_divergence: histograms differ in size");
    }
    const double sp = std::accumulate(p.begin(), p.end(), 0.0);
    const double sq = std::accumulate(q.begin(), q.end(), 0.0);
    if (!(sp > 0.0) || !(sq > 0.0)) {
        return sp > 0.0 || sq > 0.0 ? 1.0 : 0.0;
    }
    // Per-bin terms are symmetric in (a, b), so js(p, q) == js(q, p) exactly.
    double total = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double a = p[i] / sp;
        const double b = q[i] / sq;
        const double m = 0.5 * (a + b);
        double term = 0.0;
        if (a > 0.0) {
            term += a * std::log2(a / m);
        }
        if (b > 0.0) {
            term += b * std::log2(b / m);
        }
        total += 0.5 * term;
    }
    return std::clamp(total, 0.0, 1.0);
}

GraphSummary summarize(const PartiteGraph& g, const GraphSummary* reference, const SummaryOptions& options) {
    GraphSummary s;
    s.nodes = g.total_nodes();
    s.edges = g.total_edges();
    const auto degrees = total_degrees(g);
    for (std::size_t t = 0; t < g.edge_types.size(); ++t) {
        EdgeTypeSummary e;
        e.name = g.edge_types[t].name;
        e.out = degree_distribution(g, t, Direction::out);
        e.in = degree_distribution(g, t, Direction::in);
        const auto joint = joint_feature_table(g, t);
        e.association = association_matrix(joint);
        const EdgeTypeSummary* ref = nullptr;
        if (reference) {
            if (t >= reference->edge_types.size() || reference->edge_types[t].name != e.name) {
                throw DataError("edge type '" + e.name + "' is missing from the reference summary");
            }
            ref = &reference->edge_types[t];
        }
        const auto& type = g.edge_types[t];
        const auto src_off = g.offset(type.src_partite);
        const auto dst_off = g.offset(type.dst_partite);
        const auto& list = g.edges[t];
        for (std::size_t c = 0; c < joint.num_cols(); ++c) {
            e.bins.push_back(ref && c < ref->bins.size() ? ref->bins[c] : make_binning(joint, c));
            std::vector<double> src(degree_buckets * feature_bins, 0.0);
            std::vector<double> dst(degree_buckets * feature_bins, 0.0);
            for (std::size_t i = 0; i < list.size(); ++i) {
                const auto fb = e.bins[c].bin(joint, i, c);
                src[degree_bucket(degrees[src_off + list[i].src]) * feature_bins + fb] += 1.0;
                dst[degree_bucket(degrees[dst_off + list[i].dst]) * feature_bins + fb] += 1.0;
            }
            e.src_hist.push_back(std::move(src));
            e.dst_hist.push_back(std::move(dst));
        }
        s.edge_types.push_back(std::move(e));
    }
    if (s.nodes > 0) {
        s.hop = hop_plot(g, options.hop_sources, options.max_hops, options.seed);
    }
    return s;
}

MetricsReport compare(const GraphSummary& real, const GraphSummary& synth) {
    MetricsReport report;
    std::vector<std::string> mismatches;
    if (real.edge_types.size() != synth.edge_types.size()) {
        mismatches.push_back("edge type count " + std::to_string(real.edge_types.size()) + " vs " +
                             std::to_string(synth.edge_types.size()));
    } else {
        for (std::size_t t = 0; t < real.edge_types.size(); ++t) {
            const auto& a = real.edge_types[t];
            const auto& b = synth.edge_types[t];
            if (a.name != b.name) {
                mismatches.push_back("edge type '" + a.name + "' vs '" + b.name + "'");
                continue;
            }
            const auto& ca = a.association.columns;
            const auto& cb = b.association.columns;
            for (const auto& name : ca) {
                if (std::find(cb.begin(), cb.end(), name) == cb.end()) {
                    mismatches.push_back(a.name + ": column '" + name + "' missing from synthetic");
                }
            }
            for (const auto& name : cb) {
                if (std::find(ca.begin(), ca.end(), name) == ca.end()) {
                    mismatches.push_back(a.name + ": column '" + name + "' missing from real");
                }
            }
            if (ca != cb && mismatches.empty()) {
                mismatches.push_back(a.name + ": columns appear in a different order");
            }
        }
    }
    if (!mismatches.empty()) {
        std::string msg = "schema mismatch:";
        for (const auto& m : mismatches) {
            msg += "\n  " + m;
        }
        throw DataError(msg);
    }

    double degree_score = 0.0;
    double dcc_total = 0.0;
    double corr_total = 0.0;
    std::size_t corr_count = 0;
    double js_total = 0.0;
    std::size_t js_count = 0;
    for (std::size_t t = 0; t < real.edge_types.size(); ++t) {
        const auto& a = real.edge_types[t];
        const auto& b = synth.edge_types[t];
        EdgeTypeReport r;
        r.name = a.name;
        r.dcc_out = dcc(a.out, b.out);
        r.dcc_in = dcc(a.in, b.in);
        degree_score += std::max(0.0, 1.0 - r.dcc_out) + std::max(0.0, 1.0 - r.dcc_in);
        dcc_total += r.dcc_out + r.dcc_in;
        if (a.association.size() >= 2) {
            r.feature_corr = feature_corr_score(a.association, b.association);
            corr_total += r.feature_corr;
            ++corr_count;
        }
        double js = 0.0;
        for (std::size_t c = 0; c < a.src_hist.size(); ++c) {
            const double col = 0.5 * (js_divergence(a.src_hist[c], b.src_hist[c]) +
                                      js_divergence(a.dst_hist[c], b.dst_hist[c]));
            js += col;
            js_total += col;
            ++js_count;
        }
        r.degree_feature_js = a.src_hist.empty() ? 0.0 : js / static_cast<double>(a.src_hist.size());
        report.edge_types.push_back(std::move(r));
    }
    const double directions = 2.0 * static_cast<double>(real.edge_types.size());
    report.degree_dist_score = directions > 0 ? degree_score / directions : 1.0;
    report.dcc_raw = directions > 0 ? dcc_total / directions : 0.0;
    if (corr_count == 0) {
        report.diagnostics.push_back("feature correlation: fewer than two columns, score set to 1");
        report.feature_corr_score = 1.0;
    } else {
        report.feature_corr_score = corr_total / static_cast<double>(corr_count);
    }
    if (js_count == 0) {
        report.diagnostics.push_back("degree-feature JS: no feature columns, score set to 0");
    } else {
        report.degree_feature_js = js_total / static_cast<double>(js_count);
    }
    report.real_hop = real.hop;
    report.synth_hop = synth.hop;
    return report;
}

} // namespace syngraph
