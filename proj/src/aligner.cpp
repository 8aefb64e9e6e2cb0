#include "syngraph/aligner.hpp"

#include "syngraph/error.hpp"
#include "syngraph/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace syngraph {

std::string_view to_string(AlignerMode mode) {
    switch (mode) {
    case AlignerMode::ranked: return "ranked";
    case AlignerMode::random: return "random";
    case AlignerMode::exhaustive: return "exhaustive";
    }
    return "ranked";
}

AlignerMode aligner_mode_from_string(std::string_view text) {
    if (text == "ranked") {
        return AlignerMode::ranked;
    }
    if (text == "random") {
        return AlignerMode::random;
    }
    if (text == "exhaustive") {
        return AlignerMode::exhaustive;
    }
    throw ConfigError("unknown aligner mode '" + std::string(text) + "'");
}

std::vector<ColumnSpec> AlignerModel::schema() const {
    std::vector<ColumnSpec> out;
    for (const auto& t : targets) {
        out.push_back(t.column);
    }
    return out;
}

std::size_t AlignerModel::prediction_width() const {
    std::size_t w = 0;
    for (const auto& t : targets) {
        w += t.column.is_categorical() ? t.column.vocabulary.size() : 1;
    }
    return w;
}

std::vector<double> edge_inputs(const PartiteGraph& g, std::size_t edge_type, const StructFeatures& features) {
    const auto& type = g.edge_types.at(edge_type);
    const auto& list = g.edges.at(edge_type);
    const auto src_off = g.offset(type.src_partite);
    const auto dst_off = g.offset(type.dst_partite);
    constexpr std::size_t w = StructFeatures::width;
    std::vector<double> out(list.size() * 2 * w);
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(list.size()); ++i) {
        const auto e = list[static_cast<std::size_t>(i)];
        std::span<double> row(out.data() + static_cast<std::size_t>(i) * 2 * w, 2 * w);
        features.write_row(src_off + e.src, row.first(w));
        features.write_row(dst_off + e.dst, row.last(w));
    }
    return out;
}

AlignerModel fit_aligner(std::span<const double> inputs, std::size_t width, const FeatureTable& targets,
                         std::uint64_t seed, const AlignerOptions& options) {
    const std::size_t rows = targets.num_rows();
    if (width == 0 || inputs.size() != rows * width) {
        throw ConfigError("aligner inputs do not match the feature table");
    }
    if (rows < 10) {
        throw FitError("aligner needs at least 10 edges, got " + std::to_string(rows));
    }
    AlignerModel model;
    model.input_width = width;

    struct Job {
        std::size_t target;
        std::size_t slot;
        std::uint32_t cls; // categorical class, unused for continuous
    };
    std::vector<Job> jobs;
    for (std::size_t c = 0; c < targets.num_cols(); ++c) {
        AlignerTarget t;
        t.column = targets.schema()[c];
        const auto column = targets.column(c);
        if (!t.column.is_categorical()) {
            const double mean = std::accumulate(column.begin(), column.end(), 0.0) / static_cast<double>(rows);
            double var = 0.0;
            for (double v : column) {
                var += (v - mean) * (v - mean);
            }
            const double sd = std::sqrt(var / static_cast<double>(rows));
            t.mean = mean;
            t.scale = sd > 0.0 ? sd : 1.0;
            t.ensembles.resize(1);
            jobs.push_back({c, 0, 0});
        } else {
            const std::size_t k = t.column.vocabulary.size();
            std::vector<double> freq(k, 0.0);
            for (double v : column) {
                freq[static_cast<std::size_t>(v)] += 1.0;
            }
            std::vector<std::uint32_t> order(k);
            std::iota(order.begin(), order.end(), 0U);
            std::stable_sort(order.begin(), order.end(),
                             [&](std::uint32_t a, std::uint32_t b) { return freq[a] > freq[b]; });
            t.ensembles.resize(k);
            for (std::size_t j = 0; j < k; ++j) {
                t.ensembles[j].base_score = freq[j] / static_cast<double>(rows);
                t.ensembles[j].learning_rate = options.gbdt.learning_rate;
            }
            for (std::size_t j = 0; j < std::min(k, options.max_classes); ++j) {
                if (freq[order[j]] > 0.0) {
                    jobs.push_back({c, order[j], order[j]});
                }
            }
        }
        model.targets.push_back(std::move(t));
    }

#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t j = 0; j < static_cast<std::int64_t>(jobs.size()); ++j) {
        const auto& job = jobs[static_cast<std::size_t>(j)];
        auto& target = model.targets[job.target];
        std::vector<double> y(rows);
        for (std::size_t r = 0; r < rows; ++r) {
            const double v = targets.value(r, job.target);
            y[r] = target.column.is_categorical() ? (v == job.cls ? 1.0 : 0.0) : (v - target.mean) / target.scale;
        }
        target.ensembles[job.slot] =
            fit_gbdt(inputs, width, y, options.gbdt, seed + static_cast<std::uint64_t>(j) * 0x9e3779b97f4a7c15ULL);
    }
    return model;
}

std::vector<double> predict_features(const AlignerModel& model, std::span<const double> inputs, std::size_t width) {
    if (width != model.input_width || inputs.size() % width != 0) {
        throw ConfigError("prediction input width " + std::to_string(width) + " does not match model width " +
                          std::to_string(model.input_width));
    }
    const std::size_t rows = inputs.size() / width;
    const std::size_t pw = model.prediction_width();
    std::vector<double> out(rows * pw);
#pragma omp parallel for schedule(static)
    for (std::int64_t r = 0; r < static_cast<std::int64_t>(rows); ++r) {
        const auto x = inputs.subspan(static_cast<std::size_t>(r) * width, width);
        double* dst = out.data() + static_cast<std::size_t>(r) * pw;
        for (const auto& t : model.targets) {
            for (const auto& e : t.ensembles) {
                *dst++ = e.predict(x);
            }
        }
    }
    return out;
}

double similarity(std::span<const double> pred, std::span<const double> candidate, std::span<const ColumnSpec> schema) {
    double score = 0.0;
    std::size_t slot = 0;
    for (std::size_t c = 0; c < schema.size(); ++c) {
        if (!schema[c].is_categorical()) {
            const double diff = pred[slot] - candidate[c];
            score -= diff * diff;
            ++slot;
            continue;
        }
        const std::size_t k = schema[c].vocabulary.size();
        double norm = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            norm += pred[slot + j] * pred[slot + j];
        }
        // cosine with a one-hot vector: the selected score over the block norm
        if (norm > 0.0) {
            score += pred[slot + static_cast<std::size_t>(candidate[c])] / std::sqrt(norm);
        }
        slot += k;
    }
    return score;
}

std::vector<double> to_prediction_space(const AlignerModel& model, std::span<const double> row) {
    std::vector<double> out(row.begin(), row.end());
    for (std::size_t c = 0; c < model.targets.size(); ++c) {
        const auto& t = model.targets[c];
        if (!t.column.is_categorical()) {
            out[c] = (row[c] - t.mean) / t.scale;
        }
    }
    return out;
}

namespace {

// Sort keys: the continuous prediction, or the score of the most frequent
// class for a categorical column.
std::vector<std::size_t> key_slots(const AlignerModel& model, std::vector<std::uint32_t>& key_class) {
    std::vector<std::size_t> slots;
    std::size_t slot = 0;
    for (const auto& t : model.targets) {
        if (!t.column.is_categorical()) {
            slots.push_back(slot);
            key_class.push_back(0);
            ++slot;
            continue;
        }
        std::uint32_t best = 0;
        for (std::uint32_t j = 1; j < t.ensembles.size(); ++j) {
            if (t.ensembles[j].base_score > t.ensembles[best].base_score) {
                best = j;
            }
        }
        slots.push_back(slot + best);
        key_class.push_back(best);
        slot += t.ensembles.size();
    }
    return slots;
}

std::vector<std::size_t> sorted_by_keys(const std::vector<double>& keys, std::size_t count, std::size_t width) {
    std::vector<std::size_t> order(count);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        for (std::size_t j = 0; j < width; ++j) {
            const double x = keys[a * width + j];
            const double y = keys[b * width + j];
            if (x != y) {
                return x < y;
            }
        }
        return a < b;
    });
    return order;
}

} // namespace

std::vector<std::size_t> assign_rows(const AlignerModel& model, std::span<const double> predictions,
                                     std::size_t edges, const FeatureTable& rows, AlignerMode mode,
                                     std::uint64_t seed) {
    const std::size_t n_rows = rows.num_rows();
    if (n_rows < edges) {
        throw DataError("alignment needs at least as many feature rows (" + std::to_string(n_rows) +
                        ") as edges (" + std::to_string(edges) + ")");
    }
    const std::size_t pw = model.prediction_width();
    std::vector<std::size_t> assignment(edges);
    if (mode == AlignerMode::random) {
        std::vector<std::size_t> perm(n_rows);
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        Engine engine = make_stream(seed, 0, 0, 0xa119);
        for (std::size_t i = 0; i < edges; ++i) {
            std::swap(perm[i], perm[i + uniform_below(engine, n_rows - i)]);
        }
        std::copy_n(perm.begin(), edges, assignment.begin());
        return assignment;
    }
    if (predictions.size() != edges * pw) {
        throw ConfigError("prediction matrix does not match the edge count");
    }
    if (rows.num_cols() != model.targets.size()) {
        throw ConfigError("feature rows do not match the aligner schema");
    }
    if (pw == 0 || edges == 0) {
        std::iota(assignment.begin(), assignment.end(), std::size_t{0});
        return assignment;
    }

    if (mode == AlignerMode::exhaustive) {
        if (edges > 10000) {
            throw ConfigError("exhaustive alignment is limited to 10000 edges");
        }
        const auto schema = model.schema();
        std::vector<std::vector<double>> candidates(n_rows);
        for (std::size_t r = 0; r < n_rows; ++r) {
            candidates[r] = to_prediction_space(model, rows.row(r));
        }
        std::vector<char> used(n_rows, 0);
        for (std::size_t e = 0; e < edges; ++e) {
            const auto pred = predictions.subspan(e * pw, pw);
            std::size_t best = n_rows;
            double best_score = 0.0;
            for (std::size_t r = 0; r < n_rows; ++r) {
                if (used[r]) {
                    continue;
                }
                const double s = similarity(pred, candidates[r], schema);
                if (best == n_rows || s > best_score) {
                    best = r;
                    best_score = s;
                }
            }
            used[best] = 1;
            assignment[e] = best;
        }
        return assignment;
    }

    std::vector<std::uint32_t> key_class;
    const auto slots = key_slots(model, key_class);
    const std::size_t kw = slots.size();
    std::vector<double> edge_keys(edges * kw);
    std::vector<double> row_keys(n_rows * kw);
#pragma omp parallel for schedule(static)
    for (std::int64_t e = 0; e < static_cast<std::int64_t>(edges); ++e) {
        for (std::size_t j = 0; j < kw; ++j) {
            edge_keys[static_cast<std::size_t>(e) * kw + j] = predictions[static_cast<std::size_t>(e) * pw + slots[j]];
        }
    }
#pragma omp parallel for schedule(static)
    for (std::int64_t r = 0; r < static_cast<std::int64_t>(n_rows); ++r) {
        const auto row = rows.row(static_cast<std::size_t>(r));
        for (std::size_t j = 0; j < kw; ++j) {
            const auto& t = model.targets[j];
            row_keys[static_cast<std::size_t>(r) * kw + j] =
                t.column.is_categorical() ? (row[j] == key_class[j] ? 1.0 : 0.0) : (row[j] - t.mean) / t.scale;
        }
    }
    const auto edge_order = sorted_by_keys(edge_keys, edges, kw);
    const auto row_order = sorted_by_keys(row_keys, n_rows, kw);
    for (std::size_t i = 0; i < edges; ++i) {
        // evenly spaced ranks when there are spare rows; identity otherwise
        const std::size_t rank = n_rows == edges ? i : (2 * i + 1) * n_rows / (2 * edges);
        assignment[edge_order[i]] = row_order[rank];
    }
    return assignment;
}

NodeFill start_node_fill(const PartiteGraph& g) {
    NodeFill fill;
    for (const auto& p : g.partites) {
        fill.set.emplace_back(p.size, 0);
    }
    return fill;
}

namespace {

FeatureTable& node_table(PartiteGraph& g, std::size_t partite, const FeatureTable& joint, std::size_t begin,
                         std::size_t count) {
    if (g.node_features.size() < g.partites.size()) {
        g.node_features.resize(g.partites.size());
    }
    auto& slot = g.node_features[partite];
    if (!slot) {
        std::vector<ColumnSpec> schema(joint.schema().begin() + static_cast<std::ptrdiff_t>(begin),
                                       joint.schema().begin() + static_cast<std::ptrdiff_t>(begin + count));
        for (auto& spec : schema) {
            spec.name = spec.name.substr(spec.name.find(':') + 1);
        }
        slot.emplace(std::move(schema));
        slot->resize_rows(g.partites[partite].size);
    }
    return *slot;
}

} // namespace

void attach_features(PartiteGraph& g, std::size_t edge_type, const JointLayout& layout, const FeatureTable& joint,
                     std::span<const std::size_t> assignment, NodeFill& fill) {
    const auto& type = g.edge_types.at(edge_type);
    const auto& list = g.edges.at(edge_type);
    if (assignment.size() != list.size() || joint.num_cols() != layout.width()) {
        throw ConfigError("assignment does not match edge type '" + type.name + "'");
    }
    if (g.edge_features.size() < g.edge_types.size()) {
        g.edge_features.resize(g.edge_types.size());
    }
    if (layout.edge > 0) {
        std::vector<std::size_t> cols(layout.edge);
        std::iota(cols.begin(), cols.end(), std::size_t{0});
        g.edge_features[edge_type] = joint.select_rows(assignment).select_columns(cols);
    } else {
        g.edge_features[edge_type].reset();
    }
    const std::size_t blocks[2][3] = {{layout.edge, layout.src, type.src_partite},
                                      {layout.edge + layout.src, layout.dst, type.dst_partite}};
    for (const auto& block : blocks) {
        const auto [begin, count, partite] = std::tuple{block[0], block[1], block[2]};
        if (count == 0) {
            continue;
        }
        auto& table = node_table(g, partite, joint, begin, count);
        auto& set = fill.set[partite];
        for (std::size_t e = 0; e < list.size(); ++e) {
            const NodeId node = (&block == &blocks[0]) ? list[e].src : list[e].dst;
            if (set[node]) {
                continue;
            }
            set[node] = 1;
            const auto row = joint.row(assignment[e]);
            for (std::size_t j = 0; j < count; ++j) {
                table.set(node, j, row[begin + j]);
            }
        }
    }
}

std::size_t fill_remaining_nodes(PartiteGraph& g, std::size_t partite, const FeatureTable& rows, NodeFill& fill) {
    auto& table = node_table(g, partite, rows, 0, rows.num_cols());
    auto& set = fill.set.at(partite);
    std::size_t used = 0;
    for (std::size_t node = 0; node < set.size(); ++node) {
        if (set[node]) {
            continue;
        }
        if (used >= rows.num_rows()) {
            throw DataError("not enough node feature rows for partite '" + g.partites[partite].name + "'");
        }
        const auto row = rows.row(used++);
        for (std::size_t j = 0; j < rows.num_cols(); ++j) {
            table.set(node, j, row[j]);
        }
        set[node] = 1;
    }
    return used;
}

} // namespace syngraph
