#pragma once

#include "syngraph/table.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace syngraph {

struct GaussianMode {
    double weight = 1.0;
    double mean = 0.0;
    double variance = 1.0;
};

// Per-column Gaussian mixture used for mode-specific normalization.
struct ContinuousNormalizer {
    std::vector<GaussianMode> modes; // sorted by mean
    bool constant = false;           // every training value was identical
};

struct NormalizerOptions {
    unsigned max_modes = 10;
    int max_iterations = 100;
    double tolerance = 1e-6;
    std::size_t max_samples = 10000; // larger columns are subsampled
};

// EM with k-means++ initialization; mode count picked by BIC over
// 1..max_modes. Variances are floored at 1e-6 times the sample variance.
ContinuousNormalizer fit_normalizer(std::span<const double> values, std::uint64_t seed,
                                    const NormalizerOptions& options = {});

struct NormalizedValue {
    std::size_t mode = 0;
    double scalar = 0.0; // (v - mean) / (4 sigma), clipped to [-1, 1]
};

NormalizedValue normalize(double value, const ContinuousNormalizer& normalizer);
double denormalize(const NormalizedValue& value, const ContinuousNormalizer& normalizer);

// Embedding width for a categorical column: min(600, round(1.6 |D|^0.56)).
std::size_t embedding_size(std::size_t vocabulary_size);

enum class FeatureBackend { mixture, independent };

std::string_view to_string(FeatureBackend backend);
FeatureBackend feature_backend_from_string(std::string_view text);

struct MixtureComponent {
    double weight = 1.0;
    std::vector<double> mean;     // per continuous column, normalized scalar space
    std::vector<double> variance; // diagonal
    // One frequency table per schema column: vocabulary for categorical
    // columns, mode indicator for continuous ones.
    std::vector<std::vector<double>> tables;
};

struct BicEntry {
    std::size_t components = 0;
    double bic = 0.0;
};

struct FeatureModel {
    std::vector<ColumnSpec> schema;
    FeatureBackend backend = FeatureBackend::mixture;
    std::vector<ContinuousNormalizer> normalizers; // per column; unused for categorical
    std::vector<std::vector<double>> marginals;    // independent backend, categorical frequencies
    std::vector<MixtureComponent> components;      // mixture backend
    std::vector<BicEntry> bic;

    [[nodiscard]] std::vector<std::size_t> continuous_columns() const;
};

struct FeatureModelOptions {
    std::vector<std::size_t> candidate_components{1, 2, 4, 8, 16};
    int max_iterations = 100;
    double tolerance = 1e-6;
    std::size_t max_samples = 20000;
    NormalizerOptions normalizer;
};

FeatureModel fit_feature_model(const FeatureTable& table, FeatureBackend backend, std::uint64_t seed,
                               const FeatureModelOptions& options = {});

// `count` i.i.d. rows split over `workers` independent streams.
FeatureTable sample_features(const FeatureModel& model, std::size_t count, std::uint64_t seed, unsigned workers = 1);

} // namespace syngraph
