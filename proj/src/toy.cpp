#include "syngraph/toy.hpp"

#include "syngraph/error.hpp"
#include "syngraph/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <vector>

namespace syngraph {

namespace {

std::vector<double> cumulative_weights(std::uint64_t n, double exponent) {
    std::vector<double> cum(n);
    double total = 0.0;
    for (std::uint64_t i = 0; i < n; ++i) {
        total += std::pow(static_cast<double>(i + 1), -exponent);
        cum[i] = total;
    }
    for (auto& c : cum) {
        c /= total;
    }
    return cum;
}

std::uint64_t draw_index(const std::vector<double>& cum, Engine& engine) {
    const double u = uniform01(engine);
    const auto it = std::upper_bound(cum.begin(), cum.end(), u);
    return std::min<std::uint64_t>(static_cast<std::uint64_t>(it - cum.begin()), cum.size() - 1);
}

std::string fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

} // namespace

CsvData make_toy_transactions(const ToyOptions& o) {
    if (o.users == 0 || o.merchants == 0) {
        throw ConfigError("toy data needs at least one user and one merchant");
    }
    static const char* categories[] = {"grocery", "fuel", "travel", "dining", "online", "electronics", "health", "other"};
    static const char* regions[] = {"north", "south", "east", "west", "central"};
    static const char* cards[] = {"credit", "debit", "prepaid"};

    Engine engine = make_stream(o.seed, 0, 0, 0x70e);
    const auto user_cum = cumulative_weights(o.users, o.user_exponent);
    const auto merchant_cum = cumulative_weights(o.merchants, o.merchant_exponent);
    auto expected = [&](const std::vector<double>& cum, std::uint64_t i) {
        return (cum[i] - (i == 0 ? 0.0 : cum[i - 1])) * static_cast<double>(o.transactions);
    };

    // Per-node attributes; ids are shuffled so that the id carries no signal.
    std::vector<std::uint64_t> user_ids(o.users);
    std::vector<std::uint64_t> merchant_ids(o.merchants);
    for (std::uint64_t i = 0; i < o.users; ++i) {
        user_ids[i] = i;
    }
    for (std::uint64_t i = 0; i < o.merchants; ++i) {
        merchant_ids[i] = i;
    }
    for (std::uint64_t i = o.users; i > 1; --i) {
        std::swap(user_ids[i - 1], user_ids[uniform_below(engine, i)]);
    }
    for (std::uint64_t i = o.merchants; i > 1; --i) {
        std::swap(merchant_ids[i - 1], merchant_ids[uniform_below(engine, i)]);
    }
    std::vector<double> user_score(o.users);
    std::vector<int> card(o.users);
    for (std::uint64_t i = 0; i < o.users; ++i) {
        const double activity = std::log10(1.0 + expected(user_cum, i));
        user_score[i] = 0.3 + 0.35 * activity + 0.08 * standard_normal(engine);
        const double u = uniform01(engine);
        const double credit = std::min(0.9, 0.2 + 0.35 * activity);
        card[i] = u < credit ? 0 : (u < credit + 0.6 * (1.0 - credit) ? 1 : 2);
    }
    std::vector<int> merchant_category(o.merchants);
    std::vector<int> region(o.merchants);
    std::vector<double> price_level(o.merchants);
    for (std::uint64_t i = 0; i < o.merchants; ++i) {
        const double activity = std::log10(1.0 + expected(merchant_cum, i));
        // Busy merchants lean towards the everyday categories.
        const double z = std::max(0.0, 7.0 - 2.0 * activity + 1.5 * standard_normal(engine));
        merchant_category[i] = static_cast<int>(std::min(7.0, std::floor(z)));
        region[i] = static_cast<int>(uniform_below(engine, 5));
        price_level[i] = 2.5 + 0.25 * merchant_category[i] + 0.3 * standard_normal(engine);
    }

    CsvData csv;
    csv.header = {"user_id", "merchant_id", "amount", "hour", "category", "user_score", "card_type", "merchant_region"};
    csv.rows.reserve(o.transactions);
    for (std::uint64_t t = 0; t < o.transactions; ++t) {
        const auto u = draw_index(user_cum, engine);
        const auto m = draw_index(merchant_cum, engine);
        const double activity = std::log10(1.0 + expected(user_cum, u));
        const double log_amount = price_level[m] + 0.6 * activity + 0.35 * standard_normal(engine);
        const double hour = uniform01(engine) < 0.6 ? 13.0 + 2.5 * standard_normal(engine)
                                                     : 20.0 + 1.5 * standard_normal(engine);
        const int cat = uniform01(engine) < 0.8 ? merchant_category[m] : static_cast<int>(uniform_below(engine, 8));
        csv.rows.push_back({"u" + std::to_string(user_ids[u]), "m" + std::to_string(merchant_ids[m]),
                            fixed(std::exp(log_amount), 2), fixed(std::clamp(hour, 0.0, 23.9), 1), categories[cat],
                            fixed(user_score[u], 3), cards[card[u]], regions[region[m]]});
    }
    return csv;
}

Json toy_config_json(const std::string& input) {
    return Json{{"input", input},
                {"partites",
                 Json::array({Json{{"name", "user"},
                                   {"columns", {"user_id"}},
                                   {"feature_columns", {"user_score", "card_type"}}},
                              Json{{"name", "merchant"},
                                   {"columns", {"merchant_id"}},
                                   {"feature_columns", {"merchant_region"}}}})},
                {"edge_types", Json::array({Json{{"name", "transactions"}, {"src", "user"}, {"dst", "merchant"}}})},
                {"column_kinds",
                 {{"category", "categorical"}, {"card_type", "categorical"}, {"merchant_region", "categorical"}}},
                {"feature_backend", "mixture"},
                {"aligner", "ranked"},
                {"noise", 0.1},
                {"scale", 1.0},
                {"seed", 7},
                {"workers", 1}};
}

} // namespace syngraph
