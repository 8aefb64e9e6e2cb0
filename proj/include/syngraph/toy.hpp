#pragma once

// Synthetic user-merchant transaction table with heavy-tailed activity and
// features that depend on node activity. Stands in for real transaction data
// in examples and tests.

#include "syngraph/csv.hpp"
#include "syngraph/serialize.hpp"

#include <cstdint>
#include <string>

namespace syngraph {

struct ToyOptions {
    std::uint64_t users = 10000;
    std::uint64_t merchants = 2000;
    std::uint64_t transactions = 70000;
    double user_exponent = 0.85; // activity weight of the i-th user is (i + 1)^-exponent
    double merchant_exponent = 1.0;
    std::uint64_t seed = 1;
};

// Columns: user_id, merchant_id, amount, hour, category, user_score,
// card_type, merchant_region.
CsvData make_toy_transactions(const ToyOptions& options);

// Pipeline config for the table above, reading from `input`.
Json toy_config_json(const std::string& input);

} // namespace syngraph
