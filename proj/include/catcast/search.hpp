#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "catcast/core.hpp"
#include "catcast/encoders.hpp"
#include "catcast/ingest.hpp"
#include "catcast/model.hpp"

namespace catcast {

// One search iteration: an ordered parameter block whose value lists are
// swept as a cartesian product (last parameter varies fastest).
struct GridIteration {
    std::vector<std::string> names;
    std::vector<std::vector<nlohmann::json>> values;

    std::size_t size() const;
    nlohmann::json config_at(std::size_t enum_index) const;
};

struct GridSpec {
    ModelFamily family = ModelFamily::mlp;
    std::vector<GridIteration> iterations;
};

// the published four-iteration sweep (architecture, dropout+epochs,
// optimizer, learning rate)
GridSpec default_grid(ModelFamily family);

// settings used before their own iteration has run
nlohmann::json pre_iteration_defaults();

struct ConfigResult {
    std::size_t enum_index = 0;
    nlohmann::json values;          // only this iteration's parameters
    std::uint64_t train_seed = 0;
    std::vector<double> fold_scores;
    double mean_score = 0.0;
};

struct IterationTrace {
    std::vector<ConfigResult> configs;
    std::size_t winner = 0;  // position in `configs`
};

struct SearchTrace {
    ModelFamily family = ModelFamily::mlp;
    int stage_id = 0;
    int k = 0;
    std::uint64_t seed = 0;
    std::size_t budget = 0;
    std::size_t total_evaluated = 0;
    std::vector<IterationTrace> iterations;
    nlohmann::json final_config;
};

struct SearchData {
    const Table* table = nullptr;
    std::vector<std::string> input_vars;
    std::string target_var;
    int classes = 0;
    std::vector<std::size_t> train_indices;
    EncodingScheme scheme;  // one-hot unless overridden
};

// mean validation Top1 of one full configuration over the folds; the same
// routine the search calls, so any trace line can be re-scored standalone
std::vector<double> score_config_folds(ModelFamily family, const nlohmann::json& config,
                                       const SearchData& data, const FoldPlan& folds,
                                       std::uint64_t train_seed);

// Iterative grid search: each iteration sweeps only its own parameters,
// keeps earlier winners frozen and later parameters at the defaults, and
// scores every candidate by k-fold cross-validated Top1. A finite budget
// subsamples each iteration (seeded) for desk-scale runs.
SearchTrace run_search(const GridSpec& grid, const SearchData& data, int k, std::uint64_t seed,
                       std::size_t budget, int threads = 1);

nlohmann::json trace_to_json(const SearchTrace& trace);
SearchTrace trace_from_json(const nlohmann::json& j);

} // namespace catcast
