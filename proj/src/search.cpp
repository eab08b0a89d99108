#include "catcast/search.hpp"

#include <algorithm>
#include <future>
#include <numeric>

#include "catcast/rng.hpp"
#include "catcast/train.hpp"

namespace catcast {

using json = nlohmann::json;

std::size_t GridIteration::size() const {
    std::size_t n = 1;
    for (const auto& v : values) n *= v.size();
    return n;
}

json GridIteration::config_at(std::size_t enum_index) const {
    json config = json::object();
    std::size_t rem = enum_index;
    for (std::size_t p = names.size(); p > 0; --p) {
        const auto& vals = values[p - 1];
        config[names[p - 1]] = vals[rem % vals.size()];
        rem /= vals.size();
    }
    return config;
}

GridSpec default_grid(ModelFamily family) {
    GridSpec grid;
    grid.family = family;
    const std::vector<json> activations = {"relu", "tanh", "sigmoid", "hard_sigmoid"};

    GridIteration arch;
    if (family == ModelFamily::mlp) {
        arch.names = {"hidden_layers", "neurons", "activation"};
        arch.values = {{1, 2, 3, 4}, {128, 256, 512, 1024, 2048, 4096}, activations};
    } else {
        arch.names = {"hidden_layers", "filters", "kernel", "maxpool", "activation"};
        arch.values = {{1, 2, 3, 4}, {32, 64, 128, 256, 512}, {2, 3, 4, 5}, {2, 3, 4},
                       activations};
    }
    grid.iterations.push_back(std::move(arch));

    GridIteration regular;
    regular.names = {"dropout", "epochs"};
    regular.values = {{0.1, 0.2, 0.3, 0.5}, {10, 25, 50, 100, 150}};
    grid.iterations.push_back(std::move(regular));

    GridIteration optim;
    optim.names = {"optimizer"};
    optim.values = {{"sgd", "rmsprop", "adagrad", "adam"}};
    grid.iterations.push_back(std::move(optim));

    GridIteration rate;
    rate.names = {"lr"};
    rate.values = {{0.01, 0.001, 0.005}};
    grid.iterations.push_back(std::move(rate));
    return grid;
}

json pre_iteration_defaults() {
    return {{"dropout", 0.2}, {"epochs", 25}, {"optimizer", "adam"}, {"lr", 0.001}};
}

std::vector<double> score_config_folds(ModelFamily family, const json& config,
                                       const SearchData& data, const FoldPlan& folds,
                                       std::uint64_t train_seed) {
    const EncodedMatrix enc = encode_table(*data.table, data.scheme, data.input_vars);
    const std::vector<int> all_labels =
        gather_labels(*data.table, data.target_var, [&] {
            std::vector<std::size_t> all(data.table->n_rows());
            std::iota(all.begin(), all.end(), 0);
            return all;
        }());

    std::vector<double> scores;
    for (std::size_t f = 0; f < folds.folds.size(); ++f) {
        std::vector<std::size_t> fit_rows;
        for (std::size_t g = 0; g < folds.folds.size(); ++g)
            if (g != f)
                fit_rows.insert(fit_rows.end(), folds.folds[g].begin(), folds.folds[g].end());
        const std::vector<std::size_t>& held = folds.folds[f];

        ModelGraph model = build_grid_model(family, config, static_cast<int>(enc.values.cols),
                                            data.classes);
        init_params(model, mix_seed(train_seed, "init", f));

        DataView fit;
        fit.dense = &enc.values;
        fit.rows = fit_rows;
        for (auto r : fit_rows) fit.labels.push_back(all_labels[r]);

        TrainConfig tc;
        tc.epochs = config.at("epochs").get<int>();
        tc.batch_size = 128;
        tc.learning_rate = config.at("lr").get<double>();
        tc.optimizer = optimizer_from_string(config.at("optimizer").get<std::string>());
        tc.dropout = config.at("dropout").get<double>();
        tc.seed = mix_seed(train_seed, "train", f);
        train(model, fit, nullptr, tc);

        DataView val;
        val.dense = &enc.values;
        val.rows = held;
        for (auto r : held) val.labels.push_back(all_labels[r]);
        const Mat probs = predict_probs(model, val);
        std::size_t hits = 0;
        for (std::size_t i = 0; i < probs.rows; ++i) {
            const double* row = probs[i];
            std::size_t best = 0;
            for (std::size_t c = 1; c < probs.cols; ++c)
                if (row[c] > row[best]) best = c;
            if (val.labels[i] >= 0 && static_cast<std::size_t>(val.labels[i]) == best) ++hits;
        }
        scores.push_back(probs.rows == 0
                             ? 0.0
                             : static_cast<double>(hits) / static_cast<double>(probs.rows));
    }
    return scores;
}

SearchTrace run_search(const GridSpec& grid, const SearchData& data, int k, std::uint64_t seed,
                       std::size_t budget, int threads) {
    if (budget < 1) throw ConfigError("search budget must be >= 1");
    if (k < 2) throw ConfigError("cross-validation needs k >= 2");

    SearchTrace trace;
    trace.family = grid.family;
    trace.k = k;
    trace.seed = seed;
    trace.budget = budget;

    const FoldPlan folds = make_folds(data.train_indices, k, seed);
    json frozen = pre_iteration_defaults();

    for (std::size_t it = 0; it < grid.iterations.size(); ++it) {
        const GridIteration& iteration = grid.iterations[it];
        const std::size_t full = iteration.size();
        std::vector<std::size_t> picks;
        if (full <= budget) {
            picks.resize(full);
            std::iota(picks.begin(), picks.end(), 0);
        } else {
            // seeded subsample, kept in enumeration order
            std::vector<std::size_t> all(full);
            std::iota(all.begin(), all.end(), 0);
            Rng rng(mix_seed(seed, "budget", it));
            for (std::size_t i = 0; i < budget; ++i) {
                const std::size_t j = i + static_cast<std::size_t>(rng.below(full - i));
                std::swap(all[i], all[j]);
            }
            picks.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(budget));
            std::sort(picks.begin(), picks.end());
        }

        IterationTrace itrace;
        itrace.configs.resize(picks.size());
        auto eval_one = [&](std::size_t slot) {
            ConfigResult& res = itrace.configs[slot];
            res.enum_index = picks[slot];
            res.values = iteration.config_at(picks[slot]);
            res.train_seed = mix_seed(seed, "config", it, res.enum_index);
            json merged = frozen;
            merged.update(res.values);
            res.fold_scores =
                score_config_folds(grid.family, merged, data, folds, res.train_seed);
            res.mean_score = std::accumulate(res.fold_scores.begin(), res.fold_scores.end(), 0.0) /
                             static_cast<double>(res.fold_scores.size());
        };

        const std::size_t workers = static_cast<std::size_t>(std::max(1, threads));
        if (workers == 1) {
            for (std::size_t c = 0; c < itrace.configs.size(); ++c) eval_one(c);
        } else {
            for (std::size_t start = 0; start < itrace.configs.size(); start += workers) {
                std::vector<std::future<void>> wave;
                const std::size_t end = std::min(start + workers, itrace.configs.size());
                for (std::size_t c = start; c < end; ++c)
                    wave.push_back(std::async(std::launch::async, eval_one, c));
                for (auto& w : wave) w.get();
            }
        }
        trace.total_evaluated += itrace.configs.size();

        itrace.winner = 0;
        for (std::size_t c = 1; c < itrace.configs.size(); ++c)
            if (itrace.configs[c].mean_score > itrace.configs[itrace.winner].mean_score)
                itrace.winner = c;
        frozen.update(itrace.configs[itrace.winner].values);
        trace.iterations.push_back(std::move(itrace));
    }
    trace.final_config = frozen;
    return trace;
}

json trace_to_json(const SearchTrace& trace) {
    json j;
    j["family"] = to_string(trace.family);
    j["stage"] = trace.stage_id;
    j["k"] = trace.k;
    j["seed"] = trace.seed;
    j["budget"] = trace.budget;
    j["total_evaluated"] = trace.total_evaluated;
    j["final_config"] = trace.final_config;
    json iterations = json::array();
    for (const auto& it : trace.iterations) {
        json configs = json::array();
        for (const auto& c : it.configs)
            configs.push_back({{"enum_index", c.enum_index},
                               {"values", c.values},
                               {"train_seed", c.train_seed},
                               {"fold_scores", c.fold_scores},
                               {"mean_score", c.mean_score}});
        iterations.push_back({{"configs", configs}, {"winner", it.winner}});
    }
    j["iterations"] = iterations;
    return j;
}

SearchTrace trace_from_json(const json& j) {
    try {
        SearchTrace trace;
        trace.family = family_from_string(j.at("family").get<std::string>());
        trace.stage_id = j.at("stage").get<int>();
        trace.k = j.at("k").get<int>();
        trace.seed = j.at("seed").get<std::uint64_t>();
        trace.budget = j.at("budget").get<std::size_t>();
        trace.total_evaluated = j.at("total_evaluated").get<std::size_t>();
        trace.final_config = j.at("final_config");
        for (const auto& itj : j.at("iterations")) {
            IterationTrace it;
            it.winner = itj.at("winner").get<std::size_t>();
            for (const auto& cj : itj.at("configs")) {
                ConfigResult c;
                c.enum_index = cj.at("enum_index").get<std::size_t>();
                c.values = cj.at("values");
                c.train_seed = cj.at("train_seed").get<std::uint64_t>();
                c.fold_scores = cj.at("fold_scores").get<std::vector<double>>();
                c.mean_score = cj.at("mean_score").get<double>();
                it.configs.push_back(std::move(c));
            }
            trace.iterations.push_back(std::move(it));
        }
        return trace;
    } catch (const json::exception& e) {
        throw FormatError(std::string("malformed search trace: ") + e.what());
    }
}

} // namespace catcast
