#include "catcast/pipeline.hpp"

#include <algorithm>
#include <numeric>

#include "catcast/ingest.hpp"

namespace catcast {

StagePlan build_stage_plan(int stage_id, const Schema& schema) {
    const StageVars& sv = stage_variables(stage_id);
    StagePlan plan;
    plan.stage_id = stage_id;
    plan.input_vars = sv.inputs;
    plan.target_var = sv.target;
    for (const auto& name : sv.inputs)
        if (schema.find(name) == Schema::npos)
            throw SchemaError("stage " + std::to_string(stage_id) + " needs variable '" + name +
                              "' in the schema");
    const std::size_t tc = schema.find(sv.target);
    if (tc == Schema::npos)
        throw SchemaError("stage " + std::to_string(stage_id) + " needs target '" + sv.target +
                          "' in the schema");
    plan.target_cardinality = schema.var(tc).vocab.cardinality();
    return plan;
}

const char* to_string(EvalMode m) {
    return m == EvalMode::teacher_forced ? "teacher_forced" : "chained";
}

EvalMode eval_mode_from_string(const std::string& s) {
    if (s == "teacher" || s == "teacher_forced") return EvalMode::teacher_forced;
    if (s == "chained" || s == "chain") return EvalMode::chained;
    throw ConfigError("unknown evaluation mode '" + s + "'");
}

double topk_accuracy(const Mat& probs, const std::vector<int>& labels, int k) {
    if (k < 1 || static_cast<std::size_t>(k) > probs.cols)
        throw ConfigError("top-k rank " + std::to_string(k) + " outside 1.." +
                          std::to_string(probs.cols));
    if (labels.size() != probs.rows) throw DataError("label count does not match row count");
    std::vector<std::size_t> idx(probs.cols);
    std::size_t hits = 0;
    for (std::size_t r = 0; r < probs.rows; ++r) {
        if (labels[r] < 0) continue;  // unseen target can never be ranked
        const double* row = probs[r];
        std::iota(idx.begin(), idx.end(), 0);
        std::partial_sort(idx.begin(), idx.begin() + k, idx.end(),
                          [row](std::size_t a, std::size_t b) {
                              if (row[a] != row[b]) return row[a] > row[b];
                              return a < b;
                          });
        const std::size_t y = static_cast<std::size_t>(labels[r]);
        for (int i = 0; i < k; ++i) {
            if (idx[static_cast<std::size_t>(i)] == y) {
                ++hits;
                break;
            }
        }
    }
    return probs.rows == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(probs.rows);
}

NeuralPredictor::NeuralPredictor(ModelGraph model, StagePlan plan)
    : model_(std::move(model)), plan_(std::move(plan)) {}

Mat NeuralPredictor::predict(const Table& table, const std::vector<std::size_t>& rows) const {
    if (model_.uses_embeddings) {
        const DataView view = make_table_view(table, model_, rows);
        return predict_probs(model_, view);
    }
    const EncodedMatrix enc = encode_rows(table, rows, model_.input_encoding, model_.input_vars);
    DataView view = make_dense_view(enc.values, std::vector<int>(rows.size(), 0));
    return predict_probs(model_, view);
}

BaselinePredictor::BaselinePredictor(LogRegModel model, EncodingScheme scheme, StagePlan plan)
    : kind_(BaselineKind::logreg), logreg_(std::move(model)), scheme_(scheme),
      plan_(std::move(plan)), classes_(logreg_.classes) {}
BaselinePredictor::BaselinePredictor(TreeModel model, EncodingScheme scheme, StagePlan plan)
    : kind_(BaselineKind::tree), tree_(std::move(model)), scheme_(scheme),
      plan_(std::move(plan)), classes_(tree_.classes) {}
BaselinePredictor::BaselinePredictor(ForestModel model, EncodingScheme scheme, StagePlan plan)
    : kind_(BaselineKind::forest), forest_(std::move(model)), scheme_(scheme),
      plan_(std::move(plan)), classes_(forest_.classes) {}

Mat BaselinePredictor::predict(const Table& table, const std::vector<std::size_t>& rows) const {
    const EncodedMatrix enc = encode_rows(table, rows, scheme_, plan_.input_vars);
    std::vector<std::size_t> all(rows.size());
    std::iota(all.begin(), all.end(), 0);
    switch (kind_) {
        case BaselineKind::logreg: return logreg_predict(logreg_, enc.values, all);
        case BaselineKind::tree: return tree_predict(tree_, enc.values, all);
        case BaselineKind::forest: return forest_predict(forest_, enc.values, all);
    }
    throw Error("unreachable");
}

namespace {

int top1_class(const double* row, int classes) {
    int best = 0;
    for (int c = 1; c < classes; ++c)
        if (row[c] > row[best]) best = c;
    return best;
}

// runs the upstream chain and overwrites each parent target column with
// the upstream Top1 prediction (vocabulary index = class + 1)
Table chain_table(const Table& table, const std::vector<std::size_t>& rows,
                  const std::vector<const Predictor*>& upstream) {
    Table chained = table;
    for (const Predictor* up : upstream) {
        const Mat probs = up->predict(chained, rows);
        const std::size_t col = chained.schema.require(up->plan().target_var);
        for (std::size_t i = 0; i < rows.size(); ++i)
            chained.cells[rows[i] * chained.schema.size() + col] =
                top1_class(probs[i], up->classes()) + 1;
    }
    return chained;
}

} // namespace

StageReport evaluate_stage(const Predictor& model, const Table& table, const StagePlan& plan,
                           EvalMode mode, const std::vector<std::size_t>& rows,
                           const std::vector<const Predictor*>& upstream) {
    StageReport report;
    report.stage_id = plan.stage_id;
    report.mode = mode;
    report.n_evaluated = rows.size();

    Mat probs;
    if (mode == EvalMode::teacher_forced) {
        probs = model.predict(table, rows);
    } else {
        const std::size_t needed = static_cast<std::size_t>(plan.stage_id) - 1;
        if (upstream.size() < needed)
            throw ConfigError("chained evaluation of stage " + std::to_string(plan.stage_id) +
                              " needs " + std::to_string(needed) + " upstream models");
        const std::vector<const Predictor*> chain(upstream.begin(),
                                                  upstream.begin() + needed);
        probs = model.predict(chain_table(table, rows, chain), rows);
    }

    const std::vector<int> labels = gather_labels(table, plan.target_var, rows);
    const int k_max = std::min(3, static_cast<int>(probs.cols));
    report.top1 = topk_accuracy(probs, labels, 1);
    report.top2 = k_max >= 2 ? topk_accuracy(probs, labels, 2) : report.top1;
    report.top3 = k_max >= 3 ? topk_accuracy(probs, labels, 3) : report.top2;
    return report;
}

ChainResult chain_predict(const std::map<std::string, std::string>& record,
                          const std::vector<const Predictor*>& models) {
    if (models.empty()) throw ConfigError("chain prediction needs at least the stage-1 model");

    // one-row table over the first model's schema; later stages share vocabularies
    ChainResult result;
    const auto* first = dynamic_cast<const NeuralPredictor*>(models.front());
    if (!first) throw ConfigError("chain prediction currently drives neural artifacts");
    Schema schema = first->model().schema;

    // collect every schema across stages so all inputs+targets are typed
    std::vector<VariableSpec> vars = schema.vars();
    for (const Predictor* p : models) {
        const auto* np = dynamic_cast<const NeuralPredictor*>(p);
        if (!np) throw ConfigError("chain prediction currently drives neural artifacts");
        for (const auto& v : np->model().schema.vars()) {
            bool known = false;
            for (const auto& existing : vars)
                if (existing.name == v.name) known = true;
            if (!known) vars.push_back(v);
        }
    }
    Table row_table;
    row_table.schema = Schema(std::move(vars));
    row_table.cells.assign(row_table.schema.size(), 0);
    row_table.years = {0};
    row_table.provenance = Provenance::synthetic;

    for (const auto& [key, raw_value] : record) {
        const std::size_t c = row_table.schema.find(key);
        if (c == Schema::npos) continue;
        const std::string value = normalize_category(raw_value);
        const int idx = row_table.schema.var(c).vocab.lookup(value);
        if (idx == kUnkIndex)
            result.warnings.push_back("unseen value '" + raw_value + "' for " + key +
                                      "; using the UNK slot");
        row_table.cells[c] = idx;
    }

    const std::vector<std::size_t> rows = {0};
    for (const Predictor* p : models) {
        const StagePlan& plan = p->plan();
        for (const auto& name : plan.input_vars) {
            if (row_table.schema.find(name) == Schema::npos)
                throw ConfigError("record is missing variable '" + name + "'");
        }
        const Mat probs = p->predict(row_table, rows);
        std::vector<std::size_t> order(probs.cols);
        std::iota(order.begin(), order.end(), 0);
        const double* pr = probs[0];
        std::partial_sort(order.begin(), order.begin() + std::min<std::size_t>(3, order.size()),
                          order.end(), [pr](std::size_t a, std::size_t b) {
                              if (pr[a] != pr[b]) return pr[a] > pr[b];
                              return a < b;
                          });

        const std::size_t target_col = row_table.schema.require(plan.target_var);
        const Vocabulary& vocab = row_table.schema.var(target_col).vocab;
        ChainStageResult stage;
        stage.stage_id = plan.stage_id;
        stage.target_var = plan.target_var;
        for (std::size_t i = 0; i < std::min<std::size_t>(3, order.size()); ++i)
            stage.top3.emplace_back(vocab.decode(static_cast<int>(order[i]) + 1),
                                    pr[order[i]]);
        result.stages.push_back(std::move(stage));

        // feed the Top1 class forward as the recorded parent feature
        row_table.cells[target_col] = static_cast<std::int32_t>(order[0]) + 1;
    }
    return result;
}

} // namespace catcast
