#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "catcast/baselines.hpp"
#include "catcast/core.hpp"
#include "catcast/encoders.hpp"
#include "catcast/train.hpp"

namespace catcast {

struct StagePlan {
    int stage_id = 0;
    std::vector<std::string> input_vars;
    std::string target_var;
    int target_cardinality = 0;
};

StagePlan build_stage_plan(int stage_id, const Schema& schema);

// fraction of rows whose label ranks in the k most probable classes;
// probability ties break to the lower class index
double topk_accuracy(const Mat& probs, const std::vector<int>& labels, int k);

enum class EvalMode { teacher_forced, chained };

const char* to_string(EvalMode m);
EvalMode eval_mode_from_string(const std::string& s);

struct StageReport {
    int stage_id = 0;
    double top1 = 0.0, top2 = 0.0, top3 = 0.0;
    std::size_t n_evaluated = 0;
    EvalMode mode = EvalMode::teacher_forced;
    nlohmann::json provenance = nlohmann::json::object();
};

// Anything that can score table rows: a neural model over embeddings or a
// classical encoding, or one of the non-neural baselines.
class Predictor {
public:
    virtual ~Predictor() = default;
    virtual Mat predict(const Table& table, const std::vector<std::size_t>& rows) const = 0;
    virtual int classes() const = 0;
    virtual const StagePlan& plan() const = 0;
};

class NeuralPredictor : public Predictor {
public:
    NeuralPredictor(ModelGraph model, StagePlan plan);
    Mat predict(const Table& table, const std::vector<std::size_t>& rows) const override;
    int classes() const override { return model_.classes; }
    const StagePlan& plan() const override { return plan_; }
    const ModelGraph& model() const { return model_; }

private:
    ModelGraph model_;
    StagePlan plan_;
};

enum class BaselineKind { logreg, tree, forest };

class BaselinePredictor : public Predictor {
public:
    BaselinePredictor(LogRegModel model, EncodingScheme scheme, StagePlan plan);
    BaselinePredictor(TreeModel model, EncodingScheme scheme, StagePlan plan);
    BaselinePredictor(ForestModel model, EncodingScheme scheme, StagePlan plan);
    Mat predict(const Table& table, const std::vector<std::size_t>& rows) const override;
    int classes() const override { return classes_; }
    const StagePlan& plan() const override { return plan_; }

    BaselineKind kind() const { return kind_; }
    const LogRegModel& logreg() const { return logreg_; }
    const TreeModel& tree() const { return tree_; }
    const ForestModel& forest() const { return forest_; }
    const EncodingScheme& scheme() const { return scheme_; }

private:
    BaselineKind kind_;
    LogRegModel logreg_;
    TreeModel tree_;
    ForestModel forest_;
    EncodingScheme scheme_;
    StagePlan plan_;
    int classes_ = 0;
};

// In chained mode the upstream predictors' Top1 answers overwrite the
// recorded parent features before this stage sees the rows; labels always
// come from the original table.
StageReport evaluate_stage(const Predictor& model, const Table& table, const StagePlan& plan,
                           EvalMode mode, const std::vector<std::size_t>& rows,
                           const std::vector<const Predictor*>& upstream = {});

struct ChainStageResult {
    int stage_id = 0;
    std::string target_var;
    std::vector<std::pair<std::string, double>> top3;  // category, probability
};

struct ChainResult {
    std::vector<ChainStageResult> stages;
    std::vector<std::string> warnings;  // e.g. unseen categories mapped to UNK
};

// one record through stages 1..n, each stage fed the previous Top1
ChainResult chain_predict(const std::map<std::string, std::string>& record,
                          const std::vector<const Predictor*>& models);

} // namespace catcast
