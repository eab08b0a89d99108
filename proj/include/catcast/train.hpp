#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "catcast/model.hpp"

namespace catcast {

enum class OptKind { sgd, rmsprop, adagrad, adam };

const char* to_string(OptKind k);
OptKind optimizer_from_string(const std::string& s);

// Standard update rules. AdaGrad and RMSProp share the accumulator slot;
// Adam keeps first and second moments with bias correction.
class Optimizer {
public:
    Optimizer(OptKind kind, double lr, std::size_t n_params);
    void step(std::vector<double>& params, const std::vector<double>& grads);

    OptKind kind() const { return kind_; }

private:
    OptKind kind_;
    double lr_;
    std::vector<double> m_;
    std::vector<double> v_;
    std::int64_t t_ = 0;
};

struct TrainConfig {
    int epochs = 50;
    int batch_size = 128;
    double learning_rate = 0.001;
    OptKind optimizer = OptKind::adam;
    double dropout = 0.2;  // consumed by the model builder; echoed for provenance
    std::uint64_t seed = 42;

    void validate() const;
};

// A labelled row subset: either table rows consumed through embedding
// lookups, or rows of a pre-encoded design matrix.
struct DataView {
    const Table* table = nullptr;
    std::vector<std::size_t> var_cols;  // table columns of the model's input vars
    const Mat* dense = nullptr;
    std::vector<std::size_t> rows;
    std::vector<int> labels;  // 0-based class; -1 marks an unseen target

    std::size_t size() const { return rows.size(); }
};

// view over table rows for an embedding model; labels come from the
// model's target variable
DataView make_table_view(const Table& table, const ModelGraph& model,
                         const std::vector<std::size_t>& rows);

// view over a design matrix (row i of `dense` pairs with labels[i])
DataView make_dense_view(const Mat& dense, const std::vector<int>& labels);

// 0-based training labels for a target column; unseen -> -1
std::vector<int> gather_labels(const Table& table, const std::string& target_var,
                               const std::vector<std::size_t>& rows);

BatchData gather_batch(const ModelGraph& model, const DataView& view,
                       const std::size_t* order, std::size_t count,
                       std::vector<int>* labels_out);

struct EpochStat {
    double train_loss = 0.0;
    double val_top1 = -1.0;  // -1 when no validation set was given
};

// Seeded epoch shuffles and per-batch dropout streams make the whole run a
// pure function of (model init, data, config).
std::vector<EpochStat> train(ModelGraph& model, const DataView& train_data,
                             const DataView* val_data, const TrainConfig& config);

// infer-mode probabilities over a whole view, in row order
Mat predict_probs(const ModelGraph& model, const DataView& view, std::size_t batch_size = 256);

} // namespace catcast
