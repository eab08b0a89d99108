#include "catcast/train.hpp"

#include <algorithm>
#include <cstring>

#include "catcast/rng.hpp"

namespace catcast {

void TrainConfig::validate() const {
    if (epochs < 1) throw ConfigError("epochs must be >= 1");
    if (batch_size < 1) throw ConfigError("batch size must be >= 1");
    if (learning_rate <= 0.0) throw ConfigError("learning rate must be positive");
    if (dropout < 0.0 || dropout >= 1.0) throw ConfigError("dropout must be in [0, 1)");
}

std::vector<int> gather_labels(const Table& table, const std::string& target_var,
                               const std::vector<std::size_t>& rows) {
    const std::size_t col = table.schema.require(target_var);
    std::vector<int> labels(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        labels[i] = table.at(rows[i], col) - 1;  // UNK(0) becomes -1
    return labels;
}

DataView make_table_view(const Table& table, const ModelGraph& model,
                         const std::vector<std::size_t>& rows) {
    DataView v;
    v.table = &table;
    for (const auto& name : model.input_vars) v.var_cols.push_back(table.schema.require(name));
    v.rows = rows;
    v.labels = gather_labels(table, model.target_var, rows);
    return v;
}

DataView make_dense_view(const Mat& dense, const std::vector<int>& labels) {
    DataView v;
    v.dense = &dense;
    v.rows.resize(dense.rows);
    for (std::size_t i = 0; i < dense.rows; ++i) v.rows[i] = i;
    v.labels = labels;
    return v;
}

BatchData gather_batch(const ModelGraph& model, const DataView& view,
                       const std::size_t* order, std::size_t count,
                       std::vector<int>* labels_out) {
    BatchData b;
    b.n = count;
    if (labels_out) labels_out->resize(count);
    if (model.uses_embeddings) {
        const std::size_t n_vars = view.var_cols.size();
        b.idx.resize(count * n_vars);
        for (std::size_t i = 0; i < count; ++i) {
            const std::size_t pos = order[i];
            const std::size_t row = view.rows[pos];
            for (std::size_t v = 0; v < n_vars; ++v)
                b.idx[i * n_vars + v] = view.table->at(row, view.var_cols[v]);
            if (labels_out) (*labels_out)[i] = view.labels[pos];
        }
    } else {
        const std::size_t w = view.dense->cols;
        b.dense.resize(count * w);
        for (std::size_t i = 0; i < count; ++i) {
            const std::size_t pos = order[i];
            std::memcpy(b.dense.data() + i * w, (*view.dense)[view.rows[pos]],
                        w * sizeof(double));
            if (labels_out) (*labels_out)[i] = view.labels[pos];
        }
    }
    return b;
}

Mat predict_probs(const ModelGraph& model, const DataView& view, std::size_t batch_size) {
    Mat out(view.size(), static_cast<std::size_t>(model.classes));
    std::vector<std::size_t> order(view.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    for (std::size_t start = 0; start < order.size(); start += batch_size) {
        const std::size_t count = std::min(batch_size, order.size() - start);
        const BatchData b = gather_batch(model, view, order.data() + start, count, nullptr);
        const Mat probs = forward(model, b, RunMode::infer);
        std::memcpy(out[start], probs.a.data(), probs.a.size() * sizeof(double));
    }
    return out;
}

namespace {

double top1_accuracy(const Mat& probs, const std::vector<int>& labels) {
    std::size_t hits = 0;
    for (std::size_t r = 0; r < probs.rows; ++r) {
        const double* row = probs[r];
        std::size_t best = 0;
        for (std::size_t c = 1; c < probs.cols; ++c)
            if (row[c] > row[best]) best = c;
        if (labels[r] >= 0 && static_cast<std::size_t>(labels[r]) == best) ++hits;
    }
    return probs.rows == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(probs.rows);
}

} // namespace

std::vector<EpochStat> train(ModelGraph& model, const DataView& train_data,
                             const DataView* val_data, const TrainConfig& config) {
    config.validate();
    const std::size_t n = train_data.size();
    if (n == 0) throw DataError("training set is empty");
    for (int y : train_data.labels)
        if (y < 0 || y >= model.classes)
            throw DataError("training label outside the model's " +
                            std::to_string(model.classes) + " classes");

    Optimizer opt(config.optimizer, config.learning_rate, model.params.size());
    const std::size_t bs = static_cast<std::size_t>(config.batch_size);

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;

    std::vector<EpochStat> history;
    history.reserve(static_cast<std::size_t>(config.epochs));
    std::vector<int> batch_labels;
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        Rng shuffle_rng(mix_seed(config.seed, "shuffle", static_cast<std::uint64_t>(epoch)));
        shuffle_rng.shuffle(order);

        double loss_sum = 0.0;
        std::size_t batch_index = 0;
        for (std::size_t start = 0; start < n; start += bs, ++batch_index) {
            const std::size_t count = std::min(bs, n - start);
            const BatchData batch =
                gather_batch(model, train_data, order.data() + start, count, &batch_labels);
            const std::uint64_t drop_seed = mix_seed(config.seed, "dropout",
                                                     static_cast<std::uint64_t>(epoch),
                                                     batch_index);
            const double loss = loss_and_grad(model, batch, batch_labels, drop_seed);
            loss_sum += loss * static_cast<double>(count);
            opt.step(model.params, model.grads);
        }

        EpochStat stat;
        stat.train_loss = loss_sum / static_cast<double>(n);
        if (val_data && val_data->size() > 0)
            stat.val_top1 = top1_accuracy(predict_probs(model, *val_data), val_data->labels);
        history.push_back(stat);
    }
    return history;
}

} // namespace catcast
