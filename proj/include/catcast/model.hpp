#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "catcast/core.hpp"
#include "catcast/encoders.hpp"
#include "catcast/mat.hpp"

namespace catcast {

enum class Activation { linear, relu, tanh_fn, sigmoid, hard_sigmoid };

const char* to_string(Activation a);
Activation activation_from_string(const std::string& s);

struct LayerSpec {
    enum class Kind { dense, conv1d, maxpool1d, dropout, flatten, softmax_output };
    Kind kind = Kind::dense;
    int units = 0;        // dense
    int filters = 0;      // conv1d
    int kernel = 0;       // conv1d
    int pool = 0;         // maxpool1d
    double rate = 0.0;    // dropout
    int classes = 0;      // softmax_output
    Activation act = Activation::linear;

    static LayerSpec dense(int units, Activation act);
    static LayerSpec conv1d(int filters, int kernel, Activation act);
    static LayerSpec maxpool1d(int pool);
    static LayerSpec dropout(double rate);
    static LayerSpec flatten();
    static LayerSpec softmax_output(int classes);
};

struct EmbeddingSpec {
    std::string var;
    int rows = 0;  // cardinality + 1 (row 0 is UNK)
    int dim = 0;
};

struct ParamInfo {
    enum class Init { zero, glorot, embedding };
    std::string name;
    std::vector<int> shape;
    std::size_t offset = 0;
    std::size_t count = 0;
    Init init = Init::zero;
    int fan_in = 0, fan_out = 0;
};

// feature-map extent between layers: a flat vector is (len, 1)
struct SeqShape {
    int len = 0;
    int channels = 1;
    int width() const { return len * channels; }
};

struct ModelGraph {
    // input side: either per-variable embedding tables over index rows, or a
    // dense design matrix produced by one of the classical encoders
    std::vector<std::string> input_vars;
    bool uses_embeddings = false;
    std::vector<EmbeddingSpec> embeddings;
    EncodingScheme input_encoding;  // dense mode only
    int input_width = 0;

    std::vector<LayerSpec> trunk;  // ends with softmax_output
    std::string target_var;
    int classes = 0;

    std::vector<double> params;
    std::vector<double> grads;
    std::vector<ParamInfo> param_infos;
    std::vector<int> layer_weight;  // param_infos index of each trunk layer's W (-1 if none)
    std::vector<int> layer_bias;
    std::vector<SeqShape> shapes;   // shapes[0] = input, shapes[i+1] = after trunk[i]

    Schema schema;  // inputs + target, with vocabularies (artifact payload)
    nlohmann::json provenance = nlohmann::json::object();
    std::uint64_t init_seed = 0;

    double* param(int info_index) { return params.data() + param_infos[info_index].offset; }
    const double* param(int info_index) const {
        return params.data() + param_infos[info_index].offset;
    }
    double* grad(int info_index) { return grads.data() + param_infos[info_index].offset; }
};

// shape/parameter bookkeeping; throws ConfigError on an inconsistent stack
void finalize_model(ModelGraph& model);

void init_params(ModelGraph& model, std::uint64_t seed);

// a gathered mini-batch, owned
struct BatchData {
    std::size_t n = 0;
    std::vector<std::int32_t> idx;  // embedding mode: n × n_vars
    std::vector<double> dense;      // dense mode: n × input_width
};

enum class RunMode { train, infer };

struct Workspace {
    std::vector<Mat> acts;
    std::vector<Mat> pre;
    std::vector<std::vector<std::uint8_t>> mask;
    std::vector<std::vector<std::int32_t>> argmax;
};

// rows of the result are probability vectors; dropout only runs in train
// mode, seeded so a fixed dropout_seed reproduces the exact same masks
Mat forward(const ModelGraph& model, const BatchData& batch, RunMode mode,
            std::uint64_t dropout_seed = 0, Workspace* ws = nullptr);

// -mean(log p[label]) with p clamped to [1e-12, 1]
double batch_loss(const Mat& probs, const std::vector<int>& labels);

double loss_only(const ModelGraph& model, const BatchData& batch, const std::vector<int>& labels,
                 RunMode mode, std::uint64_t dropout_seed);

// train-mode forward + full backpropagation; grads are zeroed first
double loss_and_grad(ModelGraph& model, const BatchData& batch, const std::vector<int>& labels,
                     std::uint64_t dropout_seed);

enum class ModelFamily { mlp, conv1d };

const char* to_string(ModelFamily f);
ModelFamily family_from_string(const std::string& s);

struct BuildOverrides {
    double dropout = 0.2;
    Activation act = Activation::relu;
    std::vector<int> dense_units;    // empty = stage default
    std::vector<int> conv_filters;   // empty = stage default
    std::vector<int> conv_kernels;
    int pool = 2;
    int emb_dim_default = -1;        // -1 = published per-variable sizes
    std::map<std::string, int> emb_dims;
};

// Table 5 wiring with the published architectures as defaults; output width
// follows the actual target cardinality of the schema
ModelGraph build_stage_model(int stage_id, const Schema& schema, ModelFamily family,
                             const BuildOverrides& overrides = {});

// dense-input model for a grid-search configuration
ModelGraph build_grid_model(ModelFamily family, const nlohmann::json& config, int input_width,
                            int classes);

// published default embedding width of a variable
int default_embedding_dim(const std::string& var);

} // namespace catcast
