#include "catcast/model.hpp"

#include <algorithm>
#include <cmath>

#include "catcast/rng.hpp"

namespace catcast {

const char* to_string(Activation a) {
    switch (a) {
        case Activation::linear: return "linear";
        case Activation::relu: return "relu";
        case Activation::tanh_fn: return "tanh";
        case Activation::sigmoid: return "sigmoid";
        case Activation::hard_sigmoid: return "hard_sigmoid";
    }
    return "linear";
}

Activation activation_from_string(const std::string& s) {
    if (s == "linear") return Activation::linear;
    if (s == "relu") return Activation::relu;
    if (s == "tanh") return Activation::tanh_fn;
    if (s == "sigmoid") return Activation::sigmoid;
    if (s == "hard_sigmoid" || s == "hard sigmoid") return Activation::hard_sigmoid;
    throw ConfigError("unknown activation '" + s + "'");
}

const char* to_string(ModelFamily f) { return f == ModelFamily::mlp ? "mlp" : "conv1d"; }

ModelFamily family_from_string(const std::string& s) {
    if (s == "mlp") return ModelFamily::mlp;
    if (s == "conv1d" || s == "cnn" || s == "conv") return ModelFamily::conv1d;
    throw ConfigError("unknown model family '" + s + "'");
}

LayerSpec LayerSpec::dense(int units, Activation act) {
    LayerSpec l;
    l.kind = Kind::dense;
    l.units = units;
    l.act = act;
    return l;
}
LayerSpec LayerSpec::conv1d(int filters, int kernel, Activation act) {
    LayerSpec l;
    l.kind = Kind::conv1d;
    l.filters = filters;
    l.kernel = kernel;
    l.act = act;
    return l;
}
LayerSpec LayerSpec::maxpool1d(int pool) {
    LayerSpec l;
    l.kind = Kind::maxpool1d;
    l.pool = pool;
    return l;
}
LayerSpec LayerSpec::dropout(double rate) {
    LayerSpec l;
    l.kind = Kind::dropout;
    l.rate = rate;
    return l;
}
LayerSpec LayerSpec::flatten() {
    LayerSpec l;
    l.kind = Kind::flatten;
    return l;
}
LayerSpec LayerSpec::softmax_output(int classes) {
    LayerSpec l;
    l.kind = Kind::softmax_output;
    l.classes = classes;
    return l;
}

namespace {

double activate(Activation a, double z) {
    switch (a) {
        case Activation::linear: return z;
        case Activation::relu: return z > 0.0 ? z : 0.0;
        case Activation::tanh_fn: return std::tanh(z);
        case Activation::sigmoid: return 1.0 / (1.0 + std::exp(-z));
        case Activation::hard_sigmoid: return std::clamp(0.2 * z + 0.5, 0.0, 1.0);
    }
    return z;
}

// derivative in terms of the preactivation z and the output y
double activate_grad(Activation a, double z, double y) {
    switch (a) {
        case Activation::linear: return 1.0;
        case Activation::relu: return z > 0.0 ? 1.0 : 0.0;
        case Activation::tanh_fn: return 1.0 - y * y;
        case Activation::sigmoid: return y * (1.0 - y);
        case Activation::hard_sigmoid: {
            const double t = 0.2 * z + 0.5;
            return (t > 0.0 && t < 1.0) ? 0.2 : 0.0;
        }
    }
    return 1.0;
}

std::size_t add_param(ModelGraph& m, std::string name, std::vector<int> shape,
                      ParamInfo::Init init, int fan_in, int fan_out) {
    ParamInfo info;
    info.name = std::move(name);
    info.shape = std::move(shape);
    info.count = 1;
    for (int d : info.shape) info.count *= static_cast<std::size_t>(d);
    info.offset = m.params.size();
    info.init = init;
    info.fan_in = fan_in;
    info.fan_out = fan_out;
    m.params.resize(m.params.size() + info.count, 0.0);
    m.param_infos.push_back(std::move(info));
    return m.param_infos.size() - 1;
}

} // namespace

void finalize_model(ModelGraph& m) {
    m.params.clear();
    m.param_infos.clear();
    m.layer_weight.assign(m.trunk.size(), -1);
    m.layer_bias.assign(m.trunk.size(), -1);
    m.shapes.clear();

    if (m.trunk.empty() || m.trunk.back().kind != LayerSpec::Kind::softmax_output)
        throw ConfigError("model trunk must end with a softmax output layer");
    for (std::size_t i = 0; i + 1 < m.trunk.size(); ++i)
        if (m.trunk[i].kind == LayerSpec::Kind::softmax_output)
            throw ConfigError("softmax output must be the last layer");

    int width = 0;
    if (m.uses_embeddings) {
        if (m.embeddings.size() != m.input_vars.size())
            throw ConfigError("one embedding table per input variable required");
        for (const auto& e : m.embeddings) {
            if (e.rows < 1 || e.dim < 1) throw ConfigError("bad embedding shape for '" + e.var + "'");
            add_param(m, "emb:" + e.var, {e.rows, e.dim}, ParamInfo::Init::embedding, 0, 0);
            width += e.dim;
        }
    } else {
        if (m.input_width < 1) throw ConfigError("dense input width must be positive");
        width = m.input_width;
    }
    m.input_width = width;

    SeqShape cur{width, 1};
    m.shapes.push_back(cur);
    int dense_no = 0, conv_no = 0;
    for (std::size_t i = 0; i < m.trunk.size(); ++i) {
        const LayerSpec& l = m.trunk[i];
        switch (l.kind) {
            case LayerSpec::Kind::dense: {
                if (l.units < 1) throw ConfigError("dense layer needs at least one unit");
                const int in = cur.width();
                m.layer_weight[i] = static_cast<int>(add_param(
                    m, "dense" + std::to_string(dense_no) + ":W", {in, l.units},
                    ParamInfo::Init::glorot, in, l.units));
                m.layer_bias[i] = static_cast<int>(
                    add_param(m, "dense" + std::to_string(dense_no) + ":b", {l.units},
                              ParamInfo::Init::zero, 0, 0));
                ++dense_no;
                cur = {l.units, 1};
                break;
            }
            case LayerSpec::Kind::conv1d: {
                if (l.filters < 1 || l.kernel < 1) throw ConfigError("bad conv1d shape");
                if (cur.len < l.kernel)
                    throw ConfigError("conv1d kernel " + std::to_string(l.kernel) +
                                      " exceeds sequence length " + std::to_string(cur.len));
                const int fan_in = l.kernel * cur.channels;
                const int fan_out = l.kernel * l.filters;
                m.layer_weight[i] = static_cast<int>(add_param(
                    m, "conv" + std::to_string(conv_no) + ":W",
                    {l.filters, l.kernel, cur.channels}, ParamInfo::Init::glorot, fan_in, fan_out));
                m.layer_bias[i] = static_cast<int>(
                    add_param(m, "conv" + std::to_string(conv_no) + ":b", {l.filters},
                              ParamInfo::Init::zero, 0, 0));
                ++conv_no;
                cur = {cur.len - l.kernel + 1, l.filters};
                break;
            }
            case LayerSpec::Kind::maxpool1d: {
                if (l.pool < 1) throw ConfigError("bad maxpool size");
                if (cur.len / l.pool < 1)
                    throw ConfigError("maxpool window " + std::to_string(l.pool) +
                                      " exceeds sequence length " + std::to_string(cur.len));
                cur = {cur.len / l.pool, cur.channels};
                break;
            }
            case LayerSpec::Kind::dropout: {
                if (l.rate < 0.0 || l.rate >= 1.0) throw ConfigError("dropout rate must be in [0, 1)");
                break;
            }
            case LayerSpec::Kind::flatten: {
                cur = {cur.width(), 1};
                break;
            }
            case LayerSpec::Kind::softmax_output: {
                if (l.classes < 1) throw ConfigError("softmax output needs at least one class");
                const int in = cur.width();
                m.layer_weight[i] = static_cast<int>(
                    add_param(m, "out:W", {in, l.classes}, ParamInfo::Init::glorot, in, l.classes));
                m.layer_bias[i] = static_cast<int>(
                    add_param(m, "out:b", {l.classes}, ParamInfo::Init::zero, 0, 0));
                cur = {l.classes, 1};
                m.classes = l.classes;
                break;
            }
        }
        m.shapes.push_back(cur);
    }
    m.grads.assign(m.params.size(), 0.0);
}

void init_params(ModelGraph& m, std::uint64_t seed) {
    Rng rng(seed);
    m.init_seed = seed;
    for (const auto& info : m.param_infos) {
        double* p = m.params.data() + info.offset;
        switch (info.init) {
            case ParamInfo::Init::zero:
                std::fill(p, p + info.count, 0.0);
                break;
            case ParamInfo::Init::embedding:
                for (std::size_t i = 0; i < info.count; ++i) p[i] = rng.uniform(-0.05, 0.05);
                break;
            case ParamInfo::Init::glorot: {
                const double limit =
                    std::sqrt(6.0 / static_cast<double>(info.fan_in + info.fan_out));
                for (std::size_t i = 0; i < info.count; ++i) p[i] = rng.uniform(-limit, limit);
                break;
            }
        }
    }
}

namespace {

void softmax_rows(Mat& z) {
    for (std::size_t r = 0; r < z.rows; ++r) {
        double* row = z[r];
        double mx = row[0];
        for (std::size_t c = 1; c < z.cols; ++c) mx = std::max(mx, row[c]);
        double sum = 0.0;
        for (std::size_t c = 0; c < z.cols; ++c) {
            row[c] = std::exp(row[c] - mx);
            sum += row[c];
        }
        const double inv = 1.0 / sum;
        for (std::size_t c = 0; c < z.cols; ++c) row[c] *= inv;
    }
}

Mat input_activation(const ModelGraph& m, const BatchData& batch) {
    Mat x(batch.n, static_cast<std::size_t>(m.input_width));
    if (m.uses_embeddings) {
        const std::size_t n_vars = m.input_vars.size();
        for (std::size_t r = 0; r < batch.n; ++r) {
            double* dst = x[r];
            std::size_t off = 0;
            for (std::size_t v = 0; v < n_vars; ++v) {
                const std::int32_t id = batch.idx[r * n_vars + v];
                const EmbeddingSpec& e = m.embeddings[v];
                if (id < 0 || id >= e.rows)
                    throw IndexError("embedding index " + std::to_string(id) +
                                     " out of range for '" + e.var + "'");
                const double* row =
                    m.param(static_cast<int>(v)) + static_cast<std::size_t>(id) * e.dim;
                for (int d = 0; d < e.dim; ++d) dst[off + static_cast<std::size_t>(d)] = row[d];
                off += static_cast<std::size_t>(e.dim);
            }
        }
    } else {
        std::copy(batch.dense.begin(), batch.dense.end(), x.a.begin());
    }
    return x;
}

} // namespace

Mat forward(const ModelGraph& m, const BatchData& batch, RunMode mode,
            std::uint64_t dropout_seed, Workspace* ws) {
    Mat cur = input_activation(m, batch);
    if (ws) {
        ws->acts.assign(m.trunk.size() + 1, Mat());
        ws->pre.assign(m.trunk.size(), Mat());
        ws->mask.assign(m.trunk.size(), {});
        ws->argmax.assign(m.trunk.size(), {});
        ws->acts[0] = cur;
    }
    Rng drop_rng(mix_seed(dropout_seed, "dropout-mask"));

    for (std::size_t li = 0; li < m.trunk.size(); ++li) {
        const LayerSpec& l = m.trunk[li];
        const SeqShape in_shape = m.shapes[li];
        const SeqShape out_shape = m.shapes[li + 1];
        Mat next;
        switch (l.kind) {
            case LayerSpec::Kind::dense:
            case LayerSpec::Kind::softmax_output: {
                const int in = in_shape.width();
                const int out = l.kind == LayerSpec::Kind::dense ? l.units : l.classes;
                const double* W = m.param(m.layer_weight[li]);
                const double* b = m.param(m.layer_bias[li]);
                Mat z(batch.n, static_cast<std::size_t>(out));
                matmul(cur.a.data(), W, z.a.data(), batch.n, static_cast<std::size_t>(in),
                       static_cast<std::size_t>(out));
                for (std::size_t r = 0; r < batch.n; ++r) {
                    double* zr = z[r];
                    for (int c = 0; c < out; ++c) zr[c] += b[c];
                }
                if (ws) ws->pre[li] = z;
                if (l.kind == LayerSpec::Kind::dense) {
                    next = z;
                    if (l.act != Activation::linear)
                        for (double& v : next.a) v = activate(l.act, v);
                } else {
                    next = z;
                    softmax_rows(next);
                }
                break;
            }
            case LayerSpec::Kind::conv1d: {
                const int len_in = in_shape.len, ch = in_shape.channels;
                const int len_out = out_shape.len, nf = l.filters, k = l.kernel;
                const double* W = m.param(m.layer_weight[li]);
                const double* b = m.param(m.layer_bias[li]);
                Mat z(batch.n, static_cast<std::size_t>(len_out * nf));
                for (std::size_t r = 0; r < batch.n; ++r) {
                    const double* xr = cur[r];
                    double* zr = z[r];
                    for (int o = 0; o < len_out; ++o) {
                        for (int f = 0; f < nf; ++f) {
                            const double* wf = W + static_cast<std::size_t>(f) * k * ch;
                            double s = b[f];
                            for (int kk = 0; kk < k; ++kk) {
                                const double* xs = xr + static_cast<std::size_t>(o + kk) * ch;
                                const double* wk = wf + static_cast<std::size_t>(kk) * ch;
                                for (int c = 0; c < ch; ++c) s += xs[c] * wk[c];
                            }
                            zr[static_cast<std::size_t>(o) * nf + f] = s;
                        }
                    }
                }
                (void)len_in;
                if (ws) ws->pre[li] = z;
                next = z;
                if (l.act != Activation::linear)
                    for (double& v : next.a) v = activate(l.act, v);
                break;
            }
            case LayerSpec::Kind::maxpool1d: {
                const int ch = in_shape.channels, len_out = out_shape.len, p = l.pool;
                next = Mat(batch.n, static_cast<std::size_t>(len_out * ch));
                std::vector<std::int32_t> arg;
                if (ws) arg.resize(batch.n * static_cast<std::size_t>(len_out * ch));
                for (std::size_t r = 0; r < batch.n; ++r) {
                    const double* xr = cur[r];
                    double* yr = next[r];
                    for (int o = 0; o < len_out; ++o) {
                        for (int c = 0; c < ch; ++c) {
                            int best = (o * p) * ch + c;
                            double bv = xr[best];
                            for (int j = 1; j < p; ++j) {
                                const int pos = (o * p + j) * ch + c;
                                if (xr[pos] > bv) {
                                    bv = xr[pos];
                                    best = pos;
                                }
                            }
                            yr[static_cast<std::size_t>(o) * ch + c] = bv;
                            if (ws)
                                arg[(r * static_cast<std::size_t>(len_out * ch)) +
                                    static_cast<std::size_t>(o) * ch + c] = best;
                        }
                    }
                }
                if (ws) ws->argmax[li] = std::move(arg);
                break;
            }
            case LayerSpec::Kind::dropout: {
                if (mode == RunMode::infer) {
                    next = cur;
                    break;
                }
                const double keep = 1.0 - l.rate;
                const double scale = 1.0 / keep;
                next = cur;
                std::vector<std::uint8_t> mask(next.a.size());
                for (std::size_t i = 0; i < next.a.size(); ++i) {
                    const bool kept = drop_rng.uniform01() < keep;
                    mask[i] = kept;
                    next.a[i] = kept ? next.a[i] * scale : 0.0;
                }
                if (ws) ws->mask[li] = std::move(mask);
                break;
            }
            case LayerSpec::Kind::flatten: {
                next = cur;  // same storage order, new logical shape
                break;
            }
        }
        cur = std::move(next);
        if (ws) ws->acts[li + 1] = cur;
    }
    return cur;
}

double batch_loss(const Mat& probs, const std::vector<int>& labels) {
    double total = 0.0;
    for (std::size_t r = 0; r < probs.rows; ++r) {
        const int y = labels[r];
        if (y < 0 || static_cast<std::size_t>(y) >= probs.cols)
            throw DataError("label " + std::to_string(y) + " outside the class range");
        const double p = std::clamp(probs[r][y], 1e-12, 1.0);
        total -= std::log(p);
    }
    return total / static_cast<double>(probs.rows);
}

double loss_only(const ModelGraph& m, const BatchData& batch, const std::vector<int>& labels,
                 RunMode mode, std::uint64_t dropout_seed) {
    const Mat probs = forward(m, batch, mode, dropout_seed, nullptr);
    return batch_loss(probs, labels);
}

double loss_and_grad(ModelGraph& m, const BatchData& batch, const std::vector<int>& labels,
                     std::uint64_t dropout_seed) {
    std::fill(m.grads.begin(), m.grads.end(), 0.0);
    Workspace ws;
    const Mat probs = forward(m, batch, RunMode::train, dropout_seed, &ws);
    const double loss = batch_loss(probs, labels);

    // fused softmax + cross-entropy gradient at the logits
    const std::size_t n = batch.n;
    Mat dcur = probs;
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t r = 0; r < n; ++r) {
        double* row = dcur[r];
        for (std::size_t c = 0; c < dcur.cols; ++c) row[c] *= inv_n;
        row[labels[r]] -= inv_n;
    }

    for (std::size_t li0 = m.trunk.size(); li0 > 0; --li0) {
        const std::size_t li = li0 - 1;
        const LayerSpec& l = m.trunk[li];
        const SeqShape in_shape = m.shapes[li];
        const SeqShape out_shape = m.shapes[li + 1];
        const Mat& x = ws.acts[li];
        Mat dprev;
        switch (l.kind) {
            case LayerSpec::Kind::softmax_output:
            case LayerSpec::Kind::dense: {
                const int in = in_shape.width();
                const int out = out_shape.width();
                // dz for dense layers; the softmax gradient is already fused
                if (l.kind == LayerSpec::Kind::dense && l.act != Activation::linear) {
                    const Mat& z = ws.pre[li];
                    const Mat& y = ws.acts[li + 1];
                    for (std::size_t i = 0; i < dcur.a.size(); ++i)
                        dcur.a[i] *= activate_grad(l.act, z.a[i], y.a[i]);
                }
                double* gW = m.grad(m.layer_weight[li]);
                double* gb = m.grad(m.layer_bias[li]);
                matmul_tn_acc(x.a.data(), dcur.a.data(), gW, n, static_cast<std::size_t>(in),
                              static_cast<std::size_t>(out));
                for (std::size_t r = 0; r < n; ++r) {
                    const double* dr = dcur[r];
                    for (int c = 0; c < out; ++c) gb[c] += dr[c];
                }
                if (li > 0 || m.uses_embeddings) {
                    const double* W = m.param(m.layer_weight[li]);
                    dprev = Mat(n, static_cast<std::size_t>(in));
                    matmul_nt(dcur.a.data(), W, dprev.a.data(), n, static_cast<std::size_t>(out),
                              static_cast<std::size_t>(in));
                }
                break;
            }
            case LayerSpec::Kind::conv1d: {
                const int ch = in_shape.channels, len_out = out_shape.len;
                const int nf = l.filters, k = l.kernel;
                const Mat& z = ws.pre[li];
                const Mat& y = ws.acts[li + 1];
                if (l.act != Activation::linear)
                    for (std::size_t i = 0; i < dcur.a.size(); ++i)
                        dcur.a[i] *= activate_grad(l.act, z.a[i], y.a[i]);
                const double* W = m.param(m.layer_weight[li]);
                double* gW = m.grad(m.layer_weight[li]);
                double* gb = m.grad(m.layer_bias[li]);
                dprev = Mat(n, static_cast<std::size_t>(in_shape.width()));
                for (std::size_t r = 0; r < n; ++r) {
                    const double* xr = x[r];
                    const double* dr = dcur[r];
                    double* pr = dprev[r];
                    for (int o = 0; o < len_out; ++o) {
                        for (int f = 0; f < nf; ++f) {
                            const double d = dr[static_cast<std::size_t>(o) * nf + f];
                            if (d == 0.0) continue;
                            gb[f] += d;
                            double* gwf = gW + static_cast<std::size_t>(f) * k * ch;
                            const double* wf = W + static_cast<std::size_t>(f) * k * ch;
                            for (int kk = 0; kk < k; ++kk) {
                                const std::size_t xoff = static_cast<std::size_t>(o + kk) * ch;
                                for (int c = 0; c < ch; ++c) {
                                    gwf[static_cast<std::size_t>(kk) * ch + c] += d * xr[xoff + c];
                                    pr[xoff + c] += d * wf[static_cast<std::size_t>(kk) * ch + c];
                                }
                            }
                        }
                    }
                }
                break;
            }
            case LayerSpec::Kind::maxpool1d: {
                dprev = Mat(n, static_cast<std::size_t>(in_shape.width()));
                const auto& arg = ws.argmax[li];
                const std::size_t out_w = static_cast<std::size_t>(out_shape.width());
                for (std::size_t r = 0; r < n; ++r) {
                    const double* dr = dcur[r];
                    double* pr = dprev[r];
                    for (std::size_t i = 0; i < out_w; ++i)
                        pr[arg[r * out_w + i]] += dr[i];
                }
                break;
            }
            case LayerSpec::Kind::dropout: {
                dprev = std::move(dcur);
                const auto& mask = ws.mask[li];
                const double scale = 1.0 / (1.0 - l.rate);
                for (std::size_t i = 0; i < dprev.a.size(); ++i)
                    dprev.a[i] = mask[i] ? dprev.a[i] * scale : 0.0;
                break;
            }
            case LayerSpec::Kind::flatten: {
                dprev = std::move(dcur);
                break;
            }
        }
        dcur = std::move(dprev);
    }

    // scatter the concatenated-input gradient back into embedding rows
    if (m.uses_embeddings) {
        const std::size_t n_vars = m.input_vars.size();
        for (std::size_t r = 0; r < n; ++r) {
            const double* dr = dcur[r];
            std::size_t off = 0;
            for (std::size_t v = 0; v < n_vars; ++v) {
                const EmbeddingSpec& e = m.embeddings[v];
                const std::int32_t id = batch.idx[r * n_vars + v];
                double* grow =
                    m.grad(static_cast<int>(v)) + static_cast<std::size_t>(id) * e.dim;
                for (int d = 0; d < e.dim; ++d) grow[d] += dr[off + static_cast<std::size_t>(d)];
                off += static_cast<std::size_t>(e.dim);
            }
        }
    }
    return loss;
}

int default_embedding_dim(const std::string& var) {
    if (var == "DATE_CASE") return 6;
    if (var == "NOTIFICATION_COUNTRY") return 16;
    if (var == "DISTRIBUTION_STATUS") return 9;
    if (var == "COUNTRY_ORIGIN") return 50;
    if (var == "PRODUCT_CATEGORY") return 19;
    if (var == "HAZARD_CATEGORY") return 18;
    return 8;
}

ModelGraph build_stage_model(int stage_id, const Schema& schema, ModelFamily family,
                             const BuildOverrides& o) {
    const StageVars& sv = stage_variables(stage_id);
    ModelGraph m;
    m.uses_embeddings = true;
    m.input_vars = sv.inputs;
    m.target_var = sv.target;

    std::vector<VariableSpec> snapshot;
    for (const auto& name : sv.inputs) {
        const std::size_t c = schema.find(name);
        if (c == Schema::npos) throw SchemaError("stage " + std::to_string(stage_id) +
                                                 " needs input variable '" + name + "'");
        int dim = o.emb_dim_default > 0 ? o.emb_dim_default : default_embedding_dim(name);
        if (auto it = o.emb_dims.find(name); it != o.emb_dims.end()) dim = it->second;
        m.embeddings.push_back({name, schema.var(c).vocab.cardinality() + 1, dim});
        snapshot.push_back(schema.var(c));
    }
    const std::size_t tc = schema.find(sv.target);
    if (tc == Schema::npos)
        throw SchemaError("stage " + std::to_string(stage_id) + " needs target variable '" +
                          sv.target + "'");
    snapshot.push_back(schema.var(tc));
    m.schema = Schema(std::move(snapshot));
    const int classes = schema.var(tc).vocab.cardinality();

    const Activation act = o.act;
    const double rate = o.dropout;
    auto push_dense = [&](int units) {
        m.trunk.push_back(LayerSpec::dense(units, act));
        if (rate > 0.0) m.trunk.push_back(LayerSpec::dropout(rate));
    };

    if (family == ModelFamily::mlp) {
        std::vector<int> units = o.dense_units;
        if (units.empty()) units = {2048, 1024, 512};
        for (int u : units) push_dense(u);
    } else {
        std::vector<int> filters = o.conv_filters;
        std::vector<int> kernels = o.conv_kernels;
        if (filters.empty()) filters = {128, 256};
        if (kernels.empty()) kernels = {4, 3};
        if (filters.size() != kernels.size())
            throw ConfigError("conv filters and kernels must pair up");
        for (std::size_t i = 0; i < filters.size(); ++i) {
            m.trunk.push_back(LayerSpec::conv1d(filters[i], kernels[i], act));
            m.trunk.push_back(LayerSpec::maxpool1d(o.pool));
        }
        m.trunk.push_back(LayerSpec::flatten());
        std::vector<int> units = o.dense_units;
        if (units.empty()) units = {512, 256};
        for (int u : units) push_dense(u);
    }
    m.trunk.push_back(LayerSpec::softmax_output(classes));
    finalize_model(m);
    return m;
}

ModelGraph build_grid_model(ModelFamily family, const nlohmann::json& config, int input_width,
                            int classes) {
    ModelGraph m;
    m.uses_embeddings = false;
    m.input_width = input_width;
    const int hidden = config.at("hidden_layers").get<int>();
    const Activation act = activation_from_string(config.at("activation").get<std::string>());
    const double rate = config.at("dropout").get<double>();

    if (family == ModelFamily::mlp) {
        const int neurons = config.at("neurons").get<int>();
        for (int i = 0; i < hidden; ++i) {
            // pyramid: each layer halves the requested width, floor 64
            const int units = std::max(neurons >> i, 64);
            m.trunk.push_back(LayerSpec::dense(units, act));
            if (rate > 0.0) m.trunk.push_back(LayerSpec::dropout(rate));
        }
    } else {
        const int filters = config.at("filters").get<int>();
        const int kernel = config.at("kernel").get<int>();
        const int pool = config.at("maxpool").get<int>();
        int len = input_width;
        for (int i = 0; i < hidden; ++i) {
            const int k = std::max(kernel - i, 2);
            if (len < k) break;  // sequence exhausted at desk scale
            const int f = std::min(filters << i, 512);
            m.trunk.push_back(LayerSpec::conv1d(f, k, act));
            len = len - k + 1;
            if (len >= pool) {
                m.trunk.push_back(LayerSpec::maxpool1d(pool));
                len /= pool;
            }
        }
        m.trunk.push_back(LayerSpec::flatten());
        const int d1 = std::min(4 * filters, 512);
        const int d2 = std::min(2 * filters, 256);
        m.trunk.push_back(LayerSpec::dense(d1, act));
        if (rate > 0.0) m.trunk.push_back(LayerSpec::dropout(rate));
        m.trunk.push_back(LayerSpec::dense(d2, act));
        if (rate > 0.0) m.trunk.push_back(LayerSpec::dropout(rate));
    }
    m.trunk.push_back(LayerSpec::softmax_output(classes));
    finalize_model(m);
    return m;
}

} // namespace catcast
