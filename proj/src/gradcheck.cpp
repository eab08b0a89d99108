#include "catcast/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "catcast/rng.hpp"
#include "catcast/synth.hpp"

namespace catcast {

GradCheckResult grad_check(ModelGraph& model, const BatchData& batch,
                           const std::vector<int>& labels, double h,
                           std::uint64_t dropout_seed) {
    GradCheckResult res;
    res.n_params = model.params.size();
    loss_and_grad(model, batch, labels, dropout_seed);
    const std::vector<double> analytic = model.grads;

    for (std::size_t i = 0; i < model.params.size(); ++i) {
        const double old = model.params[i];
        model.params[i] = old + h;
        const double lp = loss_only(model, batch, labels, RunMode::train, dropout_seed);
        model.params[i] = old - h;
        const double lm = loss_only(model, batch, labels, RunMode::train, dropout_seed);
        model.params[i] = old;

        const double numeric = (lp - lm) / (2.0 * h);
        const double a = analytic[i];
        const double rel =
            std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), 1e-8});
        if (rel > res.max_rel_err) {
            res.max_rel_err = rel;
            for (const auto& info : model.param_infos) {
                if (i >= info.offset && i < info.offset + info.count) {
                    res.worst_param = info.name + "[" + std::to_string(i - info.offset) + "]";
                    break;
                }
            }
        }
    }
    return res;
}

namespace {

bool clears_kinks(const std::vector<double>& zs, const std::vector<double>& kinks,
                  double shift, double margin) {
    for (double z : zs)
        for (double k : kinks)
            if (std::abs(z + shift - k) < margin - 1e-12) return false;
    return true;
}

// smallest |shift| of the unit's bias that moves every preactivation at
// least `margin` away from every kink
double kink_shift(const std::vector<double>& zs, const std::vector<double>& kinks,
                  double margin) {
    if (clears_kinks(zs, kinks, 0.0, margin)) return 0.0;
    std::vector<double> candidates;
    for (double z : zs) {
        for (double k : kinks) {
            candidates.push_back(k + margin - z);
            candidates.push_back(k - margin - z);
        }
    }
    std::sort(candidates.begin(), candidates.end(),
              [](double a, double b) { return std::abs(a) < std::abs(b); });
    for (double c : candidates)
        if (clears_kinks(zs, kinks, c, margin)) return c;
    // push everything above the highest kink
    double top = kinks.back() + margin;
    double shift = 0.0;
    for (double z : zs) shift = std::max(shift, top - z);
    return shift;
}

} // namespace

void clear_activation_kinks(ModelGraph& model, const BatchData& batch,
                            std::uint64_t dropout_seed, double margin) {
    for (int pass = 0; pass < 32; ++pass) {
        Workspace ws;
        forward(model, batch, RunMode::train, dropout_seed, &ws);
        bool adjusted = false;
        for (std::size_t li = 0; li < model.trunk.size(); ++li) {
            const LayerSpec& l = model.trunk[li];
            if (l.kind != LayerSpec::Kind::dense && l.kind != LayerSpec::Kind::conv1d) continue;
            if (l.act != Activation::relu && l.act != Activation::hard_sigmoid) continue;
            const std::vector<double> kinks =
                l.act == Activation::relu ? std::vector<double>{0.0}
                                          : std::vector<double>{-2.5, 2.5};
            const Mat& z = ws.pre[li];
            const int units = l.kind == LayerSpec::Kind::dense ? l.units : l.filters;
            double* bias = model.param(model.layer_bias[li]);
            for (int u = 0; u < units; ++u) {
                std::vector<double> zs;
                for (std::size_t r = 0; r < z.rows; ++r)
                    for (std::size_t c = static_cast<std::size_t>(u); c < z.cols;
                         c += static_cast<std::size_t>(units))
                        zs.push_back(z[r][c]);
                const double shift = kink_shift(zs, kinks, margin);
                if (shift != 0.0) {
                    bias[u] += shift;
                    adjusted = true;
                }
            }
        }
        if (!adjusted) return;
    }
    throw Error("could not steer preactivations away from activation kinks");
}

namespace {

ModelGraph toy_embedding_model(Activation act, bool with_conv, int classes, std::uint64_t seed) {
    ModelGraph m;
    m.uses_embeddings = true;
    m.input_vars = {"alpha", "beta", "gamma"};
    m.embeddings = {{"alpha", 5, 2}, {"beta", 4, 3}, {"gamma", 6, 2}};
    m.target_var = "label";
    if (with_conv) {
        m.trunk.push_back(LayerSpec::conv1d(3, 2, act));
        m.trunk.push_back(LayerSpec::maxpool1d(2));
        m.trunk.push_back(LayerSpec::conv1d(4, 2, act));
        m.trunk.push_back(LayerSpec::flatten());
        m.trunk.push_back(LayerSpec::dense(6, act));
        m.trunk.push_back(LayerSpec::dropout(0.2));
    } else {
        m.trunk.push_back(LayerSpec::dense(8, act));
        m.trunk.push_back(LayerSpec::dropout(0.25));
        m.trunk.push_back(LayerSpec::dense(6, act));
    }
    m.trunk.push_back(LayerSpec::softmax_output(classes));
    finalize_model(m);
    init_params(m, seed);
    return m;
}

BatchData toy_batch(const ModelGraph& m, std::size_t n, Rng& rng) {
    BatchData b;
    b.n = n;
    if (m.uses_embeddings) {
        b.idx.resize(n * m.embeddings.size());
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t v = 0; v < m.embeddings.size(); ++v)
                b.idx[r * m.embeddings.size() + v] =
                    static_cast<std::int32_t>(rng.below(m.embeddings[v].rows));
    } else {
        b.dense.resize(n * static_cast<std::size_t>(m.input_width));
        for (auto& x : b.dense) x = rng.uniform01() < 0.3 ? 1.0 : 0.0;
    }
    return b;
}

std::vector<int> toy_labels(std::size_t n, int classes, Rng& rng) {
    std::vector<int> labels(n);
    for (auto& y : labels) y = static_cast<int>(rng.below(classes));
    return labels;
}

} // namespace

std::vector<GradCheckCase> run_gradcheck_suite(std::uint64_t seed) {
    std::vector<GradCheckCase> cases;
    const Activation acts[] = {Activation::relu, Activation::tanh_fn, Activation::sigmoid,
                               Activation::hard_sigmoid};
    const std::uint64_t drop_seed = mix_seed(seed, "dropmask");

    Rng rng(mix_seed(seed, "batch"));
    for (Activation a : acts) {
        for (bool with_conv : {false, true}) {
            const int classes = with_conv ? 4 : 5;
            ModelGraph m = toy_embedding_model(a, with_conv, classes, mix_seed(seed, "init"));
            BatchData b = toy_batch(m, 8, rng);
            auto labels = toy_labels(8, classes, rng);
            clear_activation_kinks(m, b, drop_seed);
            GradCheckCase c;
            c.name = std::string(with_conv ? "conv1d" : "dense") + "/" + to_string(a);
            c.result = grad_check(m, b, labels, 1e-5, drop_seed);
            cases.push_back(std::move(c));
        }
    }

    // dense-input path (classical encoding feeding the trunk directly)
    {
        ModelGraph m;
        m.uses_embeddings = false;
        m.input_width = 12;
        m.input_vars = {"encoded"};
        m.target_var = "label";
        m.trunk.push_back(LayerSpec::dense(7, Activation::relu));
        m.trunk.push_back(LayerSpec::dropout(0.3));
        m.trunk.push_back(LayerSpec::softmax_output(3));
        finalize_model(m);
        init_params(m, mix_seed(seed, "init-dense"));
        BatchData b = toy_batch(m, 8, rng);
        auto labels = toy_labels(8, 3, rng);
        clear_activation_kinks(m, b, drop_seed);
        GradCheckCase c;
        c.name = "dense-input/relu";
        c.result = grad_check(m, b, labels, 1e-5, drop_seed);
        cases.push_back(std::move(c));
    }

    // reduced-width stage architectures over a small synthetic schema
    const GeneratorSpec spec = make_generator_spec(6, 5, 4, 6, 6, 5, 4, 0.0, seed);
    const Table table = synth_generate(spec, 32);
    BuildOverrides o;
    o.dense_units = {16, 8};
    o.conv_filters = {3, 4};
    o.conv_kernels = {2, 2};
    o.pool = 2;
    o.emb_dim_default = 3;
    o.dropout = 0.2;
    for (int stage = 1; stage <= 3; ++stage) {
        const ModelFamily family = stage == 2 ? ModelFamily::conv1d : ModelFamily::mlp;
        ModelGraph m = build_stage_model(stage, table.schema, family, o);
        init_params(m, mix_seed(seed, "init-stage", static_cast<std::uint64_t>(stage)));

        BatchData b;
        b.n = 8;
        b.idx.resize(b.n * m.input_vars.size());
        std::vector<int> labels(b.n);
        const std::size_t target_col = table.schema.require(m.target_var);
        for (std::size_t r = 0; r < b.n; ++r) {
            for (std::size_t v = 0; v < m.input_vars.size(); ++v)
                b.idx[r * m.input_vars.size() + v] =
                    table.at(r, table.schema.require(m.input_vars[v]));
            labels[r] = table.at(r, target_col) - 1;
        }
        clear_activation_kinks(m, b, drop_seed);
        GradCheckCase c;
        c.name = "stage" + std::to_string(stage) + "-reduced/" + to_string(family);
        c.result = grad_check(m, b, labels, 1e-5, drop_seed);
        cases.push_back(std::move(c));
    }
    return cases;
}

} // namespace catcast
