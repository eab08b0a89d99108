#include "catcast/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numeric>

#include "catcast/errors.hpp"

namespace catcast {

// --- logistic regression ----------------------------------------------------

LogRegModel logreg_fit(const Mat& X, const std::vector<int>& labels, int classes, double lr,
                       int epochs, int batch_size, std::uint64_t seed) {
    if (X.rows == 0) throw DataError("cannot fit logistic regression on an empty matrix");
    if (labels.size() != X.rows) throw DataError("label count does not match row count");
    for (int y : labels)
        if (y < 0 || y >= classes)
            throw DataError("label " + std::to_string(y) + " outside " +
                            std::to_string(classes) + " classes");
    if (epochs < 0) throw ConfigError("epochs must be >= 0");
    if (batch_size < 1) throw ConfigError("batch size must be >= 1");

    LogRegModel model;
    model.classes = classes;
    model.width = X.cols;
    model.w.assign(X.cols * static_cast<std::size_t>(classes), 0.0);
    model.b.assign(static_cast<std::size_t>(classes), 0.0);

    const std::size_t n = X.rows;
    const std::size_t d = X.cols;
    const std::size_t k = static_cast<std::size_t>(classes);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);

    std::vector<double> logits(k);
    std::vector<double> gw(d * k), gb(k);
    for (int epoch = 0; epoch < epochs; ++epoch) {
        Rng shuffle_rng(mix_seed(seed, "shuffle", static_cast<std::uint64_t>(epoch)));
        shuffle_rng.shuffle(order);

        double loss_sum = 0.0;
        for (std::size_t start = 0; start < n; start += static_cast<std::size_t>(batch_size)) {
            const std::size_t count =
                std::min(static_cast<std::size_t>(batch_size), n - start);
            std::fill(gw.begin(), gw.end(), 0.0);
            std::fill(gb.begin(), gb.end(), 0.0);
            const double inv = 1.0 / static_cast<double>(count);

            for (std::size_t i = 0; i < count; ++i) {
                const std::size_t r = order[start + i];
                const double* x = X[r];
                for (std::size_t c = 0; c < k; ++c) logits[c] = model.b[c];
                for (std::size_t f = 0; f < d; ++f) {
                    const double xf = x[f];
                    if (xf == 0.0) continue;
                    const double* wf = model.w.data() + f * k;
                    for (std::size_t c = 0; c < k; ++c) logits[c] += xf * wf[c];
                }
                double mx = logits[0];
                for (std::size_t c = 1; c < k; ++c) mx = std::max(mx, logits[c]);
                double sum = 0.0;
                for (std::size_t c = 0; c < k; ++c) {
                    logits[c] = std::exp(logits[c] - mx);
                    sum += logits[c];
                }
                const double inv_sum = 1.0 / sum;
                const int y = labels[r];
                loss_sum -= std::log(std::clamp(logits[static_cast<std::size_t>(y)] * inv_sum,
                                                1e-12, 1.0));

                for (std::size_t c = 0; c < k; ++c) {
                    double g = logits[c] * inv_sum * inv;
                    if (c == static_cast<std::size_t>(y)) g -= inv;
                    gb[c] += g;
                    logits[c] = g;  // reuse as the per-row gradient
                }
                for (std::size_t f = 0; f < d; ++f) {
                    const double xf = x[f];
                    if (xf == 0.0) continue;
                    double* gwf = gw.data() + f * k;
                    for (std::size_t c = 0; c < k; ++c) gwf[c] += xf * logits[c];
                }
            }

            for (std::size_t i = 0; i < gw.size(); ++i) model.w[i] -= lr * gw[i];
            for (std::size_t c = 0; c < k; ++c) model.b[c] -= lr * gb[c];
        }
        model.loss_history.push_back(loss_sum / static_cast<double>(n));
    }
    return model;
}

Mat logreg_predict(const LogRegModel& model, const Mat& X,
                   const std::vector<std::size_t>& rows) {
    const std::size_t k = static_cast<std::size_t>(model.classes);
    Mat out(rows.size(), k);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const double* x = X[rows[i]];
        double* p = out[i];
        for (std::size_t c = 0; c < k; ++c) p[c] = model.b[c];
        for (std::size_t f = 0; f < model.width; ++f) {
            const double xf = x[f];
            if (xf == 0.0) continue;
            const double* wf = model.w.data() + f * k;
            for (std::size_t c = 0; c < k; ++c) p[c] += xf * wf[c];
        }
        double mx = p[0];
        for (std::size_t c = 1; c < k; ++c) mx = std::max(mx, p[c]);
        double sum = 0.0;
        for (std::size_t c = 0; c < k; ++c) {
            p[c] = std::exp(p[c] - mx);
            sum += p[c];
        }
        for (std::size_t c = 0; c < k; ++c) p[c] /= sum;
    }
    return out;
}

// --- decision tree ----------------------------------------------------------

double gini_impurity(const std::vector<std::int64_t>& counts) {
    std::int64_t total = 0;
    for (auto c : counts) total += c;
    if (total == 0) return 0.0;
    double sum_sq = 0.0;
    for (auto c : counts) {
        const double p = static_cast<double>(c) / static_cast<double>(total);
        sum_sq += p * p;
    }
    return 1.0 - sum_sq;
}

namespace {

// Split quality is compared exactly as A/n_l + B/n_r with integer A, B
// (sums of squared class counts); maximizing it minimizes weighted Gini.
struct SplitScore {
    std::int64_t a = 0, nl = 0, b = 0, nr = 0;
    bool valid = false;

    bool better_than(const SplitScore& o) const {
        if (!o.valid) return valid;
        if (!valid) return false;
        const __int128 lhs = (static_cast<__int128>(a) * o.nl * o.nr * nr +
                              static_cast<__int128>(b) * o.nl * o.nr * nl);
        const __int128 rhs = (static_cast<__int128>(o.a) * nl * nr * o.nr +
                              static_cast<__int128>(o.b) * nl * nr * o.nl);
        return lhs > rhs;
    }
};

struct TreeBuilder {
    const Mat& X;
    const std::vector<int>& labels;
    int classes;
    TreeOptions opt;
    Rng* rng;
    TreeModel out;

    int build(std::vector<std::size_t>& rows, int depth) {
        std::vector<std::int64_t> counts(static_cast<std::size_t>(classes), 0);
        for (auto r : rows) ++counts[static_cast<std::size_t>(labels[r])];
        const bool pure =
            std::count_if(counts.begin(), counts.end(), [](std::int64_t c) { return c > 0; }) <= 1;

        const int node_id = static_cast<int>(out.nodes.size());
        out.nodes.emplace_back();
        out.nodes[static_cast<std::size_t>(node_id)].counts = counts;

        if (pure || rows.size() < static_cast<std::size_t>(opt.min_samples) ||
            (opt.max_depth >= 0 && depth >= opt.max_depth))
            return node_id;

        // candidate features, ascending so ties resolve to the lowest index
        std::vector<std::size_t> features;
        if (opt.mtry > 0 && static_cast<std::size_t>(opt.mtry) < X.cols) {
            std::vector<std::size_t> all(X.cols);
            std::iota(all.begin(), all.end(), 0);
            for (int i = 0; i < opt.mtry; ++i) {
                const std::size_t j =
                    i + static_cast<std::size_t>(rng->below(all.size() - static_cast<std::size_t>(i)));
                std::swap(all[static_cast<std::size_t>(i)], all[j]);
            }
            features.assign(all.begin(), all.begin() + opt.mtry);
            std::sort(features.begin(), features.end());
        } else {
            features.resize(X.cols);
            std::iota(features.begin(), features.end(), 0);
        }

        SplitScore best;
        std::size_t best_feature = 0;
        double best_threshold = 0.0;

        std::vector<std::pair<double, int>> sorted(rows.size());
        std::vector<std::int64_t> left(static_cast<std::size_t>(classes));
        for (std::size_t f : features) {
            for (std::size_t i = 0; i < rows.size(); ++i)
                sorted[i] = {X[rows[i]][f], labels[rows[i]]};
            std::sort(sorted.begin(), sorted.end());
            if (sorted.front().first == sorted.back().first) continue;

            std::fill(left.begin(), left.end(), 0);
            std::int64_t a = 0;  // sum of squared left counts, updated incrementally
            std::int64_t b = 0;
            for (auto c : counts) b += c * c;

            for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
                const int y = sorted[i].second;
                auto& lc = left[static_cast<std::size_t>(y)];
                const std::int64_t rc = counts[static_cast<std::size_t>(y)] - lc;
                a += 2 * lc + 1;
                b += -2 * rc + 1;
                ++lc;
                if (sorted[i].first == sorted[i + 1].first) continue;

                SplitScore s;
                s.a = a;
                s.nl = static_cast<std::int64_t>(i) + 1;
                s.b = b;
                s.nr = static_cast<std::int64_t>(sorted.size()) - s.nl;
                s.valid = true;
                if (s.better_than(best)) {
                    best = s;
                    best_feature = f;
                    best_threshold = (sorted[i].first + sorted[i + 1].first) / 2.0;
                }
            }
        }

        if (!best.valid) return node_id;  // every candidate feature was constant

        std::vector<std::size_t> lrows, rrows;
        for (auto r : rows)
            (X[r][best_feature] <= best_threshold ? lrows : rrows).push_back(r);
        rows.clear();
        rows.shrink_to_fit();

        const int l = build(lrows, depth + 1);
        const int r = build(rrows, depth + 1);
        TreeNode& node = out.nodes[static_cast<std::size_t>(node_id)];
        node.feature = static_cast<int>(best_feature);
        node.threshold = best_threshold;
        node.left = l;
        node.right = r;
        return node_id;
    }
};

} // namespace

TreeModel tree_fit(const Mat& X, const std::vector<int>& labels, int classes,
                   const TreeOptions& options, Rng* feature_rng) {
    if (X.rows == 0) throw DataError("cannot fit a tree on an empty matrix");
    if (labels.size() != X.rows) throw DataError("label count does not match row count");
    for (int y : labels)
        if (y < 0 || y >= classes)
            throw DataError("label " + std::to_string(y) + " outside " +
                            std::to_string(classes) + " classes");
    if (options.mtry > 0 && feature_rng == nullptr)
        throw ConfigError("feature subsampling needs a random generator");

    TreeBuilder builder{X, labels, classes, options, feature_rng, {}};
    builder.out.classes = classes;
    std::vector<std::size_t> rows(X.rows);
    std::iota(rows.begin(), rows.end(), 0);
    builder.build(rows, 0);
    return builder.out;
}

int tree_predict_class(const TreeModel& model, const double* row) {
    int node = 0;
    while (model.nodes[static_cast<std::size_t>(node)].feature >= 0) {
        const TreeNode& n = model.nodes[static_cast<std::size_t>(node)];
        node = row[n.feature] <= n.threshold ? n.left : n.right;
    }
    const auto& counts = model.nodes[static_cast<std::size_t>(node)].counts;
    int best = 0;
    for (int c = 1; c < model.classes; ++c)
        if (counts[static_cast<std::size_t>(c)] > counts[static_cast<std::size_t>(best)]) best = c;
    return best;
}

Mat tree_predict(const TreeModel& model, const Mat& X, const std::vector<std::size_t>& rows) {
    Mat out(rows.size(), static_cast<std::size_t>(model.classes));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        int node = 0;
        const double* row = X[rows[i]];
        while (model.nodes[static_cast<std::size_t>(node)].feature >= 0) {
            const TreeNode& n = model.nodes[static_cast<std::size_t>(node)];
            node = row[n.feature] <= n.threshold ? n.left : n.right;
        }
        const auto& counts = model.nodes[static_cast<std::size_t>(node)].counts;
        std::int64_t total = 0;
        for (auto c : counts) total += c;
        for (int c = 0; c < model.classes; ++c)
            out[i][c] = static_cast<double>(counts[static_cast<std::size_t>(c)]) /
                        static_cast<double>(total);
    }
    return out;
}

// --- random forest ---------------------------------------------------------

ForestModel forest_fit(const Mat& X, const std::vector<int>& labels, int classes,
                       const ForestOptions& options, std::uint64_t seed) {
    if (options.n_trees < 1) throw ConfigError("a forest needs at least one tree");
    ForestModel model;
    model.classes = classes;
    model.trees.resize(static_cast<std::size_t>(options.n_trees));

    int mtry = options.mtry;
    if (mtry < 0) mtry = std::max(1, static_cast<int>(std::sqrt(static_cast<double>(X.cols))));

    auto fit_one = [&](std::size_t t) {
        Rng rng(mix_seed(seed, "tree", t));
        TreeOptions topt;
        topt.max_depth = options.max_depth;
        topt.min_samples = options.min_samples;
        topt.mtry = mtry;

        if (options.bootstrap) {
            Mat sample(X.rows, X.cols);
            std::vector<int> sample_labels(X.rows);
            for (std::size_t i = 0; i < X.rows; ++i) {
                const std::size_t r = static_cast<std::size_t>(rng.below(X.rows));
                std::copy(X[r], X[r] + X.cols, sample[i]);
                sample_labels[i] = labels[r];
            }
            model.trees[t] = tree_fit(sample, sample_labels, classes, topt, &rng);
        } else {
            model.trees[t] = tree_fit(X, labels, classes, topt, mtry > 0 ? &rng : nullptr);
        }
    };

    const std::size_t threads = static_cast<std::size_t>(std::max(1, options.threads));
    if (threads == 1) {
        for (std::size_t t = 0; t < model.trees.size(); ++t) fit_one(t);
    } else {
        for (std::size_t start = 0; start < model.trees.size(); start += threads) {
            std::vector<std::future<void>> wave;
            const std::size_t end = std::min(start + threads, model.trees.size());
            for (std::size_t t = start; t < end; ++t)
                wave.push_back(std::async(std::launch::async, fit_one, t));
            for (auto& task : wave) task.get();
        }
    }
    return model;
}

Mat forest_predict(const ForestModel& model, const Mat& X,
                   const std::vector<std::size_t>& rows) {
    Mat out(rows.size(), static_cast<std::size_t>(model.classes));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (const auto& tree : model.trees)
            out[i][tree_predict_class(tree, X[rows[i]])] += 1.0;
        for (int c = 0; c < model.classes; ++c)
            out[i][c] /= static_cast<double>(model.trees.size());
    }
    return out;
}

} // namespace catcast
