#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "catcast/mat.hpp"
#include "catcast/rng.hpp"

namespace catcast {

// --- multinomial logistic regression -------------------------------------

struct LogRegModel {
    int classes = 0;
    std::size_t width = 0;
    std::vector<double> w;  // width × classes, row-major
    std::vector<double> b;
    std::vector<double> loss_history;  // one mean loss per epoch
};

// Mini-batch gradient descent on categorical cross-entropy from zero
// weights. The seed drives only the epoch shuffles, so a zero-epoch fit
// predicts the uniform distribution.
LogRegModel logreg_fit(const Mat& X, const std::vector<int>& labels, int classes, double lr,
                       int epochs, int batch_size, std::uint64_t seed);

Mat logreg_predict(const LogRegModel& model, const Mat& X,
                   const std::vector<std::size_t>& rows);

// --- CART decision tree ----------------------------------------------------

struct TreeNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1, right = -1;
    std::vector<std::int64_t> counts;  // class histogram of the node's rows
};

struct TreeModel {
    std::vector<TreeNode> nodes;  // nodes[0] is the root
    int classes = 0;
};

struct TreeOptions {
    int max_depth = -1;   // -1 = unlimited
    int min_samples = 2;  // smallest node that may still be split
    int mtry = 0;         // features tried per split; 0 = all
};

double gini_impurity(const std::vector<std::int64_t>& counts);

// Gini-scored exhaustive splits; go left when value <= threshold. Ties
// break to the lowest feature index, then the lowest threshold, so the
// tree is invariant to training row order.
TreeModel tree_fit(const Mat& X, const std::vector<int>& labels, int classes,
                   const TreeOptions& options = {}, Rng* feature_rng = nullptr);

int tree_predict_class(const TreeModel& model, const double* row);
Mat tree_predict(const TreeModel& model, const Mat& X, const std::vector<std::size_t>& rows);

// --- random forest -----------------------------------------------------------

struct ForestOptions {
    int n_trees = 100;
    int max_depth = -1;
    int min_samples = 2;
    bool bootstrap = true;
    int mtry = -1;  // -1 = floor(sqrt(width)); 0 = all features
    int threads = 1;
};

struct ForestModel {
    std::vector<TreeModel> trees;
    int classes = 0;
};

// Per-tree bootstrap resampling and per-split feature subsampling, with
// tree seeds derived from the root seed so thread count cannot change the
// result. Prediction is a majority vote; vote ties go to the lowest class.
ForestModel forest_fit(const Mat& X, const std::vector<int>& labels, int classes,
                       const ForestOptions& options, std::uint64_t seed);

Mat forest_predict(const ForestModel& model, const Mat& X,
                   const std::vector<std::size_t>& rows);

} // namespace catcast
