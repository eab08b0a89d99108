#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "catcast/model.hpp"

namespace catcast {

struct GradCheckResult {
    double max_rel_err = 0.0;
    std::string worst_param;
    std::size_t n_params = 0;
};

// Every analytic gradient against central finite differences. Dropout
// masks are frozen through the dropout_seed so numeric and analytic passes
// see the same network.
GradCheckResult grad_check(ModelGraph& model, const BatchData& batch,
                           const std::vector<int>& labels, double h = 1e-5,
                           std::uint64_t dropout_seed = 1234);

// Nudges biases so no ReLU / hard-sigmoid preactivation sits within
// `margin` of a kink on this batch; finite differences are meaningless
// across a kink.
void clear_activation_kinks(ModelGraph& model, const BatchData& batch,
                            std::uint64_t dropout_seed, double margin = 1e-2);

struct GradCheckCase {
    std::string name;
    GradCheckResult result;
};

// layer-kind × activation coverage plus reduced-width stage architectures
std::vector<GradCheckCase> run_gradcheck_suite(std::uint64_t seed);

} // namespace catcast
