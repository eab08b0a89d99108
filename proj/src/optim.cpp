#include <cmath>

#include "catcast/train.hpp"

namespace catcast {

const char* to_string(OptKind k) {
    switch (k) {
        case OptKind::sgd: return "sgd";
        case OptKind::rmsprop: return "rmsprop";
        case OptKind::adagrad: return "adagrad";
        case OptKind::adam: return "adam";
    }
    return "adam";
}

OptKind optimizer_from_string(const std::string& s) {
    if (s == "sgd") return OptKind::sgd;
    if (s == "rmsprop") return OptKind::rmsprop;
    if (s == "adagrad") return OptKind::adagrad;
    if (s == "adam") return OptKind::adam;
    throw ConfigError("unknown optimizer '" + s + "'");
}

namespace {
constexpr double kEps = 1e-8;
constexpr double kRmsDecay = 0.9;
constexpr double kBeta1 = 0.9;
constexpr double kBeta2 = 0.999;
} // namespace

Optimizer::Optimizer(OptKind kind, double lr, std::size_t n_params) : kind_(kind), lr_(lr) {
    if (lr <= 0.0) throw ConfigError("learning rate must be positive");
    if (kind_ != OptKind::sgd) v_.assign(n_params, 0.0);
    if (kind_ == OptKind::adam) m_.assign(n_params, 0.0);
}

void Optimizer::step(std::vector<double>& params, const std::vector<double>& grads) {
    const std::size_t n = params.size();
    switch (kind_) {
        case OptKind::sgd:
            for (std::size_t i = 0; i < n; ++i) params[i] -= lr_ * grads[i];
            break;
        case OptKind::adagrad:
            for (std::size_t i = 0; i < n; ++i) {
                v_[i] += grads[i] * grads[i];
                params[i] -= lr_ * grads[i] / (std::sqrt(v_[i]) + kEps);
            }
            break;
        case OptKind::rmsprop:
            for (std::size_t i = 0; i < n; ++i) {
                v_[i] = kRmsDecay * v_[i] + (1.0 - kRmsDecay) * grads[i] * grads[i];
                params[i] -= lr_ * grads[i] / (std::sqrt(v_[i]) + kEps);
            }
            break;
        case OptKind::adam: {
            ++t_;
            const double c1 = 1.0 - std::pow(kBeta1, static_cast<double>(t_));
            const double c2 = 1.0 - std::pow(kBeta2, static_cast<double>(t_));
            for (std::size_t i = 0; i < n; ++i) {
                m_[i] = kBeta1 * m_[i] + (1.0 - kBeta1) * grads[i];
                v_[i] = kBeta2 * v_[i] + (1.0 - kBeta2) * grads[i] * grads[i];
                const double mhat = m_[i] / c1;
                const double vhat = v_[i] / c2;
                params[i] -= lr_ * mhat / (std::sqrt(vhat) + kEps);
            }
            break;
        }
    }
}

} // namespace catcast
