#include "netbound/activation.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace netbound {

void ActivationSpec::validate() const {
    if (image_bounds && image_bounds->lo > image_bounds->hi)
        throw std::invalid_argument("activation '" + name + "': image bounds lo > hi");
    if (lipschitz_constant && *lipschitz_constant <= 0.0)
        throw std::invalid_argument("activation '" + name + "': Lipschitz constant must be positive");
    if (nondecreasing && limit_neg && limit_pos && *limit_neg > *limit_pos)
        throw std::invalid_argument("activation '" + name + "': nondecreasing but limit_neg > limit_pos");
}

ActivationKind activation_kind(std::string_view name) {
    if (name == "tanh") return ActivationKind::Tanh;
    if (name == "logistic" || name == "sigmoid") return ActivationKind::Logistic;
    if (name == "relu") return ActivationKind::Relu;
    if (name == "identity" || name == "linear") return ActivationKind::Identity;
    return ActivationKind::Custom;
}

ActivationSpec builtin_activation(std::string_view name) {
    ActivationSpec spec;
    spec.nondecreasing = true;
    switch (activation_kind(name)) {
        case ActivationKind::Tanh:
            spec.name = "tanh";
            spec.image_bounds = Interval{-1.0, 1.0};
            spec.lipschitz_constant = 1.0;  // sup tanh' = 1 at 0
            spec.limit_neg = -1.0;
            spec.limit_pos = 1.0;
            return spec;
        case ActivationKind::Logistic:
            spec.name = "logistic";
            spec.image_bounds = Interval{0.0, 1.0};
            spec.lipschitz_constant = 0.25;  // sup s(1-s) = 1/4
            spec.limit_neg = 0.0;
            spec.limit_pos = 1.0;
            return spec;
        case ActivationKind::Relu:
            spec.name = "relu";
            spec.lipschitz_constant = 1.0;
            spec.limit_neg = 0.0;
            return spec;
        case ActivationKind::Identity:
            spec.name = "identity";
            spec.lipschitz_constant = 1.0;
            return spec;
        case ActivationKind::Custom:
            break;
    }
    throw std::invalid_argument("unknown activation '" + std::string(name) + "'");
}

double logistic(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

double logit(double x) { return std::log(x / (1.0 - x)); }

double act_apply(const ActivationSpec& act, double x) {
    switch (activation_kind(act.name)) {
        case ActivationKind::Tanh: return std::tanh(x);
        case ActivationKind::Logistic: return logistic(x);
        case ActivationKind::Relu: return x > 0.0 ? x : 0.0;
        case ActivationKind::Identity: return x;
        case ActivationKind::Custom: break;
    }
    throw std::invalid_argument("activation '" + act.name + "' has no evaluator");
}

Interval activation_interval(const ActivationSpec& act, const Interval& pre) {
    switch (activation_kind(act.name)) {
        case ActivationKind::Identity:
            return pre;
        case ActivationKind::Relu:
            return {std::max(pre.lo, 0.0), std::max(pre.hi, 0.0)};
        default:
            break;
    }
    if (act.image_bounds) return *act.image_bounds;
    if (act.nondecreasing && (act.limit_neg || act.limit_pos)) {
        Interval out = Interval::all();
        if (act.limit_neg) out.lo = *act.limit_neg;
        if (act.limit_pos) out.hi = *act.limit_pos;
        return out;
    }
    return Interval::all();
}

std::string to_string(const Interval& iv) {
    std::ostringstream os;
    auto put = [&os](double v) {
        if (std::isinf(v))
            os << (v > 0 ? "inf" : "-inf");
        else
            os << v;
    };
    os << "[";
    put(iv.lo);
    os << ", ";
    put(iv.hi);
    os << "]";
    return os.str();
}

std::string to_string(const Box& box) {
    std::string s;
    for (std::size_t i = 0; i < box.size(); ++i) {
        if (i) s += " ";
        s += to_string(box[i]);
    }
    return s;
}

}  // namespace netbound
