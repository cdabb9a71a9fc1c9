#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "netbound/interval.hpp"

namespace netbound {

enum class ActivationKind { Tanh, Logistic, Relu, Identity, Custom };

/// Metadata describing a scalar activation: its image, global Lipschitz
/// constant (absent = not globally Lipschitz), monotonicity, and the limits
/// at -inf / +inf. The analysis consumes only this metadata, so user-defined
/// activations can be described without an evaluator.
struct ActivationSpec {
    std::string name;
    std::optional<Interval> image_bounds;
    std::optional<double> lipschitz_constant;
    bool nondecreasing = false;
    std::optional<double> limit_neg;  // limit at -inf
    std::optional<double> limit_pos;  // limit at +inf

    /// Throws std::invalid_argument on inconsistent metadata
    /// (image lo > hi, or nondecreasing with limit_neg > limit_pos).
    void validate() const;
};

ActivationKind activation_kind(std::string_view name);

/// Returns the metadata for one of {tanh, logistic, relu, identity}.
/// Throws std::invalid_argument for anything else.
ActivationSpec builtin_activation(std::string_view name);

/// Numerically stable 1 / (1 + exp(-x)).
double logistic(double x);

/// log(x / (1 - x)), the inverse of the logistic function on (0, 1).
double logit(double x);

/// Evaluate a builtin activation. Throws for activations without an
/// evaluator (ActivationKind::Custom).
double act_apply(const ActivationSpec& act, double x);

/// Sound over-approximation of act(pre) as an interval.
///
/// Activations with declared image bounds map to those bounds regardless of
/// the input interval (the closure of the image; deliberately coarse so that
/// downstream consumers such as the inverse-sigmoid rewrite see the full
/// attainable range). Identity and relu get exact transfer; a custom
/// nondecreasing activation falls back to its declared limits.
Interval activation_interval(const ActivationSpec& act, const Interval& pre);

}  // namespace netbound
