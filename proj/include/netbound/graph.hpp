#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "netbound/activation.hpp"

namespace netbound {

enum class LayerKind {
    InputLinear,
    Dense,
    LstmCell,
    GruCell,
    OutputLinear,
    PointwiseActivation,
    InverseSigmoid,
};

std::string_view to_string(LayerKind kind);
LayerKind layer_kind_from_string(std::string_view name);

/// Row-major dense matrix of doubles. A vector is a rows x 1 matrix.
struct Matrix {
    std::size_t rows = 0, cols = 0;
    std::vector<double> a;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, 0.0) {}

    double& at(std::size_t r, std::size_t c) { return a[r * cols + c]; }
    double at(std::size_t r, std::size_t c) const { return a[r * cols + c]; }
    bool empty() const { return a.empty(); }
    std::size_t size() const { return a.size(); }

    bool operator==(const Matrix&) const = default;
};

/// One layer of the chain. Affine kinds (input_linear, dense, output_linear)
/// keep their parameters in `weights` (out_dim x in_dim) and `bias`.
/// Recurrent cells keep theirs in `extra` under the keys "weight_ih"
/// (gates*units x in_dim), "weight_hh" (gates*units x units) and "bias"
/// (gates*units x 1); gate row order is i,f,g,o for LSTM and r,z,n for GRU.
/// Pointwise kinds carry no parameters.
struct LayerSpec {
    LayerKind kind = LayerKind::Dense;
    std::size_t in_dim = 0, out_dim = 0;
    Matrix weights;
    std::vector<double> bias;
    ActivationSpec activation;                      // candidate/output for recurrent kinds
    std::optional<ActivationSpec> gate_activation;  // recurrent kinds only
    std::map<std::string, Matrix> extra;

    bool is_affine() const {
        return kind == LayerKind::InputLinear || kind == LayerKind::Dense ||
               kind == LayerKind::OutputLinear;
    }
    bool is_recurrent() const {
        return kind == LayerKind::LstmCell || kind == LayerKind::GruCell;
    }
    std::size_t gate_count() const { return kind == LayerKind::LstmCell ? 4 : 3; }
};

/// Additive skip edge: the target layer's output receives
/// projection * (input of the source layer). An absent projection means
/// identity (dims must match).
struct SkipEdge {
    std::size_t source = 0;
    std::size_t target = 0;
    std::optional<Matrix> projection;
};

/// A network as an ordered layer chain (linear input layer first, linear
/// output layer last) plus optional additive skip edges. `lookback` is the
/// window length consumed by one forward pass.
struct NetworkGraph {
    std::vector<LayerSpec> layers;
    std::vector<SkipEdge> skip_edges;
    std::size_t input_dim = 0;
    std::size_t output_dim = 0;
    std::size_t lookback = 1;

    /// Throws std::invalid_argument on any structural invariant violation:
    /// dim chaining, parameter shapes, activation metadata, skip acyclicity.
    void validate() const;

    /// Index of the single recurrent layer, if any.
    std::optional<std::size_t> recurrent_layer() const;
};

enum class ModelVariant {
    MlpBottleneck,
    MlpLinear,
    LstmStandard,
    LstmLinear,
    GruStandard,
    GruLinear,
};

inline constexpr ModelVariant kAllVariants[] = {
    ModelVariant::MlpBottleneck, ModelVariant::MlpLinear,  ModelVariant::LstmStandard,
    ModelVariant::LstmLinear,    ModelVariant::GruStandard, ModelVariant::GruLinear,
};

std::string_view to_string(ModelVariant v);
std::optional<ModelVariant> variant_from_string(std::string_view name);

/// Build one of the six reference architectures with seeded weight
/// initialization (uniform in +/- sqrt(1/fan_in), deterministic per seed).
///
/// MLP variants flatten the 10-value window into one input; recurrent
/// variants carry a 10-unit cell fed one value per step through a scalar
/// input layer. The *_linear recurrent variants use identity candidate/output
/// activation while the gates stay logistic.
NetworkGraph build_reference_model(ModelVariant variant, std::uint64_t seed);

/// Visit every trainable parameter in a stable order (per layer: weights
/// row-major then bias, or weight_ih / weight_hh / bias for cells; then skip
/// projections in edge order).
void visit_parameters(NetworkGraph& g, const std::function<void(double&)>& fn);
std::size_t parameter_count(const NetworkGraph& g);

}  // namespace netbound
