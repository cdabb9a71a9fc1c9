#include "netbound/graph.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "netbound/rng.hpp"

namespace netbound {

std::string_view to_string(LayerKind kind) {
    switch (kind) {
        case LayerKind::InputLinear: return "input_linear";
        case LayerKind::Dense: return "dense";
        case LayerKind::LstmCell: return "lstm_cell";
        case LayerKind::GruCell: return "gru_cell";
        case LayerKind::OutputLinear: return "output_linear";
        case LayerKind::PointwiseActivation: return "pointwise_activation";
        case LayerKind::InverseSigmoid: return "inverse_sigmoid";
    }
    return "?";
}

LayerKind layer_kind_from_string(std::string_view name) {
    if (name == "input_linear") return LayerKind::InputLinear;
    if (name == "dense") return LayerKind::Dense;
    if (name == "lstm_cell") return LayerKind::LstmCell;
    if (name == "gru_cell") return LayerKind::GruCell;
    if (name == "output_linear") return LayerKind::OutputLinear;
    if (name == "pointwise_activation") return LayerKind::PointwiseActivation;
    if (name == "inverse_sigmoid") return LayerKind::InverseSigmoid;
    throw std::invalid_argument("unknown layer kind '" + std::string(name) + "'");
}

std::string_view to_string(ModelVariant v) {
    switch (v) {
        case ModelVariant::MlpBottleneck: return "mlp_bottleneck";
        case ModelVariant::MlpLinear: return "mlp_linear";
        case ModelVariant::LstmStandard: return "lstm_standard";
        case ModelVariant::LstmLinear: return "lstm_linear";
        case ModelVariant::GruStandard: return "gru_standard";
        case ModelVariant::GruLinear: return "gru_linear";
    }
    return "?";
}

std::optional<ModelVariant> variant_from_string(std::string_view name) {
    for (ModelVariant v : kAllVariants)
        if (to_string(v) == name) return v;
    return std::nullopt;
}

namespace {

[[noreturn]] void fail(std::size_t layer, const std::string& msg) {
    std::ostringstream os;
    os << "layer " << layer << ": " << msg;
    throw std::invalid_argument(os.str());
}

void check_layer(std::size_t i, const LayerSpec& l) {
    if (l.in_dim == 0 || l.out_dim == 0) fail(i, "zero dimension");
    l.activation.validate();
    if (l.gate_activation) l.gate_activation->validate();

    if (l.is_affine()) {
        if (l.weights.rows != l.out_dim || l.weights.cols != l.in_dim) {
            std::ostringstream os;
            os << "weights are " << l.weights.rows << "x" << l.weights.cols << " but layer is "
               << l.in_dim << " -> " << l.out_dim;
            fail(i, os.str());
        }
        if (l.bias.size() != l.out_dim) fail(i, "bias length does not match out_dim");
        if (l.gate_activation) fail(i, "gate activation on a non-recurrent layer");
    } else if (l.is_recurrent()) {
        if (!l.gate_activation) fail(i, "recurrent cell needs a gate activation");
        const std::size_t g = l.gate_count() * l.out_dim;
        auto want = [&](const char* key, std::size_t r, std::size_t c) {
            auto it = l.extra.find(key);
            if (it == l.extra.end()) fail(i, std::string("missing cell parameter '") + key + "'");
            if (it->second.rows != r || it->second.cols != c) {
                std::ostringstream os;
                os << "cell parameter '" << key << "' is " << it->second.rows << "x"
                   << it->second.cols << ", expected " << r << "x" << c;
                fail(i, os.str());
            }
        };
        want("weight_ih", g, l.in_dim);
        want("weight_hh", g, l.out_dim);
        want("bias", g, 1);
        if (!l.weights.empty() || !l.bias.empty())
            fail(i, "recurrent cells keep parameters in 'extra', not weights/bias");
    } else {
        // Pointwise kinds: parameter-free, dimension-preserving.
        if (l.in_dim != l.out_dim) fail(i, "pointwise layer must preserve dimension");
        if (!l.weights.empty() || !l.bias.empty()) fail(i, "pointwise layer carries no parameters");
        if (l.gate_activation) fail(i, "gate activation on a pointwise layer");
    }
}

Matrix seeded_uniform(std::size_t rows, std::size_t cols, double fan_in, SplitMix64 gen) {
    Matrix m(rows, cols);
    const double bound = std::sqrt(1.0 / fan_in);
    for (double& v : m.a) v = gen.uniform_symmetric(bound);
    return m;
}

LayerSpec affine_layer(LayerKind kind, std::size_t in, std::size_t out,
                       const ActivationSpec& act, std::uint64_t seed, std::size_t index) {
    LayerSpec l;
    l.kind = kind;
    l.in_dim = in;
    l.out_dim = out;
    l.activation = act;
    l.weights = seeded_uniform(out, in, static_cast<double>(in), substream(seed, index, 0));
    Matrix b = seeded_uniform(out, 1, static_cast<double>(in), substream(seed, index, 1));
    l.bias = std::move(b.a);
    return l;
}

LayerSpec cell_layer(LayerKind kind, std::size_t in, std::size_t units,
                     const ActivationSpec& candidate, std::uint64_t seed, std::size_t index) {
    LayerSpec l;
    l.kind = kind;
    l.in_dim = in;
    l.out_dim = units;
    l.activation = candidate;
    l.gate_activation = builtin_activation("logistic");
    const std::size_t g = l.gate_count() * units;
    l.extra["weight_ih"] = seeded_uniform(g, in, static_cast<double>(in), substream(seed, index, 0));
    l.extra["weight_hh"] =
        seeded_uniform(g, units, static_cast<double>(units), substream(seed, index, 1));
    l.extra["bias"] = seeded_uniform(g, 1, static_cast<double>(units), substream(seed, index, 2));
    return l;
}

}  // namespace

void NetworkGraph::validate() const {
    if (layers.empty()) throw std::invalid_argument("graph has no layers");
    if (layers.front().kind != LayerKind::InputLinear)
        throw std::invalid_argument("first layer must be input_linear");
    if (layers.back().kind != LayerKind::OutputLinear)
        throw std::invalid_argument("last layer must be output_linear");
    if (layers.front().in_dim != input_dim)
        throw std::invalid_argument("input layer in_dim does not match graph input_dim");
    if (layers.back().out_dim != output_dim)
        throw std::invalid_argument("output layer out_dim does not match graph output_dim");
    if (lookback == 0) throw std::invalid_argument("lookback must be positive");

    std::size_t cells = 0;
    for (std::size_t i = 0; i < layers.size(); ++i) {
        check_layer(i, layers[i]);
        if (layers[i].is_recurrent()) ++cells;
        if (i + 1 < layers.size() && layers[i].out_dim != layers[i + 1].in_dim) {
            std::ostringstream os;
            os << "dimension chain broken between layer " << i << " (out " << layers[i].out_dim
               << ") and layer " << i + 1 << " (in " << layers[i + 1].in_dim << ")";
            throw std::invalid_argument(os.str());
        }
    }
    if (cells > 1) throw std::invalid_argument("at most one recurrent cell per graph");
    if (cells == 0 && input_dim != lookback)
        throw std::invalid_argument("feed-forward graph must consume the flattened window: "
                                    "input_dim must equal lookback");

    for (const SkipEdge& e : skip_edges) {
        if (e.target >= layers.size())
            throw std::invalid_argument("skip edge target out of range");
        if (e.source >= e.target)
            throw std::invalid_argument("skip edge must connect an earlier layer to a strictly "
                                        "later one (acyclic)");
        const std::size_t src_dim = layers[e.source].in_dim;
        const std::size_t dst_dim = layers[e.target].out_dim;
        if (e.projection) {
            if (e.projection->rows != dst_dim || e.projection->cols != src_dim) {
                std::ostringstream os;
                os << "skip projection is " << e.projection->rows << "x" << e.projection->cols
                   << ", expected " << dst_dim << "x" << src_dim;
                throw std::invalid_argument(os.str());
            }
        } else if (src_dim != dst_dim) {
            throw std::invalid_argument("identity skip edge between mismatched dimensions");
        }
    }
}

std::optional<std::size_t> NetworkGraph::recurrent_layer() const {
    for (std::size_t i = 0; i < layers.size(); ++i)
        if (layers[i].is_recurrent()) return i;
    return std::nullopt;
}

NetworkGraph build_reference_model(ModelVariant variant, std::uint64_t seed) {
    const ActivationSpec identity = builtin_activation("identity");
    const ActivationSpec tanh_act = builtin_activation("tanh");
    const ActivationSpec logistic_act = builtin_activation("logistic");
    const std::size_t lookback = 10;
    const std::size_t units = 10;

    NetworkGraph g;
    g.output_dim = 1;
    g.lookback = lookback;

    switch (variant) {
        case ModelVariant::MlpBottleneck:
        case ModelVariant::MlpLinear: {
            const bool linear = variant == ModelVariant::MlpLinear;
            g.input_dim = lookback;
            g.layers.push_back(affine_layer(LayerKind::InputLinear, lookback, 1, identity, seed, 0));
            g.layers.push_back(
                affine_layer(LayerKind::Dense, 1, 1, linear ? identity : tanh_act, seed, 1));
            g.layers.push_back(
                affine_layer(LayerKind::Dense, 1, 1, linear ? identity : logistic_act, seed, 2));
            g.layers.push_back(affine_layer(LayerKind::OutputLinear, 1, 1, identity, seed, 3));
            break;
        }
        case ModelVariant::LstmStandard:
        case ModelVariant::LstmLinear:
        case ModelVariant::GruStandard:
        case ModelVariant::GruLinear: {
            const bool lstm =
                variant == ModelVariant::LstmStandard || variant == ModelVariant::LstmLinear;
            const bool linear =
                variant == ModelVariant::LstmLinear || variant == ModelVariant::GruLinear;
            g.input_dim = 1;
            g.layers.push_back(affine_layer(LayerKind::InputLinear, 1, 1, identity, seed, 0));
            g.layers.push_back(cell_layer(lstm ? LayerKind::LstmCell : LayerKind::GruCell, 1,
                                          units, linear ? identity : tanh_act, seed, 1));
            g.layers.push_back(affine_layer(LayerKind::OutputLinear, units, 1, identity, seed, 2));
            break;
        }
    }
    g.validate();
    return g;
}

void visit_parameters(NetworkGraph& g, const std::function<void(double&)>& fn) {
    for (LayerSpec& l : g.layers) {
        if (l.is_affine()) {
            for (double& v : l.weights.a) fn(v);
            for (double& v : l.bias) fn(v);
        } else if (l.is_recurrent()) {
            for (const char* key : {"weight_ih", "weight_hh", "bias"})
                for (double& v : l.extra.at(key).a) fn(v);
        }
    }
    for (SkipEdge& e : g.skip_edges)
        if (e.projection)
            for (double& v : e.projection->a) fn(v);
}

std::size_t parameter_count(const NetworkGraph& g) {
    std::size_t n = 0;
    visit_parameters(const_cast<NetworkGraph&>(g), [&n](double&) { ++n; });
    return n;
}

}  // namespace netbound
