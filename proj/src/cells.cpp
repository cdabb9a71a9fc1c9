#include "netbound/cells.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace netbound {

namespace {

// The forward pass is written once, generically over the scalar type:
// S = double evaluates data directly, S = Value records onto a tape.
// The EvalContext carries whatever the scalar type needs.

template <class S>
struct EvalContext;

template <>
struct EvalContext<double> {
    ForwardStats* stats = nullptr;
};

template <>
struct EvalContext<Value> {
    Tape* tape = nullptr;
};

double c_lift(EvalContext<double>&, double v) { return v; }
Value c_lift(EvalContext<Value>& c, double v) { return c.tape->leaf(v); }

double c_act(EvalContext<double>&, const ActivationSpec& a, double x) { return act_apply(a, x); }
Value c_act(EvalContext<Value>& c, const ActivationSpec& a, Value x) {
    switch (activation_kind(a.name)) {
        case ActivationKind::Tanh: return c.tape->tanh_op(x);
        case ActivationKind::Logistic: return c.tape->logistic_op(x);
        case ActivationKind::Relu: return c.tape->relu_op(x);
        case ActivationKind::Identity: return x;
        case ActivationKind::Custom: break;
    }
    throw std::invalid_argument("activation '" + a.name + "' has no evaluator");
}

constexpr double kLogitClampEps = 1e-12;

double c_logit(EvalContext<double>& c, double x) {
    if (x < kLogitClampEps || x > 1.0 - kLogitClampEps) {
        if (c.stats) ++c.stats->clamp_events;
        x = std::clamp(x, kLogitClampEps, 1.0 - kLogitClampEps);
    }
    return logit(x);
}
Value c_logit(EvalContext<Value>& c, Value x) { return c.tape->logit_clamped(x, kLogitClampEps); }

double c_dot(EvalContext<double>&, std::span<const double> w, std::span<const double> x,
             double bias) {
    double acc = bias;
    for (std::size_t i = 0; i < w.size(); ++i) acc += w[i] * x[i];
    return acc;
}
Value c_dot(EvalContext<Value>& c, std::span<const Value> w, std::span<const Value> x,
            Value bias) {
    return c.tape->affine(w, x, bias);
}

double c_dot2(EvalContext<double>&, std::span<const double> w1, std::span<const double> x1,
              std::span<const double> w2, std::span<const double> x2, double bias) {
    double acc = bias;
    for (std::size_t i = 0; i < w1.size(); ++i) acc += w1[i] * x1[i];
    for (std::size_t i = 0; i < w2.size(); ++i) acc += w2[i] * x2[i];
    return acc;
}
Value c_dot2(EvalContext<Value>& c, std::span<const Value> w1, std::span<const Value> x1,
             std::span<const Value> w2, std::span<const Value> x2, Value bias) {
    return c.tape->affine2(w1, x1, w2, x2, bias);
}

// Parameters of one layer with scalars of type S, flattened row-major.
template <class S>
struct LayerParams {
    std::vector<S> w, b;            // affine kinds
    std::vector<S> w_ih, w_hh, cb;  // recurrent kinds
};

template <class S>
LayerParams<S> lift_layer(EvalContext<S>& ctx, const LayerSpec& l) {
    LayerParams<S> p;
    auto lift_all = [&ctx](const std::vector<double>& src, std::vector<S>& dst) {
        dst.reserve(src.size());
        for (double v : src) dst.push_back(c_lift(ctx, v));
    };
    if (l.is_affine()) {
        lift_all(l.weights.a, p.w);
        lift_all(l.bias, p.b);
    } else if (l.is_recurrent()) {
        lift_all(l.extra.at("weight_ih").a, p.w_ih);
        lift_all(l.extra.at("weight_hh").a, p.w_hh);
        lift_all(l.extra.at("bias").a, p.cb);
    }
    return p;
}

template <class S>
void check_len(std::span<const S> x, std::size_t want, const char* what) {
    if (x.size() != want) {
        std::ostringstream os;
        os << what << ": got length " << x.size() << ", expected " << want;
        throw std::invalid_argument(os.str());
    }
}

template <class S>
std::vector<S> affine_apply(EvalContext<S>& ctx, const LayerSpec& l, const LayerParams<S>& p,
                            std::span<const S> x) {
    check_len(x, l.in_dim, "dense_forward input");
    std::vector<S> out;
    out.reserve(l.out_dim);
    std::span<const S> w(p.w);
    for (std::size_t r = 0; r < l.out_dim; ++r) {
        S pre = c_dot(ctx, w.subspan(r * l.in_dim, l.in_dim), x, p.b[r]);
        out.push_back(c_act(ctx, l.activation, pre));
    }
    return out;
}

template <class S>
std::vector<S> lstm_apply(EvalContext<S>& ctx, const LayerSpec& l, const LayerParams<S>& p,
                          std::span<const S> x, RecurrentStateT<S>& st) {
    const std::size_t u = l.out_dim;
    check_len(x, l.in_dim, "lstm_step input");
    check_len(std::span<const S>(st.hidden), u, "lstm_step hidden state");
    check_len(std::span<const S>(st.cell), u, "lstm_step cell state");
    const ActivationSpec& gate = *l.gate_activation;
    const ActivationSpec& cand = l.activation;
    std::span<const S> w_ih(p.w_ih), w_hh(p.w_hh);
    std::span<const S> h(st.hidden);

    auto pre = [&](std::size_t row) {
        return c_dot2(ctx, w_ih.subspan(row * l.in_dim, l.in_dim), x,
                      w_hh.subspan(row * u, u), h, p.cb[row]);
    };
    // gate row blocks: input, forget, candidate, output
    std::vector<S> h_next, c_next;
    h_next.reserve(u);
    c_next.reserve(u);
    for (std::size_t j = 0; j < u; ++j) {
        S i_g = c_act(ctx, gate, pre(0 * u + j));
        S f_g = c_act(ctx, gate, pre(1 * u + j));
        S g_c = c_act(ctx, cand, pre(2 * u + j));
        S o_g = c_act(ctx, gate, pre(3 * u + j));
        S c_new = f_g * st.cell[j] + i_g * g_c;
        h_next.push_back(o_g * c_act(ctx, cand, c_new));
        c_next.push_back(c_new);
    }
    st.hidden = h_next;
    st.cell = std::move(c_next);
    return h_next;
}

template <class S>
std::vector<S> gru_apply(EvalContext<S>& ctx, const LayerSpec& l, const LayerParams<S>& p,
                         std::span<const S> x, RecurrentStateT<S>& st) {
    const std::size_t u = l.out_dim;
    check_len(x, l.in_dim, "gru_step input");
    check_len(std::span<const S>(st.hidden), u, "gru_step hidden state");
    const ActivationSpec& gate = *l.gate_activation;
    const ActivationSpec& cand = l.activation;
    std::span<const S> w_ih(p.w_ih), w_hh(p.w_hh);
    std::span<const S> h(st.hidden);

    auto pre = [&](std::size_t row, std::span<const S> hvec) {
        return c_dot2(ctx, w_ih.subspan(row * l.in_dim, l.in_dim), x,
                      w_hh.subspan(row * u, u), hvec, p.cb[row]);
    };
    // gate row blocks: reset, update, candidate
    std::vector<S> r, z;
    r.reserve(u);
    z.reserve(u);
    for (std::size_t j = 0; j < u; ++j) r.push_back(c_act(ctx, gate, pre(0 * u + j, h)));
    for (std::size_t j = 0; j < u; ++j) z.push_back(c_act(ctx, gate, pre(1 * u + j, h)));
    std::vector<S> rh;
    rh.reserve(u);
    for (std::size_t j = 0; j < u; ++j) rh.push_back(r[j] * st.hidden[j]);
    std::vector<S> h_next;
    h_next.reserve(u);
    S one = c_lift(ctx, 1.0);
    for (std::size_t j = 0; j < u; ++j) {
        S n = c_act(ctx, cand, pre(2 * u + j, rh));
        h_next.push_back((one - z[j]) * n + z[j] * st.hidden[j]);
    }
    st.hidden = h_next;
    return h_next;
}

template <class S>
std::vector<S> pointwise_apply(EvalContext<S>& ctx, const LayerSpec& l, std::span<const S> x) {
    check_len(x, l.in_dim, "pointwise input");
    std::vector<S> out;
    out.reserve(x.size());
    for (const S& v : x)
        out.push_back(l.kind == LayerKind::InverseSigmoid ? c_logit(ctx, v)
                                                          : c_act(ctx, l.activation, v));
    return out;
}

template <class S>
std::vector<S> layer_apply(EvalContext<S>& ctx, const LayerSpec& l, const LayerParams<S>& p,
                           std::span<const S> x, RecurrentStateT<S>* st) {
    switch (l.kind) {
        case LayerKind::InputLinear:
        case LayerKind::Dense:
        case LayerKind::OutputLinear:
            return affine_apply(ctx, l, p, x);
        case LayerKind::LstmCell:
            return lstm_apply(ctx, l, p, x, *st);
        case LayerKind::GruCell:
            return gru_apply(ctx, l, p, x, *st);
        case LayerKind::PointwiseActivation:
        case LayerKind::InverseSigmoid:
            return pointwise_apply(ctx, l, x);
    }
    throw std::logic_error("unhandled layer kind");
}

template <class S>
RecurrentStateT<S> zero_state(EvalContext<S>& ctx, const LayerSpec& cell) {
    RecurrentStateT<S> st;
    st.hidden.assign(cell.out_dim, c_lift(ctx, 0.0));
    if (cell.kind == LayerKind::LstmCell) st.cell.assign(cell.out_dim, c_lift(ctx, 0.0));
    return st;
}

template <class S>
std::vector<S> graph_forward(EvalContext<S>& ctx, const NetworkGraph& g,
                             const std::vector<LayerParams<S>>& params,
                             const std::vector<std::vector<S>>& skip_proj,
                             std::span<const S> window) {
    const auto cell = g.recurrent_layer();
    const std::size_t want = cell ? g.lookback * g.input_dim : g.input_dim;
    if (window.size() != want) {
        std::ostringstream os;
        os << "window length " << window.size() << " does not match configured lookback "
           << g.lookback << " (expected " << want << " values)";
        throw std::invalid_argument(os.str());
    }

    std::vector<std::vector<S>> layer_inputs(g.layers.size());
    std::vector<S> v;

    auto apply_skips_into = [&](std::size_t target) {
        for (std::size_t ei = 0; ei < g.skip_edges.size(); ++ei) {
            const SkipEdge& e = g.skip_edges[ei];
            if (e.target != target) continue;
            const std::vector<S>& src = layer_inputs[e.source];
            if (!e.projection) {
                for (std::size_t k = 0; k < v.size(); ++k) v[k] = v[k] + src[k];
            } else {
                std::span<const S> pw(skip_proj[ei]);
                const std::size_t cols = e.projection->cols;
                S zero = c_lift(ctx, 0.0);
                for (std::size_t r = 0; r < e.projection->rows; ++r)
                    v[r] = v[r] + c_dot(ctx, pw.subspan(r * cols, cols), std::span<const S>(src),
                                        zero);
            }
        }
    };

    auto run_range = [&](std::size_t from, std::size_t to, RecurrentStateT<S>* st) {
        for (std::size_t i = from; i < to; ++i) {
            layer_inputs[i] = v;
            v = layer_apply(ctx, g.layers[i], params[i], std::span<const S>(layer_inputs[i]), st);
            apply_skips_into(i);
        }
    };

    if (cell) {
        RecurrentStateT<S> st = zero_state(ctx, g.layers[*cell]);
        for (std::size_t t = 0; t < g.lookback; ++t) {
            v.assign(window.begin() + t * g.input_dim, window.begin() + (t + 1) * g.input_dim);
            run_range(0, *cell + 1, &st);
        }
        run_range(*cell + 1, g.layers.size(), nullptr);
    } else {
        v.assign(window.begin(), window.end());
        run_range(0, g.layers.size(), nullptr);
    }
    return v;
}

std::vector<LayerParams<double>> lift_graph(EvalContext<double>& ctx, const NetworkGraph& g) {
    std::vector<LayerParams<double>> out;
    out.reserve(g.layers.size());
    for (const LayerSpec& l : g.layers) out.push_back(lift_layer(ctx, l));
    return out;
}

std::vector<std::vector<double>> lift_skips(const NetworkGraph& g) {
    std::vector<std::vector<double>> out(g.skip_edges.size());
    for (std::size_t i = 0; i < g.skip_edges.size(); ++i)
        if (g.skip_edges[i].projection) out[i] = g.skip_edges[i].projection->a;
    return out;
}

}  // namespace

RecurrentState initial_state(const LayerSpec& cell) {
    RecurrentState st;
    st.hidden.assign(cell.out_dim, 0.0);
    if (cell.kind == LayerKind::LstmCell) st.cell.assign(cell.out_dim, 0.0);
    return st;
}

std::vector<double> dense_forward(const LayerSpec& layer, std::span<const double> x) {
    if (!layer.is_affine()) throw std::invalid_argument("dense_forward: not an affine layer");
    EvalContext<double> ctx;
    auto p = lift_layer(ctx, layer);
    return affine_apply(ctx, layer, p, x);
}

std::pair<std::vector<double>, RecurrentState> lstm_step(const LayerSpec& layer,
                                                         std::span<const double> x,
                                                         const RecurrentState& state) {
    if (layer.kind != LayerKind::LstmCell) throw std::invalid_argument("lstm_step: not an lstm_cell");
    EvalContext<double> ctx;
    auto p = lift_layer(ctx, layer);
    RecurrentState st = state;
    auto out = lstm_apply(ctx, layer, p, x, st);
    return {std::move(out), std::move(st)};
}

std::pair<std::vector<double>, RecurrentState> gru_step(const LayerSpec& layer,
                                                        std::span<const double> x,
                                                        const RecurrentState& state) {
    if (layer.kind != LayerKind::GruCell) throw std::invalid_argument("gru_step: not a gru_cell");
    EvalContext<double> ctx;
    auto p = lift_layer(ctx, layer);
    RecurrentState st = state;
    auto out = gru_apply(ctx, layer, p, x, st);
    return {std::move(out), std::move(st)};
}

std::vector<double> network_forward(const NetworkGraph& g, std::span<const double> window,
                                    ForwardStats* stats) {
    EvalContext<double> ctx{stats};
    auto params = lift_graph(ctx, g);
    auto skips = lift_skips(g);
    return graph_forward(ctx, g, params, skips, window);
}

TapeNetwork::TapeNetwork(const NetworkGraph& g, Tape& tape) : graph_(&g), tape_(&tape) {
    EvalContext<Value> ctx{&tape};
    layers_.reserve(g.layers.size());
    auto track = [this](const std::vector<Value>& vs) {
        params_.insert(params_.end(), vs.begin(), vs.end());
    };
    for (const LayerSpec& l : g.layers) {
        auto p = lift_layer(ctx, l);
        // same order as visit_parameters
        track(p.w);
        track(p.b);
        track(p.w_ih);
        track(p.w_hh);
        track(p.cb);
        layers_.push_back({std::move(p.w), std::move(p.b), std::move(p.w_ih), std::move(p.w_hh),
                           std::move(p.cb)});
    }
    skip_proj_.resize(g.skip_edges.size());
    for (std::size_t i = 0; i < g.skip_edges.size(); ++i) {
        if (!g.skip_edges[i].projection) continue;
        for (double v : g.skip_edges[i].projection->a) skip_proj_[i].push_back(tape.leaf(v));
        track(skip_proj_[i]);
    }
}

std::vector<Value> TapeNetwork::forward(std::span<const double> window) {
    EvalContext<Value> ctx{tape_};
    std::vector<Value> w;
    w.reserve(window.size());
    for (double v : window) w.push_back(tape_->leaf(v));

    std::vector<LayerParams<Value>> params;
    params.reserve(layers_.size());
    for (const Lifted& l : layers_) params.push_back({l.w, l.b, l.w_ih, l.w_hh, l.cb});
    return graph_forward(ctx, *graph_, params, skip_proj_, std::span<const Value>(w));
}

void TapeNetwork::write_back(NetworkGraph& g) const {
    if (parameter_count(g) != params_.size())
        throw std::invalid_argument("write_back: parameter count mismatch");
    std::size_t i = 0;
    visit_parameters(g, [&](double& slot) { slot = params_[i++].data(); });
}

}  // namespace netbound
