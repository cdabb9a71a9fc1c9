#pragma once

#include <span>
#include <utility>
#include <vector>

#include "netbound/autodiff.hpp"
#include "netbound/graph.hpp"

namespace netbound {

template <class S>
struct RecurrentStateT {
    std::vector<S> hidden;
    std::vector<S> cell;  // LSTM only, empty otherwise
};
using RecurrentState = RecurrentStateT<double>;

/// Zero state sized for the given cell layer.
RecurrentState initial_state(const LayerSpec& cell);

struct ForwardStats {
    std::size_t clamp_events = 0;  // inverse-sigmoid inputs clamped away from {0,1}
};

/// sigma(W x + b) for an affine layer. Throws on dimension mismatch.
std::vector<double> dense_forward(const LayerSpec& layer, std::span<const double> x);

/// One LSTM step: gates i,f,o via the gate activation, candidate g via the
/// candidate activation, c' = f.c + i.g, h' = o . cand(c').
std::pair<std::vector<double>, RecurrentState> lstm_step(const LayerSpec& layer,
                                                         std::span<const double> x,
                                                         const RecurrentState& state);

/// One GRU step: r,z via the gate activation, candidate n = cand(affine(x, r.h)),
/// h' = (1-z).n + z.h.
std::pair<std::vector<double>, RecurrentState> gru_step(const LayerSpec& layer,
                                                        std::span<const double> x,
                                                        const RecurrentState& state);

/// Evaluate the whole network on one window.
///
/// Feed-forward graphs take the flattened window (length input_dim);
/// recurrent graphs consume lookback steps of input_dim values each,
/// unrolled from the zero state, with the post-cell layers applied to the
/// final hidden state. Skip edges add projection * (source layer input) to
/// the target layer's output; in the recurrent region the most recent step's
/// input is used. Throws std::invalid_argument when the window length does
/// not match the configured lookback.
std::vector<double> network_forward(const NetworkGraph& g, std::span<const double> window,
                                    ForwardStats* stats = nullptr);

/// A graph with all trainable parameters mirrored as leaves on a tape, so a
/// forward pass records the computation for backprop. The parameter order
/// matches visit_parameters().
class TapeNetwork {
public:
    TapeNetwork(const NetworkGraph& g, Tape& tape);

    /// Run one window through the lifted network, appending nodes to the tape.
    std::vector<Value> forward(std::span<const double> window);

    std::span<const Value> parameters() const { return params_; }
    Tape& tape() const { return *tape_; }
    const NetworkGraph& graph() const { return *graph_; }

    /// Copy current parameter values on the tape back into a graph with the
    /// same structure.
    void write_back(NetworkGraph& g) const;

private:
    const NetworkGraph* graph_;
    Tape* tape_;
    struct Lifted {
        std::vector<Value> w, b;            // affine kinds
        std::vector<Value> w_ih, w_hh, cb;  // recurrent kinds
    };
    std::vector<Lifted> layers_;
    std::vector<std::vector<Value>> skip_proj_;
    std::vector<Value> params_;
};

}  // namespace netbound
