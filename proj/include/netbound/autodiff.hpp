#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace netbound {

class Tape;

enum class OpTag : std::uint8_t {
    Leaf,
    Add,
    Sub,
    Mul,
    Neg,
    Tanh,
    Logistic,
    Relu,
    Identity,
    Affine,
    LogitClamped,
};

/// Lightweight handle to a node on a Tape. Copyable; only valid as long as
/// the owning tape exists and the node has not been truncated away.
class Value {
public:
    Value() = default;

    double data() const;
    double grad() const;
    bool valid() const { return tape_ != nullptr; }
    std::uint32_t id() const { return idx_; }
    Tape* tape() const { return tape_; }

private:
    friend class Tape;
    Value(Tape* t, std::uint32_t i) : tape_(t), idx_(i) {}

    Tape* tape_ = nullptr;
    std::uint32_t idx_ = 0;
};

/// Append-only reverse-mode autodiff tape over scalar nodes.
///
/// Each node records its local partial derivatives with respect to its
/// parents at construction time, so backward() is a single reverse sweep.
/// Construction order is a topological order by design. Gradients accumulate
/// across backward() calls until zero_grad(). A tape is single-threaded;
/// independent tapes may be used concurrently.
class Tape {
public:
    Tape() { parent_begin_.push_back(0); }

    Value leaf(double v);

    Value add(Value a, Value b);
    Value sub(Value a, Value b);
    Value mul(Value a, Value b);
    Value neg(Value a);
    Value tanh_op(Value a);
    Value logistic_op(Value a);
    Value relu_op(Value a);
    Value identity_op(Value a);

    /// Dot product plus bias: sum_i w[i] * x[i] + bias, as one node.
    Value affine(std::span<const Value> w, std::span<const Value> x, Value bias);

    /// Two-block affine: w1.x1 + w2.x2 + bias (one node).
    Value affine2(std::span<const Value> w1, std::span<const Value> x1,
                  std::span<const Value> w2, std::span<const Value> x2, Value bias);

    /// Matrix-vector product with bias; W is row-major rows x cols.
    /// Throws std::invalid_argument on shape mismatch, naming the shapes.
    std::vector<Value> matvec(std::span<const Value> w, std::size_t rows, std::size_t cols,
                              std::span<const Value> x, std::span<const Value> bias);

    /// Clamp to [eps, 1-eps] then apply log(x / (1-x)). The gradient is zero
    /// where the clamp was active. Increments the tape's clamp-event counter
    /// when it fires.
    Value logit_clamped(Value a, double eps = 1e-12);

    /// Reverse sweep from root; adds d(root)/d(node) into every node's grad.
    /// Throws std::invalid_argument if root lives on another tape.
    void backward(Value root);

    /// Reset all gradients to zero.
    void zero_grad();

    std::size_t size() const { return data_.size(); }

    /// Marker for truncate(): nodes created after the marker are discarded.
    std::size_t checkpoint() const { return data_.size(); }
    void truncate(std::size_t mark);

    double data(Value v) const;
    double grad(Value v) const;
    OpTag op_tag(Value v) const;
    void set_data(Value v, double d);

    std::size_t clamp_events() const { return clamp_events_; }
    void reset_clamp_events() { clamp_events_ = 0; }

private:
    Value push(double data, OpTag tag);
    void push_parent(Value p, double partial);
    void seal();  // close the parent list of the node under construction
    std::uint32_t index_of(Value v, const char* op) const;

    std::vector<double> data_;
    std::vector<double> grad_;
    std::vector<OpTag> tag_;
    std::vector<std::uint32_t> parent_begin_;  // size() + 1 prefix offsets
    std::vector<std::uint32_t> parent_idx_;
    std::vector<double> parent_partial_;
    std::vector<double> adjoint_;  // scratch for backward()
    std::size_t clamp_events_ = 0;
};

// Arithmetic sugar so templated code reads the same for double and Value.
inline Value operator+(Value a, Value b) { return a.tape()->add(a, b); }
inline Value operator-(Value a, Value b) { return a.tape()->sub(a, b); }
inline Value operator*(Value a, Value b) { return a.tape()->mul(a, b); }
inline Value operator-(Value a) { return a.tape()->neg(a); }

}  // namespace netbound
