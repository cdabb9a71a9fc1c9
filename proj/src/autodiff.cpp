#include "netbound/autodiff.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "netbound/activation.hpp"

namespace netbound {

double Value::data() const { return tape_->data(*this); }
double Value::grad() const { return tape_->grad(*this); }

std::uint32_t Tape::index_of(Value v, const char* op) const {
    if (v.tape() != this)
        throw std::invalid_argument(std::string(op) + ": value does not belong to this tape");
    if (v.id() >= data_.size())
        throw std::invalid_argument(std::string(op) + ": value was truncated off the tape");
    return v.id();
}

Value Tape::push(double data, OpTag tag) {
    data_.push_back(data);
    grad_.push_back(0.0);
    tag_.push_back(tag);
    return Value(this, static_cast<std::uint32_t>(data_.size() - 1));
}

void Tape::push_parent(Value p, double partial) {
    parent_idx_.push_back(p.id());
    parent_partial_.push_back(partial);
}

void Tape::seal() { parent_begin_.push_back(static_cast<std::uint32_t>(parent_idx_.size())); }

Value Tape::leaf(double v) {
    Value out = push(v, OpTag::Leaf);
    seal();
    return out;
}

Value Tape::add(Value a, Value b) {
    std::uint32_t ia = index_of(a, "add"), ib = index_of(b, "add");
    Value out = push(data_[ia] + data_[ib], OpTag::Add);
    push_parent(a, 1.0);
    push_parent(b, 1.0);
    seal();
    return out;
}

Value Tape::sub(Value a, Value b) {
    std::uint32_t ia = index_of(a, "sub"), ib = index_of(b, "sub");
    Value out = push(data_[ia] - data_[ib], OpTag::Sub);
    push_parent(a, 1.0);
    push_parent(b, -1.0);
    seal();
    return out;
}

Value Tape::mul(Value a, Value b) {
    std::uint32_t ia = index_of(a, "mul"), ib = index_of(b, "mul");
    Value out = push(data_[ia] * data_[ib], OpTag::Mul);
    push_parent(a, data_[ib]);
    push_parent(b, data_[ia]);
    seal();
    return out;
}

Value Tape::neg(Value a) {
    std::uint32_t ia = index_of(a, "neg");
    Value out = push(-data_[ia], OpTag::Neg);
    push_parent(a, -1.0);
    seal();
    return out;
}

Value Tape::tanh_op(Value a) {
    std::uint32_t ia = index_of(a, "tanh");
    const double t = std::tanh(data_[ia]);
    Value out = push(t, OpTag::Tanh);
    push_parent(a, 1.0 - t * t);
    seal();
    return out;
}

Value Tape::logistic_op(Value a) {
    std::uint32_t ia = index_of(a, "logistic");
    const double s = logistic(data_[ia]);
    Value out = push(s, OpTag::Logistic);
    push_parent(a, s * (1.0 - s));
    seal();
    return out;
}

Value Tape::relu_op(Value a) {
    std::uint32_t ia = index_of(a, "relu");
    const double x = data_[ia];
    Value out = push(x > 0.0 ? x : 0.0, OpTag::Relu);
    push_parent(a, x > 0.0 ? 1.0 : 0.0);
    seal();
    return out;
}

Value Tape::identity_op(Value a) {
    std::uint32_t ia = index_of(a, "identity");
    Value out = push(data_[ia], OpTag::Identity);
    push_parent(a, 1.0);
    seal();
    return out;
}

Value Tape::affine(std::span<const Value> w, std::span<const Value> x, Value bias) {
    if (w.size() != x.size()) {
        std::ostringstream os;
        os << "affine: weight length " << w.size() << " vs input length " << x.size();
        throw std::invalid_argument(os.str());
    }
    double acc = data(bias);
    for (std::size_t i = 0; i < w.size(); ++i) acc += data(w[i]) * data(x[i]);
    Value out = push(acc, OpTag::Affine);
    for (std::size_t i = 0; i < w.size(); ++i) {
        push_parent(w[i], data(x[i]));
        push_parent(x[i], data(w[i]));
    }
    push_parent(bias, 1.0);
    seal();
    return out;
}

Value Tape::affine2(std::span<const Value> w1, std::span<const Value> x1,
                    std::span<const Value> w2, std::span<const Value> x2, Value bias) {
    if (w1.size() != x1.size() || w2.size() != x2.size()) {
        std::ostringstream os;
        os << "affine2: block shapes (" << w1.size() << "," << x1.size() << ") and ("
           << w2.size() << "," << x2.size() << ") must agree pairwise";
        throw std::invalid_argument(os.str());
    }
    double acc = data(bias);
    for (std::size_t i = 0; i < w1.size(); ++i) acc += data(w1[i]) * data(x1[i]);
    for (std::size_t i = 0; i < w2.size(); ++i) acc += data(w2[i]) * data(x2[i]);
    Value out = push(acc, OpTag::Affine);
    for (std::size_t i = 0; i < w1.size(); ++i) {
        push_parent(w1[i], data(x1[i]));
        push_parent(x1[i], data(w1[i]));
    }
    for (std::size_t i = 0; i < w2.size(); ++i) {
        push_parent(w2[i], data(x2[i]));
        push_parent(x2[i], data(w2[i]));
    }
    push_parent(bias, 1.0);
    seal();
    return out;
}

std::vector<Value> Tape::matvec(std::span<const Value> w, std::size_t rows, std::size_t cols,
                                std::span<const Value> x, std::span<const Value> bias) {
    if (w.size() != rows * cols || x.size() != cols || bias.size() != rows) {
        std::ostringstream os;
        os << "matvec: weights " << rows << "x" << cols << " (" << w.size()
           << " values) with input length " << x.size() << " and bias length " << bias.size();
        throw std::invalid_argument(os.str());
    }
    std::vector<Value> out;
    out.reserve(rows);
    for (std::size_t r = 0; r < rows; ++r)
        out.push_back(affine(w.subspan(r * cols, cols), x, bias[r]));
    return out;
}

Value Tape::logit_clamped(Value a, double eps) {
    std::uint32_t ia = index_of(a, "logit");
    const double x = data_[ia];
    double partial;
    double y;
    if (x < eps || x > 1.0 - eps) {
        ++clamp_events_;
        const double c = x < eps ? eps : 1.0 - eps;
        y = logit(c);
        partial = 0.0;
    } else {
        y = logit(x);
        partial = 1.0 / (x * (1.0 - x));
    }
    Value out = push(y, OpTag::LogitClamped);
    push_parent(a, partial);
    seal();
    return out;
}

void Tape::backward(Value root) {
    const std::uint32_t r = index_of(root, "backward");
    adjoint_.assign(r + 1, 0.0);
    adjoint_[r] = 1.0;
    for (std::uint32_t i = r + 1; i-- > 0;) {
        const double a = adjoint_[i];
        if (a == 0.0) continue;
        for (std::uint32_t k = parent_begin_[i]; k < parent_begin_[i + 1]; ++k)
            adjoint_[parent_idx_[k]] += a * parent_partial_[k];
    }
    for (std::uint32_t i = 0; i <= r; ++i) grad_[i] += adjoint_[i];
}

void Tape::zero_grad() { grad_.assign(grad_.size(), 0.0); }

void Tape::truncate(std::size_t mark) {
    if (mark > data_.size()) throw std::invalid_argument("truncate: marker beyond tape end");
    data_.resize(mark);
    grad_.resize(mark);
    tag_.resize(mark);
    parent_begin_.resize(mark + 1);
    parent_idx_.resize(parent_begin_[mark]);
    parent_partial_.resize(parent_begin_[mark]);
}

double Tape::data(Value v) const { return data_[index_of(v, "data")]; }
double Tape::grad(Value v) const { return grad_[index_of(v, "grad")]; }
OpTag Tape::op_tag(Value v) const { return tag_[index_of(v, "op_tag")]; }
void Tape::set_data(Value v, double d) { data_[index_of(v, "set_data")] = d; }

}  // namespace netbound
