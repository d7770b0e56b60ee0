#include "appt/tensor.hpp"

#include "appt/errors.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_set>

namespace appt {

std::size_t numel(const Shape& shape) {
    return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

std::string to_string(const Shape& shape) {
    std::string out = "[";
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) out += "x";
        out += std::to_string(shape[i]);
    }
    return out + "]";
}

std::vector<real>& detail::Node::grad_buffer() {
    if (grad.empty()) grad.assign(value.size(), real{0});
    return grad;
}

Tensor::Tensor() : Tensor(Shape{0}, {}) {}

Tensor::Tensor(Shape shape, std::vector<real> data) : node_(std::make_shared<detail::Node>()) {
    if (appt::numel(shape) != data.size()) {
        throw DimensionError("tensor shape " + to_string(shape) + " does not match " +
                             std::to_string(data.size()) + " values");
    }
    node_->shape = std::move(shape);
    node_->value = std::move(data);
}

Tensor::Tensor(std::shared_ptr<detail::Node> node) : node_(std::move(node)) {}

Tensor Tensor::zeros(Shape shape) { return full(std::move(shape), real{0}); }

Tensor Tensor::full(Shape shape, real value) {
    const auto n = appt::numel(shape);
    return Tensor(std::move(shape), std::vector<real>(n, value));
}

Tensor Tensor::scalar(real value) { return Tensor(Shape{}, {value}); }

Tensor Tensor::vector(std::vector<real> values) {
    const auto n = values.size();
    return Tensor(Shape{n}, std::move(values));
}

Tensor Tensor::matrix(std::initializer_list<std::initializer_list<real>> rows) {
    const std::size_t r = rows.size();
    const std::size_t c = r ? rows.begin()->size() : 0;
    std::vector<real> data;
    data.reserve(r * c);
    for (const auto& row : rows) {
        if (row.size() != c) throw DimensionError("ragged matrix literal");
        data.insert(data.end(), row.begin(), row.end());
    }
    return Tensor(Shape{r, c}, std::move(data));
}

const Shape& Tensor::shape() const { return node_->shape; }
std::size_t Tensor::numel() const { return node_->value.size(); }

std::size_t Tensor::rows() const {
    if (rank() != 2) throw DimensionError("rows() on tensor of shape " + to_string(shape()));
    return shape()[0];
}

std::size_t Tensor::cols() const {
    if (rank() != 2) throw DimensionError("cols() on tensor of shape " + to_string(shape()));
    return shape()[1];
}

std::span<const real> Tensor::data() const { return node_->value; }

real Tensor::at(std::size_t r, std::size_t c) const { return node_->value[r * cols() + c]; }

real Tensor::item() const {
    if (numel() != 1) throw DimensionError("item() on tensor of shape " + to_string(shape()));
    return node_->value[0];
}

bool Tensor::requires_grad() const { return node_->requires_grad; }
bool Tensor::has_grad() const { return !node_->grad.empty(); }
std::span<const real> Tensor::grad() const { return node_->grad; }

Parameter::Parameter(std::string name, Shape shape)
    : name_(std::make_shared<std::string>(std::move(name))),
      node_(std::make_shared<detail::Node>()) {
    const auto n = appt::numel(shape);
    node_->shape = std::move(shape);
    node_->value.assign(n, real{0});
    node_->grad.assign(n, real{0});
    node_->requires_grad = true;
    node_->is_parameter = true;
}

const Shape& Parameter::shape() const { return node_->shape; }
std::span<real> Parameter::value() { return node_->value; }
std::span<const real> Parameter::value() const { return node_->value; }
std::span<real> Parameter::gradient() { return node_->grad; }
std::span<const real> Parameter::gradient() const { return node_->grad; }
void Parameter::zero_grad() { std::fill(node_->grad.begin(), node_->grad.end(), real{0}); }

void backward(const Tensor& loss) {
    if (loss.numel() != 1) {
        throw DimensionError("backward needs a scalar loss, got shape " + to_string(loss.shape()));
    }
    const auto& root = loss.node();
    if (!root->requires_grad) return;

    // Iterative post-order DFS; recurrent graphs are too deep for recursion.
    std::vector<detail::Node*> order;
    std::unordered_set<detail::Node*> seen;
    std::vector<std::pair<detail::Node*, std::size_t>> stack{{root.get(), 0}};
    seen.insert(root.get());
    while (!stack.empty()) {
        auto& [node, next] = stack.back();
        if (next < node->inputs.size()) {
            detail::Node* child = node->inputs[next++].get();
            if (child->requires_grad && seen.insert(child).second) stack.emplace_back(child, 0);
        } else {
            order.push_back(node);
            stack.pop_back();
        }
    }

    for (auto* node : order) {
        if (!node->is_parameter) node->grad.clear();
    }
    root->grad_buffer()[0] += real{1};
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        detail::Node* node = *it;
        if (node->backward && !node->grad.empty()) node->backward(*node);
    }
}

}  // namespace appt
