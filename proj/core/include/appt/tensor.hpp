#pragma once

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace appt {

#ifdef APPT_REAL_DOUBLE
using real = double;
#else
using real = float;
#endif

using Shape = std::vector<std::size_t>;

std::size_t numel(const Shape& shape);
std::string to_string(const Shape& shape);

namespace detail {

// One vertex of the recorded computation. Leaves are constants or
// parameters; interior nodes carry a closure that pushes their gradient
// into their inputs.
struct Node {
    Shape shape;
    std::vector<real> value;
    std::vector<real> grad;  // empty until something flows into it
    std::vector<std::shared_ptr<Node>> inputs;
    std::function<void(Node&)> backward;
    bool requires_grad = false;
    bool is_parameter = false;

    std::vector<real>& grad_buffer();
};

}  // namespace detail

/// Dense row-major tensor. Copies share storage; forward operations never
/// modify their inputs.
class Tensor {
public:
    Tensor();
    Tensor(Shape shape, std::vector<real> data);

    static Tensor zeros(Shape shape);
    static Tensor full(Shape shape, real value);
    static Tensor scalar(real value);
    static Tensor vector(std::vector<real> values);
    static Tensor matrix(std::initializer_list<std::initializer_list<real>> rows);

    const Shape& shape() const;
    std::size_t rank() const { return shape().size(); }
    std::size_t numel() const;
    std::size_t rows() const;
    std::size_t cols() const;

    std::span<const real> data() const;
    real operator[](std::size_t i) const { return data()[i]; }
    real at(std::size_t r, std::size_t c) const;
    real item() const;

    bool requires_grad() const;
    bool has_grad() const;
    std::span<const real> grad() const;

    const std::shared_ptr<detail::Node>& node() const { return node_; }
    explicit Tensor(std::shared_ptr<detail::Node> node);

private:
    std::shared_ptr<detail::Node> node_;
};

/// A named learnable tensor. Handles are cheap to copy and share the same
/// value and gradient buffers.
class Parameter {
public:
    Parameter() = default;
    Parameter(std::string name, Shape shape);

    const std::string& name() const { return *name_; }
    const Shape& shape() const;
    Tensor tensor() const { return Tensor(node_); }

    std::span<real> value();
    std::span<const real> value() const;
    std::span<real> gradient();
    std::span<const real> gradient() const;

    void zero_grad();

private:
    std::shared_ptr<std::string> name_;
    std::shared_ptr<detail::Node> node_;
};

/// Reverse-mode sweep from a scalar loss. Parameter gradients accumulate
/// across calls until zero_grad().
void backward(const Tensor& loss);

}  // namespace appt
