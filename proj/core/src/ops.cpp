#include "appt/ops.hpp"

#include "appt/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace appt {
namespace {

using detail::Node;

Tensor record(Shape shape, std::vector<real> value, std::initializer_list<const Tensor*> inputs,
              std::function<void(Node&)> backward_fn) {
    auto node = std::make_shared<Node>();
    node->shape = std::move(shape);
    node->value = std::move(value);
    const bool needs = std::any_of(inputs.begin(), inputs.end(),
                                   [](const Tensor* t) { return t->requires_grad(); });
    if (needs) {
        node->requires_grad = true;
        for (const Tensor* t : inputs) node->inputs.push_back(t->node());
        node->backward = std::move(backward_fn);
    }
    return Tensor(std::move(node));
}

Tensor record_many(Shape shape, std::vector<real> value, std::span<const Tensor> inputs,
                   std::function<void(Node&)> backward_fn) {
    auto node = std::make_shared<Node>();
    node->shape = std::move(shape);
    node->value = std::move(value);
    const bool needs = std::any_of(inputs.begin(), inputs.end(),
                                   [](const Tensor& t) { return t.requires_grad(); });
    if (needs) {
        node->requires_grad = true;
        for (const Tensor& t : inputs) node->inputs.push_back(t.node());
        node->backward = std::move(backward_fn);
    }
    return Tensor(std::move(node));
}

// Gradient sink of input i, or nullptr when that input is a constant.
real* sink(Node& self, std::size_t i) {
    Node& in = *self.inputs[i];
    return in.requires_grad ? in.grad_buffer().data() : nullptr;
}

void require_matrix(const Tensor& t, const char* op) {
    if (t.rank() != 2) {
        throw DimensionError(std::string(op) + " expects a matrix, got " + to_string(t.shape()));
    }
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
    if (a.shape() != b.shape()) {
        throw DimensionError(std::string(op) + ": shape mismatch " + to_string(a.shape()) + " vs " +
                             to_string(b.shape()));
    }
}

template <typename Forward, typename Derivative>
Tensor unary(const Tensor& x, Forward f, Derivative df) {
    std::vector<real> out(x.numel());
    const auto in = x.data();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = f(in[i]);
    return record(x.shape(), std::move(out), {&x}, [df](Node& self) {
        if (real* g = sink(self, 0)) {
            const auto& xin = self.inputs[0]->value;
            for (std::size_t i = 0; i < self.grad.size(); ++i) {
                g[i] += self.grad[i] * df(xin[i], self.value[i]);
            }
        }
    });
}

}  // namespace

Tensor matmul(const Tensor& a, const Tensor& b) {
    require_matrix(a, "matmul");
    require_matrix(b, "matmul");
    const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
    if (b.rows() != k) {
        throw DimensionError("matmul: inner extents differ, " + to_string(a.shape()) + " · " +
                             to_string(b.shape()));
    }
    std::vector<real> out(m * n, real{0});
    const real* A = a.data().data();
    const real* B = b.data().data();
    for (std::size_t i = 0; i < m; ++i) {
        real* c = &out[i * n];
        for (std::size_t p = 0; p < k; ++p) {
            const real av = A[i * k + p];
            if (av == real{0}) continue;
            const real* brow = &B[p * n];
            for (std::size_t j = 0; j < n; ++j) c[j] += av * brow[j];
        }
    }
    return record({m, n}, std::move(out), {&a, &b}, [m, k, n](Node& self) {
        const real* dC = self.grad.data();
        const real* A = self.inputs[0]->value.data();
        const real* B = self.inputs[1]->value.data();
        if (real* dA = sink(self, 0)) {
            // dA[i,:] += sum_j dC[i,j] * B[:,j], with B transposed for contiguous rows.
            std::vector<real> bt(k * n);
            for (std::size_t p = 0; p < k; ++p)
                for (std::size_t j = 0; j < n; ++j) bt[j * k + p] = B[p * n + j];
            for (std::size_t i = 0; i < m; ++i) {
                real* arow = &dA[i * k];
                for (std::size_t j = 0; j < n; ++j) {
                    const real dc = dC[i * n + j];
                    if (dc == real{0}) continue;
                    const real* brow = &bt[j * k];
                    for (std::size_t p = 0; p < k; ++p) arow[p] += dc * brow[p];
                }
            }
        }
        if (real* dB = sink(self, 1)) {
            for (std::size_t i = 0; i < m; ++i) {
                for (std::size_t p = 0; p < k; ++p) {
                    const real av = A[i * k + p];
                    if (av == real{0}) continue;
                    for (std::size_t j = 0; j < n; ++j) dB[p * n + j] += av * dC[i * n + j];
                }
            }
        }
    });
}

Tensor transpose(const Tensor& a) {
    require_matrix(a, "transpose");
    const std::size_t m = a.rows(), n = a.cols();
    std::vector<real> out(m * n);
    const auto in = a.data();
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) out[j * m + i] = in[i * n + j];
    return record({n, m}, std::move(out), {&a}, [m, n](Node& self) {
        if (real* g = sink(self, 0)) {
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t j = 0; j < n; ++j) g[i * n + j] += self.grad[j * m + i];
        }
    });
}

Tensor add(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "add");
    std::vector<real> out(a.numel());
    const real* pa = a.data().data();
    const real* pb = b.data().data();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = pa[i] + pb[i];
    return record(a.shape(), std::move(out), {&a, &b}, [](Node& self) {
        for (std::size_t s = 0; s < 2; ++s) {
            if (real* g = sink(self, s))
                for (std::size_t i = 0; i < self.grad.size(); ++i) g[i] += self.grad[i];
        }
    });
}

Tensor sub(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "sub");
    std::vector<real> out(a.numel());
    const real* pa = a.data().data();
    const real* pb = b.data().data();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = pa[i] - pb[i];
    return record(a.shape(), std::move(out), {&a, &b}, [](Node& self) {
        if (real* g = sink(self, 0))
            for (std::size_t i = 0; i < self.grad.size(); ++i) g[i] += self.grad[i];
        if (real* g = sink(self, 1))
            for (std::size_t i = 0; i < self.grad.size(); ++i) g[i] -= self.grad[i];
    });
}

Tensor hadamard(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "hadamard");
    std::vector<real> out(a.numel());
    const real* pa = a.data().data();
    const real* pb = b.data().data();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = pa[i] * pb[i];
    return record(a.shape(), std::move(out), {&a, &b}, [](Node& self) {
        const auto& av = self.inputs[0]->value;
        const auto& bv = self.inputs[1]->value;
        if (real* g = sink(self, 0))
            for (std::size_t i = 0; i < self.grad.size(); ++i) g[i] += self.grad[i] * bv[i];
        if (real* g = sink(self, 1))
            for (std::size_t i = 0; i < self.grad.size(); ++i) g[i] += self.grad[i] * av[i];
    });
}

Tensor scale(const Tensor& a, real factor) {
    return unary(a, [factor](real x) { return x * factor; },
                 [factor](real, real) { return factor; });
}

Tensor add_scalar(const Tensor& a, real value) {
    return unary(a, [value](real x) { return x + value; }, [](real, real) { return real{1}; });
}

Tensor add_bias(const Tensor& x, const Tensor& bias) {
    require_matrix(x, "add_bias");
    const std::size_t m = x.rows(), n = x.cols();
    if (bias.numel() != n) {
        throw DimensionError("add_bias: bias " + to_string(bias.shape()) + " does not fit " +
                             to_string(x.shape()));
    }
    std::vector<real> out(m * n);
    const real* px = x.data().data();
    const real* pb = bias.data().data();
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) out[i * n + j] = px[i * n + j] + pb[j];
    return record(x.shape(), std::move(out), {&x, &bias}, [m, n](Node& self) {
        if (real* g = sink(self, 0))
            for (std::size_t i = 0; i < m * n; ++i) g[i] += self.grad[i];
        if (real* g = sink(self, 1))
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t j = 0; j < n; ++j) g[j] += self.grad[i * n + j];
    });
}

Tensor relu(const Tensor& x) {
    return unary(x, [](real v) { return v > 0 ? v : real{0}; },
                 [](real v, real) { return v > 0 ? real{1} : real{0}; });
}

Tensor tanh(const Tensor& x) {
    return unary(x, [](real v) { return std::tanh(v); },
                 [](real, real y) { return real{1} - y * y; });
}

Tensor sigmoid(const Tensor& x) {
    return unary(x,
                 [](real v) {
                     // Split by sign so exp never overflows.
                     if (v >= 0) return real{1} / (real{1} + std::exp(-v));
                     const real e = std::exp(v);
                     return e / (real{1} + e);
                 },
                 [](real, real y) { return y * (real{1} - y); });
}

Tensor log(const Tensor& x) {
    return unary(x, [](real v) { return std::log(v); }, [](real v, real) { return real{1} / v; });
}

Tensor clamp(const Tensor& x, real lo, real hi) {
    return unary(x, [lo, hi](real v) { return std::clamp(v, lo, hi); },
                 [lo, hi](real v, real) { return (v >= lo && v <= hi) ? real{1} : real{0}; });
}

Tensor softmax(const Tensor& x, std::size_t axis) {
    const Shape& shape = x.shape();
    if (axis >= shape.size()) {
        throw DimensionError("softmax: axis " + std::to_string(axis) + " invalid for " +
                             to_string(shape));
    }
    const std::size_t len = shape[axis];
    if (len == 0) throw DomainError("softmax over an empty slice");
    std::size_t outer = 1, inner = 1;
    for (std::size_t i = 0; i < axis; ++i) outer *= shape[i];
    for (std::size_t i = axis + 1; i < shape.size(); ++i) inner *= shape[i];

    const auto in = x.data();
    std::vector<real> out(in.size());
    for (std::size_t o = 0; o < outer; ++o) {
        for (std::size_t q = 0; q < inner; ++q) {
            const std::size_t base = o * len * inner + q;
            real mx = -std::numeric_limits<real>::infinity();
            for (std::size_t a = 0; a < len; ++a) mx = std::max(mx, in[base + a * inner]);
            real total = 0;
            for (std::size_t a = 0; a < len; ++a) {
                const real e = std::exp(in[base + a * inner] - mx);
                out[base + a * inner] = e;
                total += e;
            }
            for (std::size_t a = 0; a < len; ++a) out[base + a * inner] /= total;
        }
    }
    return record(shape, std::move(out), {&x}, [outer, inner, len](Node& self) {
        real* g = sink(self, 0);
        if (!g) return;
        const auto& y = self.value;
        const auto& dy = self.grad;
        for (std::size_t o = 0; o < outer; ++o) {
            for (std::size_t q = 0; q < inner; ++q) {
                const std::size_t base = o * len * inner + q;
                real dot = 0;
                for (std::size_t a = 0; a < len; ++a) dot += dy[base + a * inner] * y[base + a * inner];
                for (std::size_t a = 0; a < len; ++a) {
                    const std::size_t i = base + a * inner;
                    g[i] += y[i] * (dy[i] - dot);
                }
            }
        }
    });
}

Tensor layer_norm(const Tensor& x, const Tensor& gamma, const Tensor& beta, real eps) {
    if (x.rank() == 0) throw DimensionError("layer_norm on a scalar");
    const std::size_t n = x.shape().back();
    if (gamma.numel() != n || beta.numel() != n) {
        throw DimensionError("layer_norm: scale/shift " + to_string(gamma.shape()) + "/" +
                             to_string(beta.shape()) + " do not fit " + to_string(x.shape()));
    }
    if (n == 0) throw DomainError("layer_norm over an empty axis");
    const std::size_t rows = x.numel() / n;
    const auto in = x.data();
    std::vector<real> out(in.size());
    std::vector<real> xhat(in.size());
    std::vector<real> inv_std(rows);
    for (std::size_t r = 0; r < rows; ++r) {
        const real* v = &in[r * n];
        real mean = 0;
        for (std::size_t j = 0; j < n; ++j) mean += v[j];
        mean /= static_cast<real>(n);
        real var = 0;
        for (std::size_t j = 0; j < n; ++j) var += (v[j] - mean) * (v[j] - mean);
        var /= static_cast<real>(n);
        inv_std[r] = real{1} / std::sqrt(var + eps);
        for (std::size_t j = 0; j < n; ++j) {
            xhat[r * n + j] = (v[j] - mean) * inv_std[r];
            out[r * n + j] = xhat[r * n + j] * gamma[j] + beta[j];
        }
    }
    return record(x.shape(), std::move(out), {&x, &gamma, &beta},
                  [rows, n, xhat = std::move(xhat), inv_std = std::move(inv_std)](Node& self) {
                      const auto& dy = self.grad;
                      const auto& gam = self.inputs[1]->value;
                      if (real* g = sink(self, 0)) {
                          const real inv_n = real{1} / static_cast<real>(n);
                          for (std::size_t r = 0; r < rows; ++r) {
                              real sum_d = 0, sum_dx = 0;
                              for (std::size_t j = 0; j < n; ++j) {
                                  const real d = dy[r * n + j] * gam[j];
                                  sum_d += d;
                                  sum_dx += d * xhat[r * n + j];
                              }
                              for (std::size_t j = 0; j < n; ++j) {
                                  const real d = dy[r * n + j] * gam[j];
                                  g[r * n + j] += inv_std[r] * inv_n *
                                                  (static_cast<real>(n) * d - sum_d - xhat[r * n + j] * sum_dx);
                              }
                          }
                      }
                      if (real* g = sink(self, 1))
                          for (std::size_t r = 0; r < rows; ++r)
                              for (std::size_t j = 0; j < n; ++j) g[j] += dy[r * n + j] * xhat[r * n + j];
                      if (real* g = sink(self, 2))
                          for (std::size_t r = 0; r < rows; ++r)
                              for (std::size_t j = 0; j < n; ++j) g[j] += dy[r * n + j];
                  });
}

Tensor dropout(const Tensor& x, real rate, Mode mode, Rng& rng) {
    if (!(rate >= 0) || rate >= 1) {
        throw ConfigError("dropout rate must lie in [0, 1), got " + std::to_string(rate));
    }
    if (mode == Mode::eval || rate == 0) return x;
    std::bernoulli_distribution keep(1.0 - static_cast<double>(rate));
    const real factor = real{1} / (real{1} - rate);
    std::vector<real> mask(x.numel());
    std::vector<real> out(x.numel());
    const real* px = x.data().data();
    for (std::size_t i = 0; i < mask.size(); ++i) {
        mask[i] = keep(rng) ? factor : real{0};
        out[i] = px[i] * mask[i];
    }
    return record(x.shape(), std::move(out), {&x}, [mask = std::move(mask)](Node& self) {
        if (real* g = sink(self, 0))
            for (std::size_t i = 0; i < mask.size(); ++i) g[i] += self.grad[i] * mask[i];
    });
}

Tensor sum(const Tensor& x) {
    real total = 0;
    for (real v : x.data()) total += v;
    return record(Shape{}, {total}, {&x}, [](Node& self) {
        if (real* g = sink(self, 0)) {
            const real d = self.grad[0];
            for (std::size_t i = 0; i < self.inputs[0]->value.size(); ++i) g[i] += d;
        }
    });
}

Tensor concat_cols(std::span<const Tensor> parts) {
    if (parts.empty()) throw DimensionError("concat_cols of nothing");
    const std::size_t m = parts[0].rows();
    std::vector<std::size_t> widths;
    std::size_t total = 0;
    for (const auto& p : parts) {
        if (p.rows() != m) {
            throw DimensionError("concat_cols: row counts differ, " + to_string(parts[0].shape()) +
                                 " vs " + to_string(p.shape()));
        }
        widths.push_back(p.cols());
        total += p.cols();
    }
    std::vector<real> out(m * total);
    std::size_t offset = 0;
    for (std::size_t k = 0; k < parts.size(); ++k) {
        const auto in = parts[k].data();
        for (std::size_t i = 0; i < m; ++i)
            std::copy_n(&in[i * widths[k]], widths[k], &out[i * total + offset]);
        offset += widths[k];
    }
    return record_many({m, total}, std::move(out), parts, [m, total, widths](Node& self) {
        std::size_t off = 0;
        for (std::size_t k = 0; k < widths.size(); ++k) {
            if (real* g = sink(self, k))
                for (std::size_t i = 0; i < m; ++i)
                    for (std::size_t j = 0; j < widths[k]; ++j)
                        g[i * widths[k] + j] += self.grad[i * total + off + j];
            off += widths[k];
        }
    });
}

Tensor concat_rows(std::span<const Tensor> parts) {
    if (parts.empty()) throw DimensionError("concat_rows of nothing");
    const std::size_t n = parts[0].cols();
    std::size_t m = 0;
    std::vector<real> out;
    std::vector<std::size_t> sizes;
    for (const auto& p : parts) {
        if (p.cols() != n) {
            throw DimensionError("concat_rows: column counts differ, " + to_string(parts[0].shape()) +
                                 " vs " + to_string(p.shape()));
        }
        m += p.rows();
        sizes.push_back(p.numel());
        out.insert(out.end(), p.data().begin(), p.data().end());
    }
    return record_many({m, n}, std::move(out), parts, [sizes](Node& self) {
        std::size_t off = 0;
        for (std::size_t k = 0; k < sizes.size(); ++k) {
            if (real* g = sink(self, k))
                for (std::size_t i = 0; i < sizes[k]; ++i) g[i] += self.grad[off + i];
            off += sizes[k];
        }
    });
}

Tensor slice_cols(const Tensor& x, std::size_t begin, std::size_t count) {
    require_matrix(x, "slice_cols");
    const std::size_t m = x.rows(), n = x.cols();
    if (begin + count > n) {
        throw DimensionError("slice_cols [" + std::to_string(begin) + ", " +
                             std::to_string(begin + count) + ") out of " + to_string(x.shape()));
    }
    std::vector<real> out(m * count);
    const real* px = x.data().data();
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < count; ++j) out[i * count + j] = px[i * n + begin + j];
    return record({m, count}, std::move(out), {&x}, [m, n, begin, count](Node& self) {
        if (real* g = sink(self, 0))
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t j = 0; j < count; ++j) g[i * n + begin + j] += self.grad[i * count + j];
    });
}

Tensor slice_rows(const Tensor& x, std::size_t begin, std::size_t count) {
    require_matrix(x, "slice_rows");
    const std::size_t m = x.rows(), n = x.cols();
    if (begin + count > m) {
        throw DimensionError("slice_rows [" + std::to_string(begin) + ", " +
                             std::to_string(begin + count) + ") out of " + to_string(x.shape()));
    }
    const auto in = x.data();
    std::vector<real> out(in.begin() + begin * n, in.begin() + (begin + count) * n);
    return record({count, n}, std::move(out), {&x}, [n, begin](Node& self) {
        if (real* g = sink(self, 0))
            for (std::size_t i = 0; i < self.grad.size(); ++i) g[begin * n + i] += self.grad[i];
    });
}

Tensor row(const Tensor& x, std::size_t r) { return slice_rows(x, r, 1); }

Tensor gather_rows(const Tensor& table, std::span<const std::int32_t> ids) {
    require_matrix(table, "gather_rows");
    const std::size_t vocab = table.rows(), d = table.cols();
    std::vector<real> out(ids.size() * d);
    const auto in = table.data();
    for (std::size_t t = 0; t < ids.size(); ++t) {
        if (ids[t] < 0 || static_cast<std::size_t>(ids[t]) >= vocab) {
            throw DataError("token id " + std::to_string(ids[t]) + " outside table of " +
                            std::to_string(vocab) + " rows");
        }
        std::copy_n(&in[static_cast<std::size_t>(ids[t]) * d], d, &out[t * d]);
    }
    std::vector<std::int32_t> idx(ids.begin(), ids.end());
    return record({ids.size(), d}, std::move(out), {&table}, [d, idx = std::move(idx)](Node& self) {
        if (real* g = sink(self, 0))
            for (std::size_t t = 0; t < idx.size(); ++t)
                for (std::size_t j = 0; j < d; ++j)
                    g[static_cast<std::size_t>(idx[t]) * d + j] += self.grad[t * d + j];
    });
}

}  // namespace appt
