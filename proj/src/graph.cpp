#include "mlad/graph.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "mlad/error.hpp"
#include "mlad/kernels.hpp"
#include "mlad/linalg.hpp"

namespace mlad::ad {

namespace {

NodePtr op_node(Tensor value, std::vector<NodePtr> parents, std::function<void(Node&)> bp) {
    auto n = std::make_shared<Node>(std::move(value));
    for (const auto& p : parents) n->live = n->live || p->live;
    n->parents = std::move(parents);
    if (n->live) n->backprop = std::move(bp);
    return n;
}

bool is_scalar(const Tensor& t) { return t.numel() == 1; }

void require_matrix(const Tensor& t, const char* op) {
    if (t.rank() != 2)
        throw DimensionError(std::string(op) + ": expected rank-2 tensor, got " +
                             t.shape_string());
}

// Accumulate g into t, summing when t is a broadcast scalar.
void accumulate(Tensor& t, const Tensor& g) {
    if (t.numel() == g.numel()) {
        kern::active().axpy(1.0, g.raw(), t.raw(), t.numel());
    } else {
        t.data()[0] += kern::active().sum(g.raw(), g.numel());
    }
}

template <class Fwd, class Bwd>
NodePtr binary_elementwise(const char* opname, const NodePtr& a, const NodePtr& b, Fwd fwd,
                           Bwd bwd) {
    const bool sa = is_scalar(a->value);
    const bool sb = is_scalar(b->value);
    if (!sa && !sb && !a->value.same_shape(b->value))
        throw DimensionError(std::string(opname) + ": incompatible shapes " +
                             a->value.shape_string() + " and " + b->value.shape_string());
    const Tensor& big = sa ? b->value : a->value;
    const std::size_t n = big.numel();
    std::vector<double> out(n);
    const auto va = a->value.data();
    const auto vb = b->value.data();
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = fwd(va[sa ? 0 : i], vb[sb ? 0 : i]);
    }
    Tensor value = Tensor::from(big.shape(), std::move(out));
    return op_node(std::move(value), {a, b}, [sa, sb, bwd](Node& self) {
        Node& pa = *self.parents[0];
        Node& pb = *self.parents[1];
        const std::size_t n2 = self.value.numel();
        Tensor ga = Tensor::zeros(self.value.shape());
        Tensor gb = Tensor::zeros(self.value.shape());
        const auto va = pa.value.data();
        const auto vb = pb.value.data();
        const auto g = self.grad.data();
        for (std::size_t i = 0; i < n2; ++i) {
            double da, db;
            bwd(va[sa ? 0 : i], vb[sb ? 0 : i], da, db);
            ga.data()[i] = g[i] * da;
            gb.data()[i] = g[i] * db;
        }
        if (pa.live) accumulate(pa.grad, ga);
        if (pb.live) accumulate(pb.grad, gb);
    });
}

template <class Fwd, class Deriv>
NodePtr unary_elementwise(const NodePtr& a, Fwd fwd, Deriv deriv) {
    const std::size_t n = a->value.numel();
    std::vector<double> out(n);
    const auto va = a->value.data();
    for (std::size_t i = 0; i < n; ++i) out[i] = fwd(va[i]);
    Tensor value = Tensor::from(a->value.shape(), std::move(out));
    return op_node(std::move(value), {a}, [deriv](Node& self) {
        Node& pa = *self.parents[0];
        if (!pa.live) return;
        const std::size_t n2 = self.value.numel();
        const auto va = pa.value.data();
        const auto g = self.grad.data();
        auto out = pa.grad.data();
        for (std::size_t i = 0; i < n2; ++i) out[i] += g[i] * deriv(va[i]);
    });
}

} // namespace

NodePtr leaf(Tensor v, std::string name) {
    auto n = std::make_shared<Node>(std::move(v));
    n->live = true;
    n->name = std::move(name);
    return n;
}

NodePtr constant(Tensor v) { return std::make_shared<Node>(std::move(v)); }

void backward(const NodePtr& root) {
    if (root->value.numel() != 1 || root->value.rank() > 1)
        throw ContractError("backward: root must be scalar-shaped [] or [1], got " +
                            root->value.shape_string());
    // Iterative post-order DFS over live nodes.
    std::vector<Node*> order;
    std::unordered_set<Node*> seen;
    std::vector<std::pair<Node*, std::size_t>> stack;
    if (root->live) stack.emplace_back(root.get(), 0);
    seen.insert(root.get());
    while (!stack.empty()) {
        auto& [node, idx] = stack.back();
        if (idx < node->parents.size()) {
            Node* next = node->parents[idx++].get();
            if (next->live && seen.insert(next).second) stack.emplace_back(next, 0);
        } else {
            order.push_back(node);
            stack.pop_back();
        }
    }
    // Interior gradients are per-pass workspace; only leaf gradients carry
    // accumulation across repeated calls.
    for (Node* node : order) {
        if (!node->parents.empty()) {
            std::fill(node->grad.data().begin(), node->grad.data().end(), 0.0);
        }
    }
    root->grad.data()[0] += 1.0;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        if ((*it)->backprop) (*it)->backprop(**it);
    }
}

void zero_grad(const std::vector<NodePtr>& params) {
    for (const auto& p : params) {
        std::fill(p->grad.data().begin(), p->grad.data().end(), 0.0);
    }
}

NodePtr matmul(const NodePtr& a, const NodePtr& b) {
    require_matrix(a->value, "matmul");
    require_matrix(b->value, "matmul");
    const int m = a->value.rows();
    const int k = a->value.cols();
    const int n = b->value.cols();
    if (b->value.rows() != k)
        throw DimensionError("matmul: inner dimensions differ, " + a->value.shape_string() +
                             " vs " + b->value.shape_string());
    Tensor value = Tensor::zeros({m, n});
    mm_nn(a->value.raw(), b->value.raw(), value.raw(), m, k, n);
    value.check_finite("matmul");
    return op_node(std::move(value), {a, b}, [m, k, n](Node& self) {
        Node& pa = *self.parents[0];
        Node& pb = *self.parents[1];
        if (pa.live) mm_nt(self.grad.raw(), pb.value.raw(), pa.grad.raw(), m, n, k);
        if (pb.live) mm_tn(pa.value.raw(), self.grad.raw(), pb.grad.raw(), k, m, n);
    });
}

NodePtr transpose(const NodePtr& a) {
    require_matrix(a->value, "transpose");
    const int m = a->value.rows();
    const int n = a->value.cols();
    Tensor value = Tensor::zeros({n, m});
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < n; ++j) value.at(j, i) = a->value.at(i, j);
    }
    return op_node(std::move(value), {a}, [m, n](Node& self) {
        Node& pa = *self.parents[0];
        if (!pa.live) return;
        for (int i = 0; i < m; ++i) {
            for (int j = 0; j < n; ++j) pa.grad.at(i, j) += self.grad.at(j, i);
        }
    });
}

NodePtr add(const NodePtr& a, const NodePtr& b) {
    return binary_elementwise(
        "add", a, b, [](double x, double y) { return x + y; },
        [](double, double, double& da, double& db) {
            da = 1.0;
            db = 1.0;
        });
}

NodePtr sub(const NodePtr& a, const NodePtr& b) {
    return binary_elementwise(
        "sub", a, b, [](double x, double y) { return x - y; },
        [](double, double, double& da, double& db) {
            da = 1.0;
            db = -1.0;
        });
}

NodePtr mul(const NodePtr& a, const NodePtr& b) {
    return binary_elementwise(
        "mul", a, b, [](double x, double y) { return x * y; },
        [](double x, double y, double& da, double& db) {
            da = y;
            db = x;
        });
}

NodePtr div(const NodePtr& a, const NodePtr& b) {
    for (double v : b->value.data()) {
        if (v == 0.0) throw NumericError("div: zero denominator");
    }
    return binary_elementwise(
        "div", a, b, [](double x, double y) { return x / y; },
        [](double x, double y, double& da, double& db) {
            da = 1.0 / y;
            db = -x / (y * y);
        });
}

NodePtr exp_(const NodePtr& a) {
    return unary_elementwise(a, [](double x) { return std::exp(x); },
                             [](double x) { return std::exp(x); });
}

NodePtr log_(const NodePtr& a) {
    for (double v : a->value.data()) {
        if (v <= 0.0)
            throw NumericError("log: non-positive input " + std::to_string(v));
    }
    return unary_elementwise(a, [](double x) { return std::log(x); },
                             [](double x) { return 1.0 / x; });
}

NodePtr sqrt_(const NodePtr& a) {
    for (double v : a->value.data()) {
        if (v < 0.0) throw NumericError("sqrt: negative input " + std::to_string(v));
    }
    return unary_elementwise(a, [](double x) { return std::sqrt(x); },
                             [](double x) { return 0.5 / std::sqrt(x); });
}

NodePtr neg(const NodePtr& a) {
    return unary_elementwise(a, [](double x) { return -x; }, [](double) { return -1.0; });
}

NodePtr scale(const NodePtr& a, double c) {
    return unary_elementwise(a, [c](double x) { return c * x; }, [c](double) { return c; });
}

NodePtr add_const(const NodePtr& a, double c) {
    return unary_elementwise(a, [c](double x) { return x + c; }, [](double) { return 1.0; });
}

NodePtr sum(const NodePtr& a) {
    Tensor value = Tensor::scalar(kern::active().sum(a->value.raw(), a->value.numel()));
    return op_node(std::move(value), {a}, [](Node& self) {
        Node& pa = *self.parents[0];
        if (!pa.live) return;
        const double g = self.grad.data()[0];
        for (double& v : pa.grad.data()) v += g;
    });
}

NodePtr row_sum(const NodePtr& a) {
    require_matrix(a->value, "row_sum");
    const int m = a->value.rows();
    const int n = a->value.cols();
    Tensor value = Tensor::zeros({m, 1});
    for (int i = 0; i < m; ++i) {
        value.data()[i] = kern::active().sum(a->value.row(i).data(), static_cast<std::size_t>(n));
    }
    return op_node(std::move(value), {a}, [m, n](Node& self) {
        Node& pa = *self.parents[0];
        if (!pa.live) return;
        for (int i = 0; i < m; ++i) {
            const double g = self.grad.data()[i];
            auto row = pa.grad.row(i);
            for (int j = 0; j < n; ++j) row[j] += g;
        }
    });
}

NodePtr col_sum(const NodePtr& a) {
    require_matrix(a->value, "col_sum");
    const int m = a->value.rows();
    const int n = a->value.cols();
    Tensor value = Tensor::zeros({1, n});
    for (int i = 0; i < m; ++i) {
        kern::active().axpy(1.0, a->value.row(i).data(), value.raw(), static_cast<std::size_t>(n));
    }
    return op_node(std::move(value), {a}, [m, n](Node& self) {
        Node& pa = *self.parents[0];
        if (!pa.live) return;
        for (int i = 0; i < m; ++i) {
            kern::active().axpy(1.0, self.grad.raw(), pa.grad.row(i).data(),
                                static_cast<std::size_t>(n));
        }
    });
}

NodePtr mean_over_rows(const NodePtr& a) {
    require_matrix(a->value, "mean_over_rows");
    return scale(col_sum(a), 1.0 / a->value.rows());
}

NodePtr add_rowvec(const NodePtr& a, const NodePtr& v) {
    require_matrix(a->value, "add_rowvec");
    require_matrix(v->value, "add_rowvec");
    const int m = a->value.rows();
    const int n = a->value.cols();
    if (v->value.rows() != 1 || v->value.cols() != n)
        throw DimensionError("add_rowvec: vector shape " + v->value.shape_string() +
                             " does not broadcast over " + a->value.shape_string());
    Tensor value = a->value;
    for (int i = 0; i < m; ++i) {
        kern::active().add(value.row(i).data(), v->value.raw(), value.row(i).data(),
                           static_cast<std::size_t>(n));
    }
    value.check_finite("add_rowvec");
    return op_node(std::move(value), {a, v}, [m, n](Node& self) {
        Node& pa = *self.parents[0];
        Node& pv = *self.parents[1];
        if (pa.live) {
            kern::active().axpy(1.0, self.grad.raw(), pa.grad.raw(), self.grad.numel());
        }
        if (pv.live) {
            for (int i = 0; i < m; ++i) {
                kern::active().axpy(1.0, self.grad.row(i).data(), pv.grad.raw(),
                                    static_cast<std::size_t>(n));
            }
        }
    });
}

NodePtr scale_rows(const NodePtr& a, const NodePtr& s) {
    require_matrix(a->value, "scale_rows");
    const int m = a->value.rows();
    const int n = a->value.cols();
    if (s->value.numel() != static_cast<std::size_t>(m))
        throw DimensionError("scale_rows: scale shape " + s->value.shape_string() +
                             " does not match rows of " + a->value.shape_string());
    Tensor value = Tensor::zeros({m, n});
    for (int i = 0; i < m; ++i) {
        kern::active().scale(a->value.row(i).data(), s->value.data()[i], value.row(i).data(),
                             static_cast<std::size_t>(n));
    }
    value.check_finite("scale_rows");
    return op_node(std::move(value), {a, s}, [m, n](Node& self) {
        Node& pa = *self.parents[0];
        Node& ps = *self.parents[1];
        for (int i = 0; i < m; ++i) {
            if (pa.live) {
                kern::active().axpy(ps.value.data()[i], self.grad.row(i).data(),
                                    pa.grad.row(i).data(), static_cast<std::size_t>(n));
            }
            if (ps.live) {
                ps.grad.data()[i] += kern::active().dot(self.grad.row(i).data(),
                                                        pa.value.row(i).data(),
                                                        static_cast<std::size_t>(n));
            }
        }
    });
}

NodePtr slice_cols(const NodePtr& a, int c0, int c1) {
    require_matrix(a->value, "slice_cols");
    const int m = a->value.rows();
    const int n = a->value.cols();
    if (c0 < 0 || c1 <= c0 || c1 > n)
        throw DimensionError("slice_cols: range [" + std::to_string(c0) + "," +
                             std::to_string(c1) + ") out of bounds for " +
                             a->value.shape_string());
    const int w = c1 - c0;
    Tensor value = Tensor::zeros({m, w});
    for (int i = 0; i < m; ++i) {
        const auto src = a->value.row(i);
        std::copy(src.begin() + c0, src.begin() + c1, value.row(i).begin());
    }
    return op_node(std::move(value), {a}, [m, c0, w](Node& self) {
        Node& pa = *self.parents[0];
        if (!pa.live) return;
        for (int i = 0; i < m; ++i) {
            kern::active().axpy(1.0, self.grad.row(i).data(), pa.grad.row(i).data() + c0,
                                static_cast<std::size_t>(w));
        }
    });
}

NodePtr concat_cols(const std::vector<NodePtr>& parts) {
    if (parts.empty()) throw ContractError("concat_cols: empty input");
    const int m = parts[0]->value.rows();
    int total = 0;
    for (const auto& p : parts) {
        require_matrix(p->value, "concat_cols");
        if (p->value.rows() != m)
            throw DimensionError("concat_cols: row count mismatch");
        total += p->value.cols();
    }
    Tensor value = Tensor::zeros({m, total});
    int off = 0;
    for (const auto& p : parts) {
        const int w = p->value.cols();
        for (int i = 0; i < m; ++i) {
            std::copy(p->value.row(i).begin(), p->value.row(i).end(),
                      value.row(i).begin() + off);
        }
        off += w;
    }
    return op_node(std::move(value), parts, [m](Node& self) {
        int off2 = 0;
        for (auto& parent : self.parents) {
            const int w = parent->value.cols();
            if (parent->live) {
                for (int i = 0; i < m; ++i) {
                    kern::active().axpy(1.0, self.grad.row(i).data() + off2,
                                        parent->grad.row(i).data(), static_cast<std::size_t>(w));
                }
            }
            off2 += w;
        }
    });
}

NodePtr stack_rows(const std::vector<NodePtr>& rows) {
    if (rows.empty()) throw ContractError("stack_rows: empty input");
    const std::size_t n = rows[0]->value.numel();
    for (const auto& r : rows) {
        if (r->value.numel() != n)
            throw DimensionError("stack_rows: element size mismatch");
    }
    const int m = static_cast<int>(rows.size());
    Tensor value = Tensor::zeros({m, static_cast<int>(n)});
    for (int i = 0; i < m; ++i) {
        std::copy(rows[static_cast<std::size_t>(i)]->value.data().begin(),
                  rows[static_cast<std::size_t>(i)]->value.data().end(), value.row(i).begin());
    }
    return op_node(std::move(value), rows, [n](Node& self) {
        for (std::size_t i = 0; i < self.parents.size(); ++i) {
            Node& p = *self.parents[i];
            if (!p.live) continue;
            kern::active().axpy(1.0, self.grad.raw() + i * n, p.grad.raw(), n);
        }
    });
}

NodePtr layer_norm(const NodePtr& x, const NodePtr& gain, const NodePtr& bias, double eps) {
    require_matrix(x->value, "layer_norm");
    const int m = x->value.rows();
    const int n = x->value.cols();
    if (gain->value.numel() != static_cast<std::size_t>(n) ||
        bias->value.numel() != static_cast<std::size_t>(n))
        throw DimensionError("layer_norm: gain/bias must have " + std::to_string(n) +
                             " entries");
    Tensor value = Tensor::zeros({m, n});
    auto xhat = std::make_shared<Tensor>(Tensor::zeros({m, n}));
    auto inv_std = std::make_shared<std::vector<double>>(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
        const auto row = x->value.row(i);
        double mean = kern::active().sum(row.data(), row.size()) / n;
        double var = 0.0;
        for (double v : row) var += (v - mean) * (v - mean);
        var /= n;
        const double istd = 1.0 / std::sqrt(var + eps);
        (*inv_std)[static_cast<std::size_t>(i)] = istd;
        for (int j = 0; j < n; ++j) {
            const double xh = (row[j] - mean) * istd;
            xhat->at(i, j) = xh;
            value.at(i, j) = gain->value.data()[j] * xh + bias->value.data()[j];
        }
    }
    value.check_finite("layer_norm");
    return op_node(std::move(value), {x, gain, bias}, [m, n, xhat, inv_std](Node& self) {
        Node& px = *self.parents[0];
        Node& pg = *self.parents[1];
        Node& pb = *self.parents[2];
        for (int i = 0; i < m; ++i) {
            const auto g = self.grad.row(i);
            // dxhat = g * gain; dx via the standard normalized-row rule.
            double mean_dxhat = 0.0;
            double mean_dxhat_xhat = 0.0;
            for (int j = 0; j < n; ++j) {
                const double dxh = g[j] * pg.value.data()[j];
                mean_dxhat += dxh;
                mean_dxhat_xhat += dxh * xhat->at(i, j);
            }
            mean_dxhat /= n;
            mean_dxhat_xhat /= n;
            const double istd = (*inv_std)[static_cast<std::size_t>(i)];
            for (int j = 0; j < n; ++j) {
                const double xh = xhat->at(i, j);
                if (px.live) {
                    const double dxh = g[j] * pg.value.data()[j];
                    px.grad.at(i, j) += istd * (dxh - mean_dxhat - xh * mean_dxhat_xhat);
                }
                if (pg.live) pg.grad.data()[j] += g[j] * xh;
                if (pb.live) pb.grad.data()[j] += g[j];
            }
        }
    });
}

NodePtr celu(const NodePtr& x) {
    return unary_elementwise(
        x, [](double v) { return v >= 0.0 ? v : std::exp(v) - 1.0; },
        [](double v) { return v >= 0.0 ? 1.0 : std::exp(v); });
}

NodePtr dropout(const NodePtr& x, double p, Rng& rng, bool train) {
    if (!train || p == 0.0) return x;
    if (p < 0.0 || p >= 1.0)
        throw ContractError("dropout: rate must be in [0,1), got " + std::to_string(p));
    const std::size_t n = x->value.numel();
    auto mask = std::make_shared<std::vector<double>>(n);
    const double keep_scale = 1.0 / (1.0 - p);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        (*mask)[i] = rng.uniform() < p ? 0.0 : keep_scale;
        out[i] = x->value.data()[i] * (*mask)[i];
    }
    Tensor value = Tensor::from(x->value.shape(), std::move(out));
    return op_node(std::move(value), {x}, [mask](Node& self) {
        Node& px = *self.parents[0];
        if (!px.live) return;
        const std::size_t n2 = self.value.numel();
        for (std::size_t i = 0; i < n2; ++i) {
            px.grad.data()[i] += self.grad.data()[i] * (*mask)[i];
        }
    });
}

NodePtr entmax_rows(const NodePtr& x, const EntmaxConfig& cfg) {
    require_matrix(x->value, "entmax_rows");
    const int m = x->value.rows();
    const int n = x->value.cols();
    Tensor value = Tensor::zeros({m, n});
    for (int i = 0; i < m; ++i) {
        const auto p = entmax(x->value.row(i), cfg);
        std::copy(p.begin(), p.end(), value.row(i).begin());
    }
    const double alpha = cfg.alpha;
    return op_node(std::move(value), {x}, [m, alpha](Node& self) {
        Node& px = *self.parents[0];
        if (!px.live) return;
        for (int i = 0; i < m; ++i) {
            const auto jvp = entmax_jacobian_vp(px.value.row(i), self.value.row(i), alpha,
                                                self.grad.row(i));
            kern::active().axpy(1.0, jvp.data(), px.grad.row(i).data(), jvp.size());
        }
    });
}

NodePtr logsumexp_rows(const NodePtr& x) {
    require_matrix(x->value, "logsumexp_rows");
    const int m = x->value.rows();
    const int n = x->value.cols();
    Tensor value = Tensor::zeros({m, 1});
    for (int i = 0; i < m; ++i) {
        const auto row = x->value.row(i);
        const double mx = *std::max_element(row.begin(), row.end());
        double acc = 0.0;
        for (double v : row) acc += std::exp(v - mx);
        value.data()[i] = mx + std::log(acc);
    }
    return op_node(std::move(value), {x}, [m, n](Node& self) {
        Node& px = *self.parents[0];
        if (!px.live) return;
        for (int i = 0; i < m; ++i) {
            const double lse = self.value.data()[i];
            const double g = self.grad.data()[i];
            const auto row = px.value.row(i);
            auto grow = px.grad.row(i);
            for (int j = 0; j < n; ++j) grow[j] += g * std::exp(row[j] - lse);
        }
    });
}

NodePtr spd_solve(const NodePtr& a, const NodePtr& b) {
    require_matrix(a->value, "spd_solve");
    require_matrix(b->value, "spd_solve");
    auto lfac = std::make_shared<Tensor>(cholesky(a->value));
    Tensor value = chol_solve(*lfac, b->value);
    return op_node(std::move(value), {a, b}, [lfac](Node& self) {
        Node& pa = *self.parents[0];
        Node& pb = *self.parents[1];
        // With X = A^{-1} B and upstream G: dB = A^{-1} G, dA = -(A^{-1} G) X^T.
        Tensor s = chol_solve(*lfac, self.grad);
        if (pb.live) {
            kern::active().axpy(1.0, s.raw(), pb.grad.raw(), s.numel());
        }
        if (pa.live) {
            Tensor da = Tensor::zeros(pa.value.shape());
            mm_nt(s.raw(), self.value.raw(), da.raw(), s.rows(), s.cols(), self.value.rows());
            kern::active().axpy(-1.0, da.raw(), pa.grad.raw(), da.numel());
        }
    });
}

NodePtr logdet_spd(const NodePtr& a) {
    require_matrix(a->value, "logdet_spd");
    auto lfac = std::make_shared<Tensor>(cholesky(a->value));
    Tensor value = Tensor::scalar(chol_logdet(*lfac));
    return op_node(std::move(value), {a}, [lfac](Node& self) {
        Node& pa = *self.parents[0];
        if (!pa.live) return;
        const Tensor inv = chol_inverse(*lfac);
        kern::active().axpy(self.grad.data()[0], inv.raw(), pa.grad.raw(), inv.numel());
    });
}

NodePtr diag_part(const NodePtr& a) {
    require_matrix(a->value, "diag_part");
    if (a->value.rows() != a->value.cols())
        throw DimensionError("diag_part: expected square matrix, got " +
                             a->value.shape_string());
    const int n = a->value.rows();
    Tensor value = Tensor::zeros({1, n});
    for (int i = 0; i < n; ++i) value.data()[i] = a->value.at(i, i);
    return op_node(std::move(value), {a}, [n](Node& self) {
        Node& pa = *self.parents[0];
        if (!pa.live) return;
        for (int i = 0; i < n; ++i) pa.grad.at(i, i) += self.grad.data()[i];
    });
}

} // namespace mlad::ad
