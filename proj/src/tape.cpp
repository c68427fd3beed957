#include "nint/tape.hpp"

#include <cmath>

namespace nint::ad {

int Tape::input(Mat value) { return emit(std::move(value), nullptr); }

int Tape::emit(Mat value, std::function<void(Tape&, int)> fn) {
    Node n;
    n.value = std::move(value);
    n.grad = Mat::Zero(n.value.rows(), n.value.cols());
    n.backward_fn = std::move(fn);
    nodes_.push_back(std::move(n));
    return static_cast<int>(nodes_.size()) - 1;
}

void Tape::backward(int scalar_node) {
    if (nodes_[scalar_node].value.size() != 1)
        throw Error("ShapeMismatch", "backward seed must be a 1x1 node");
    for (auto& n : nodes_) n.grad.setZero();
    nodes_[scalar_node].grad(0, 0) = 1.0;
    for (int i = scalar_node; i >= 0; --i)
        if (nodes_[i].backward_fn) nodes_[i].backward_fn(*this, i);
}

int Tape::matmul(int a, int b) {
    if (value(a).cols() != value(b).rows()) throw Error("ShapeMismatch", "matmul");
    Mat out = value(a) * value(b);
    return emit(std::move(out), [a, b](Tape& t, int self) {
        const Mat& g = t.grad(self);
        t.grad_mut(a) += g * t.value(b).transpose();
        t.grad_mut(b) += t.value(a).transpose() * g;
    });
}

int Tape::matmul_nt(int a, int b) {
    if (value(a).cols() != value(b).cols()) throw Error("ShapeMismatch", "matmul_nt");
    Mat out = value(a) * value(b).transpose();
    return emit(std::move(out), [a, b](Tape& t, int self) {
        const Mat& g = t.grad(self);
        t.grad_mut(a) += g * t.value(b);
        t.grad_mut(b) += g.transpose() * t.value(a);
    });
}

int Tape::add(int a, int b) {
    if (value(a).rows() != value(b).rows() || value(a).cols() != value(b).cols())
        throw Error("ShapeMismatch", "add");
    Mat out = value(a) + value(b);
    return emit(std::move(out), [a, b](Tape& t, int self) {
        t.grad_mut(a) += t.grad(self);
        t.grad_mut(b) += t.grad(self);
    });
}

int Tape::add_rowvec(int a, int b) {
    if (value(b).rows() != 1 || value(a).cols() != value(b).cols())
        throw Error("ShapeMismatch", "add_rowvec");
    Mat out = value(a).rowwise() + value(b).row(0);
    return emit(std::move(out), [a, b](Tape& t, int self) {
        t.grad_mut(a) += t.grad(self);
        t.grad_mut(b).row(0) += t.grad(self).colwise().sum();
    });
}

int Tape::scale(int a, double s) {
    Mat out = value(a) * s;
    return emit(std::move(out), [a, s](Tape& t, int self) {
        t.grad_mut(a) += t.grad(self) * s;
    });
}

int Tape::mul(int a, int b) {
    if (value(a).rows() != value(b).rows() || value(a).cols() != value(b).cols())
        throw Error("ShapeMismatch", "mul");
    Mat out = value(a).cwiseProduct(value(b));
    return emit(std::move(out), [a, b](Tape& t, int self) {
        t.grad_mut(a) += t.grad(self).cwiseProduct(t.value(b));
        t.grad_mut(b) += t.grad(self).cwiseProduct(t.value(a));
    });
}

int Tape::sigmoid(int a) {
    Mat out = value(a).unaryExpr([](double x) { return 1.0 / (1.0 + std::exp(-x)); });
    return emit(std::move(out), [a](Tape& t, int self) {
        const Mat& o = t.value(self);
        t.grad_mut(a) += t.grad(self).cwiseProduct(o.cwiseProduct(Mat::Ones(o.rows(), o.cols()) - o));
    });
}

int Tape::relu(int a) {
    Mat out = value(a).cwiseMax(0.0);
    return emit(std::move(out), [a](Tape& t, int self) {
        const Mat& x = t.value(a);
        t.grad_mut(a) += t.grad(self).cwiseProduct(
            x.unaryExpr([](double v) { return v > 0.0 ? 1.0 : 0.0; }));
    });
}

int Tape::transpose(int a) {
    Mat out = value(a).transpose();
    return emit(std::move(out), [a](Tape& t, int self) {
        t.grad_mut(a) += t.grad(self).transpose();
    });
}

int Tape::concat_cols(const std::vector<int>& parts) {
    if (parts.empty()) throw Error("ShapeMismatch", "concat_cols of nothing");
    Eigen::Index rows = value(parts[0]).rows(), cols = 0;
    for (int p : parts) {
        if (value(p).rows() != rows) throw Error("ShapeMismatch", "concat_cols row mismatch");
        cols += value(p).cols();
    }
    Mat out(rows, cols);
    Eigen::Index at = 0;
    for (int p : parts) {
        out.middleCols(at, value(p).cols()) = value(p);
        at += value(p).cols();
    }
    return emit(std::move(out), [parts](Tape& t, int self) {
        Eigen::Index at = 0;
        for (int p : parts) {
            Eigen::Index w = t.value(p).cols();
            t.grad_mut(p) += t.grad(self).middleCols(at, w);
            at += w;
        }
    });
}

int Tape::softmax_masked_rows(int a, const Mask& key_mask) {
    const Mat& x = value(a);
    if (static_cast<size_t>(x.cols()) != key_mask.size())
        throw Error("ShapeMismatch", "softmax mask length");
    Mat out = Mat::Zero(x.rows(), x.cols());
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
        double mx = -1e300;
        for (Eigen::Index c = 0; c < x.cols(); ++c)
            if (key_mask[c] && x(r, c) > mx) mx = x(r, c);
        double z = 0.0;
        for (Eigen::Index c = 0; c < x.cols(); ++c)
            if (key_mask[c]) z += std::exp(x(r, c) - mx);
        for (Eigen::Index c = 0; c < x.cols(); ++c)
            if (key_mask[c]) out(r, c) = std::exp(x(r, c) - mx) / z;
    }
    return emit(std::move(out), [a, key_mask](Tape& t, int self) {
        const Mat& o = t.value(self);
        const Mat& g = t.grad(self);
        Mat& da = t.grad_mut(a);
        for (Eigen::Index r = 0; r < o.rows(); ++r) {
            double dot = 0.0;
            for (Eigen::Index c = 0; c < o.cols(); ++c)
                if (key_mask[c]) dot += g(r, c) * o(r, c);
            for (Eigen::Index c = 0; c < o.cols(); ++c)
                if (key_mask[c]) da(r, c) += o(r, c) * (g(r, c) - dot);
        }
    });
}

int Tape::masked_mean_rows(int a, const Mask& mask) {
    const Mat& x = value(a);
    if (static_cast<size_t>(x.rows()) != mask.size())
        throw Error("ShapeMismatch", "masked mean length");
    double count = 0.0;
    Mat out = Mat::Zero(1, x.cols());
    for (Eigen::Index r = 0; r < x.rows(); ++r)
        if (mask[r]) {
            out.row(0) += x.row(r);
            count += 1.0;
        }
    if (count == 0.0) throw Error("ShapeMismatch", "mask excludes every row");
    out /= count;
    return emit(std::move(out), [a, mask, count](Tape& t, int self) {
        const Mat& g = t.grad(self);
        Mat& da = t.grad_mut(a);
        for (Eigen::Index r = 0; r < da.rows(); ++r)
            if (mask[r]) da.row(r) += g.row(0) / count;
    });
}

int Tape::zero_masked_rows(int a, const Mask& mask) {
    const Mat& x = value(a);
    if (static_cast<size_t>(x.rows()) != mask.size())
        throw Error("ShapeMismatch", "zero mask length");
    Mat out = x;
    for (Eigen::Index r = 0; r < out.rows(); ++r)
        if (!mask[r]) out.row(r).setZero();
    return emit(std::move(out), [a, mask](Tape& t, int self) {
        const Mat& g = t.grad(self);
        Mat& da = t.grad_mut(a);
        for (Eigen::Index r = 0; r < da.rows(); ++r)
            if (mask[r]) da.row(r) += g.row(r);
    });
}

int Tape::conv1d_same(int a, int w, int b, int k) {
    const Mat& x = value(a);   // L x Cin
    const Mat& wm = value(w);  // (k*Cin) x Cout
    const Mat& bm = value(b);  // 1 x Cout
    const Eigen::Index L = x.rows(), cin = x.cols(), cout = wm.cols();
    if (wm.rows() != k * cin || bm.cols() != cout || bm.rows() != 1)
        throw Error("ShapeMismatch", "conv1d_same");
    const int pad = (k - 1) / 2;
    Mat out = Mat::Zero(L, cout);
    for (Eigen::Index l = 0; l < L; ++l) {
        out.row(l) = bm.row(0);
        for (int j = 0; j < k; ++j) {
            Eigen::Index src = l + j - pad;
            if (src < 0 || src >= L) continue;
            out.row(l) += x.row(src) * wm.middleRows(static_cast<Eigen::Index>(j) * cin, cin);
        }
    }
    return emit(std::move(out), [a, w, b, k, pad](Tape& t, int self) {
        const Mat& g = t.grad(self);
        const Mat& x = t.value(a);
        const Mat& wm = t.value(w);
        const Eigen::Index L = x.rows(), cin = x.cols();
        Mat& da = t.grad_mut(a);
        Mat& dw = t.grad_mut(w);
        Mat& db = t.grad_mut(b);
        db.row(0) += g.colwise().sum();
        for (Eigen::Index l = 0; l < L; ++l) {
            for (int j = 0; j < k; ++j) {
                Eigen::Index src = l + j - pad;
                if (src < 0 || src >= L) continue;
                da.row(src) +=
                    g.row(l) * wm.middleRows(static_cast<Eigen::Index>(j) * cin, cin).transpose();
                dw.middleRows(static_cast<Eigen::Index>(j) * cin, cin) +=
                    x.row(src).transpose() * g.row(l);
            }
        }
    });
}

int Tape::gather_rows(int table, const std::vector<int>& ids) {
    const Mat& tab = value(table);
    Mat out(static_cast<Eigen::Index>(ids.size()), tab.cols());
    for (size_t i = 0; i < ids.size(); ++i) {
        if (ids[i] < 0 || ids[i] >= tab.rows()) throw Error("ShapeMismatch", "gather id range");
        out.row(static_cast<Eigen::Index>(i)) = tab.row(ids[i]);
    }
    return emit(std::move(out), [table, ids](Tape& t, int self) {
        const Mat& g = t.grad(self);
        Mat& dt = t.grad_mut(table);
        for (size_t i = 0; i < ids.size(); ++i)
            dt.row(ids[i]) += g.row(static_cast<Eigen::Index>(i));
    });
}

int Tape::sum_abs(int a) {
    Mat out(1, 1);
    out(0, 0) = value(a).cwiseAbs().sum();
    return emit(std::move(out), [a](Tape& t, int self) {
        double g = t.grad(self)(0, 0);
        t.grad_mut(a) += g * t.value(a).unaryExpr([](double v) {
            return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0);
        });
    });
}

int Tape::bce_sum(int pred, const Mat& target, double eps) {
    const Mat& p = value(pred);
    if (p.rows() != target.rows() || p.cols() != target.cols())
        throw Error("ShapeMismatch", "bce_sum");
    double loss = 0.0;
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        double ph = std::min(std::max(p(i), eps), 1.0 - eps);
        double y = target(i);
        loss -= y * std::log(ph) + (1.0 - y) * std::log(1.0 - ph);
    }
    Mat out(1, 1);
    out(0, 0) = loss;
    return emit(std::move(out), [pred, target, eps](Tape& t, int self) {
        double g = t.grad(self)(0, 0);
        const Mat& p = t.value(pred);
        Mat& dp = t.grad_mut(pred);
        for (Eigen::Index i = 0; i < p.size(); ++i) {
            if (p(i) <= eps || p(i) >= 1.0 - eps) continue;  // clipped region is flat
            dp(i) += g * (p(i) - target(i)) / (p(i) * (1.0 - p(i)));
        }
    });
}

int Tape::squared_error_sum(int pred, const Mat& target) {
    const Mat& p = value(pred);
    if (p.rows() != target.rows() || p.cols() != target.cols())
        throw Error("ShapeMismatch", "squared_error_sum");
    Mat out(1, 1);
    out(0, 0) = (p - target).squaredNorm();
    return emit(std::move(out), [pred, target](Tape& t, int self) {
        double g = t.grad(self)(0, 0);
        t.grad_mut(pred) += 2.0 * g * (t.value(pred) - target);
    });
}

int Tape::convex_combine(int weights, const std::vector<int>& parts) {
    const Mat& w = value(weights);
    if (w.rows() != 1 || static_cast<size_t>(w.cols()) != parts.size())
        throw Error("ShapeMismatch", "convex_combine weights");
    Mat out = Mat::Zero(value(parts[0]).rows(), value(parts[0]).cols());
    for (size_t i = 0; i < parts.size(); ++i) out += w(0, static_cast<Eigen::Index>(i)) * value(parts[i]);
    return emit(std::move(out), [weights, parts](Tape& t, int self) {
        const Mat& g = t.grad(self);
        const Mat& w = t.value(weights);
        for (size_t i = 0; i < parts.size(); ++i) {
            Eigen::Index ii = static_cast<Eigen::Index>(i);
            t.grad_mut(weights)(0, ii) += g.cwiseProduct(t.value(parts[i])).sum();
            t.grad_mut(parts[i]) += w(0, ii) * g;
        }
    });
}

int Tape::add_scalars(const std::vector<int>& scalars) {
    double sum = 0.0;
    for (int s : scalars) {
        if (value(s).size() != 1) throw Error("ShapeMismatch", "add_scalars wants 1x1 nodes");
        sum += value(s)(0, 0);
    }
    Mat out(1, 1);
    out(0, 0) = sum;
    return emit(std::move(out), [scalars](Tape& t, int self) {
        double g = t.grad(self)(0, 0);
        for (int s : scalars) t.grad_mut(s)(0, 0) += g;
    });
}

}  // namespace nint::ad
