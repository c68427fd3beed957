#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "nint/error.hpp"

namespace nint::ad {

using Mat = Eigen::MatrixXd;
using Mask = std::vector<bool>;  // true = real token

// Reverse-mode tape over dense double matrices. Each op records a closure
// that scatters the adjoint of its output into its inputs. backward(node)
// seeds d(node)/d(node) = 1 (node must be 1x1) and sweeps the tape in
// reverse.
class Tape {
public:
    int input(Mat value);

    const Mat& value(int node) const { return nodes_[node].value; }
    const Mat& grad(int node) const { return nodes_[node].grad; }
    size_t size() const { return nodes_.size(); }

    void backward(int scalar_node);

    // -- elementwise / linear ops --
    int matmul(int a, int b);      // A * B
    int matmul_nt(int a, int b);   // A * B^T
    int add(int a, int b);         // same shape
    int add_rowvec(int a, int b);  // b is 1 x cols, broadcast over rows
    int scale(int a, double s);
    int mul(int a, int b);  // elementwise, same shape
    int sigmoid(int a);
    int relu(int a);
    int transpose(int a);
    int concat_cols(const std::vector<int>& parts);

    // -- sequence ops (row = position) --
    // Row-wise softmax over allowed key columns; masked-out columns get
    // exactly zero weight and zero gradient.
    int softmax_masked_rows(int a, const Mask& key_mask);
    // Mean over unmasked rows -> 1 x cols.
    int masked_mean_rows(int a, const Mask& mask);
    // Zero out masked rows (used before convolution).
    int zero_masked_rows(int a, const Mask& mask);
    // Same-length 1-D convolution along rows. a: L x Cin, w: (k*Cin) x Cout,
    // b: 1 x Cout. Left zero-pad floor((k-1)/2), remainder on the right.
    int conv1d_same(int a, int w, int b, int k);
    // Gather rows of a parameter table; backward scatter-adds.
    int gather_rows(int table, const std::vector<int>& ids);

    // -- reductions / losses (all produce 1x1 nodes) --
    int sum_abs(int a);  // sum |a_ij|
    // Summed binary cross-entropy with predictions clipped to [eps, 1-eps].
    int bce_sum(int pred, const Mat& target, double eps = 1e-7);
    int squared_error_sum(int pred, const Mat& target);
    // weights: 1 x n node, parts: n nodes of equal shape -> sum_i w_i * P_i
    int convex_combine(int weights, const std::vector<int>& parts);
    int add_scalars(const std::vector<int>& scalars);

private:
    struct Node {
        Mat value;
        Mat grad;
        std::function<void(Tape&, int)> backward_fn;  // may be empty (leaf)
    };
    std::vector<Node> nodes_;

    int emit(Mat value, std::function<void(Tape&, int)> fn);
    Mat& grad_mut(int node) { return nodes_[node].grad; }
};

}  // namespace nint::ad
