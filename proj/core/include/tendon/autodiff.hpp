#pragma once

#include <Eigen/Dense>
#include <vector>

namespace tendon {

/// Reverse-mode autodiff over matrix-valued nodes. The op set is exactly what
/// the sequence models need: affine, dilated causal convolution, ReLU,
/// residual add, block bookkeeping, and a mean-square reduction.
///
/// Batched sequences are stored as (batch*L) x channels matrices of
/// consecutive L-row blocks; convolutions never read across block boundaries.
class Tape {
public:
    using Mat = Eigen::MatrixXd;

    /// Leaf that participates in backward() gradient accumulation.
    int parameter(const Mat& value);
    /// Leaf with no gradient of interest (inputs, targets).
    int constant(const Mat& value);

    /// x:(N x in), W:(out x in), b:(1 x out) -> x*W^T + b, (N x out)
    int affine(int x, int W, int b);

    /// Dilated causal conv along each L-row block. x:(B*L x Cin),
    /// W:(Cout x k*Cin) with tap j in columns [j*Cin,(j+1)*Cin) reading time
    /// offset -dilation*(k-1-j), b:(1 x Cout). Left zero padding implied.
    int conv1d_causal(int x, int W, int b, int kernel, int dilation, int batch);

    int relu(int x);
    int add(int a, int b);

    /// (B*L x C) -> (B x C), the last row of every block.
    int block_last_rows(int x, int batch);

    /// (B*L x C) -> (B x L*C), rows of each block concatenated oldest first.
    int flatten_blocks(int x, int batch);

    /// mean((pred - target)^2) over all entries -> 1x1.
    int mse(int pred, int target);

    void backward(int node);

    const Mat& value(int node) const { return nodes_[node].val; }
    const Mat& grad(int node) const { return nodes_[node].grad; }
    std::size_t size() const { return nodes_.size(); }

private:
    enum class Op { Leaf, Affine, Conv1d, Relu, Add, BlockLast, Flatten, Mse };

    struct Node {
        Op op = Op::Leaf;
        Mat val;
        Mat grad;
        int a = -1, b = -1, c = -1;  // parents
        int kernel = 0, dilation = 0, batch = 0;
    };

    int push(Node n);
    std::vector<Node> nodes_;
};

}  // namespace tendon
