#include "tendon/autodiff.hpp"

#include <cassert>

namespace tendon {

int Tape::push(Node n) {
    n.grad = Mat::Zero(n.val.rows(), n.val.cols());
    nodes_.push_back(std::move(n));
    return static_cast<int>(nodes_.size()) - 1;
}

int Tape::parameter(const Mat& value) {
    Node n;
    n.val = value;
    return push(std::move(n));
}

int Tape::constant(const Mat& value) {
    Node n;
    n.val = value;
    return push(std::move(n));
}

int Tape::affine(int x, int W, int b) {
    Node n;
    n.op = Op::Affine;
    n.a = x;
    n.b = W;
    n.c = b;
    n.val = nodes_[x].val * nodes_[W].val.transpose();
    n.val.rowwise() += nodes_[b].val.row(0);
    return push(std::move(n));
}

int Tape::conv1d_causal(int x, int W, int b, int kernel, int dilation, int batch) {
    const Mat& X = nodes_[x].val;
    const Mat& Wm = nodes_[W].val;
    const int cin = static_cast<int>(X.cols());
    const int cout = static_cast<int>(Wm.rows());
    const int L = static_cast<int>(X.rows()) / batch;
    assert(Wm.cols() == kernel * cin);

    Node n;
    n.op = Op::Conv1d;
    n.a = x;
    n.b = W;
    n.c = b;
    n.kernel = kernel;
    n.dilation = dilation;
    n.batch = batch;
    n.val = Mat::Zero(X.rows(), cout);
    for (int blk = 0; blk < batch; ++blk) {
        const int base = blk * L;
        for (int j = 0; j < kernel; ++j) {
            const int off = dilation * (kernel - 1 - j);
            if (off >= L) continue;
            const auto Wj = Wm.middleCols(j * cin, cin);
            n.val.middleRows(base + off, L - off).noalias() +=
                X.middleRows(base, L - off) * Wj.transpose();
        }
    }
    n.val.rowwise() += nodes_[b].val.row(0);
    return push(std::move(n));
}

int Tape::relu(int x) {
    Node n;
    n.op = Op::Relu;
    n.a = x;
    n.val = nodes_[x].val.cwiseMax(0.0);
    return push(std::move(n));
}

int Tape::add(int a, int b) {
    Node n;
    n.op = Op::Add;
    n.a = a;
    n.b = b;
    n.val = nodes_[a].val + nodes_[b].val;
    return push(std::move(n));
}

int Tape::block_last_rows(int x, int batch) {
    const Mat& X = nodes_[x].val;
    const int L = static_cast<int>(X.rows()) / batch;
    Node n;
    n.op = Op::BlockLast;
    n.a = x;
    n.batch = batch;
    n.val = Mat(batch, X.cols());
    for (int blk = 0; blk < batch; ++blk) n.val.row(blk) = X.row(blk * L + L - 1);
    return push(std::move(n));
}

int Tape::flatten_blocks(int x, int batch) {
    const Mat& X = nodes_[x].val;
    const int L = static_cast<int>(X.rows()) / batch;
    const int C = static_cast<int>(X.cols());
    Node n;
    n.op = Op::Flatten;
    n.a = x;
    n.batch = batch;
    n.val = Mat(batch, L * C);
    for (int blk = 0; blk < batch; ++blk)
        for (int t = 0; t < L; ++t)
            n.val.block(blk, t * C, 1, C) = X.row(blk * L + t);
    return push(std::move(n));
}

int Tape::mse(int pred, int target) {
    Node n;
    n.op = Op::Mse;
    n.a = pred;
    n.b = target;
    const Mat diff = nodes_[pred].val - nodes_[target].val;
    n.val = Mat::Constant(1, 1, diff.squaredNorm() / diff.size());
    return push(std::move(n));
}

void Tape::backward(int node) {
    for (auto& n : nodes_) n.grad.setZero();
    nodes_[node].grad.setConstant(1.0);

    for (int i = node; i >= 0; --i) {
        Node& n = nodes_[i];
        if (n.grad.isZero(0.0)) continue;
        switch (n.op) {
            case Op::Leaf:
                break;
            case Op::Affine: {
                const Mat& X = nodes_[n.a].val;
                const Mat& W = nodes_[n.b].val;
                nodes_[n.a].grad.noalias() += n.grad * W;
                nodes_[n.b].grad.noalias() += n.grad.transpose() * X;
                nodes_[n.c].grad.row(0) += n.grad.colwise().sum();
                break;
            }
            case Op::Conv1d: {
                const Mat& X = nodes_[n.a].val;
                const Mat& W = nodes_[n.b].val;
                const int cin = static_cast<int>(X.cols());
                const int L = static_cast<int>(X.rows()) / n.batch;
                for (int blk = 0; blk < n.batch; ++blk) {
                    const int base = blk * L;
                    for (int j = 0; j < n.kernel; ++j) {
                        const int off = n.dilation * (n.kernel - 1 - j);
                        if (off >= L) continue;
                        const auto Wj = W.middleCols(j * cin, cin);
                        nodes_[n.a].grad.middleRows(base, L - off).noalias() +=
                            n.grad.middleRows(base + off, L - off) * Wj;
                        nodes_[n.b].grad.middleCols(j * cin, cin).noalias() +=
                            n.grad.middleRows(base + off, L - off).transpose() *
                            X.middleRows(base, L - off);
                    }
                }
                nodes_[n.c].grad.row(0) += n.grad.colwise().sum();
                break;
            }
            case Op::Relu:
                nodes_[n.a].grad.array() +=
                    n.grad.array() * (n.val.array() > 0.0).cast<double>();
                break;
            case Op::Add:
                nodes_[n.a].grad += n.grad;
                nodes_[n.b].grad += n.grad;
                break;
            case Op::BlockLast: {
                const int L = static_cast<int>(nodes_[n.a].val.rows()) / n.batch;
                for (int blk = 0; blk < n.batch; ++blk)
                    nodes_[n.a].grad.row(blk * L + L - 1) += n.grad.row(blk);
                break;
            }
            case Op::Flatten: {
                const int C = static_cast<int>(nodes_[n.a].val.cols());
                const int L = static_cast<int>(nodes_[n.a].val.rows()) / n.batch;
                for (int blk = 0; blk < n.batch; ++blk)
                    for (int t = 0; t < L; ++t)
                        nodes_[n.a].grad.row(blk * L + t) +=
                            n.grad.block(blk, t * C, 1, C);
                break;
            }
            case Op::Mse: {
                const Mat diff = nodes_[n.a].val - nodes_[n.b].val;
                const double s = 2.0 * n.grad(0, 0) / diff.size();
                nodes_[n.a].grad += s * diff;
                break;
            }
        }
    }
}

}  // namespace tendon
