#include "motifcrf/graph.hpp"

#include <cmath>

#include "motifcrf/errors.hpp"

namespace motifcrf {

Eigen::MatrixXd gaussian_block(int size, double sigma, double prune_threshold) {
    Eigen::MatrixXd W = Eigen::MatrixXd::Zero(size, size);
    for (int i = 0; i < size; ++i)
        for (int j = 0; j < size; ++j) {
            if (i == j) continue;
            const double d = static_cast<double>(i - j);
            const double w = std::exp(-(d * d) / (sigma * sigma));
            W(i, j) = (w < prune_threshold) ? 0.0 : w;
        }
    return W;
}

Eigen::MatrixXd normalize_block(const Eigen::MatrixXd& W) {
    const Eigen::VectorXd d = W.rowwise().sum();
    Eigen::VectorXd dinv_sqrt(d.size());
    for (Eigen::Index i = 0; i < d.size(); ++i)
        dinv_sqrt(i) = d(i) > 0.0 ? 1.0 / std::sqrt(d(i)) : 0.0;
    // one multiplication order per unordered pair keeps A = A^T bit-exact
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(W.rows(), W.cols());
    for (Eigen::Index i = 0; i < W.rows(); ++i)
        for (Eigen::Index j = i + 1; j < W.cols(); ++j) {
            const double a = dinv_sqrt(i) * W(i, j) * dinv_sqrt(j);
            A(i, j) = a;
            A(j, i) = a;
        }
    return A;
}

double BlockDiagonal::entry(int i, int j) const {
    for (const auto& b : blocks) {
        const int size = static_cast<int>(b.W.rows());
        const bool i_in = i >= b.offset && i < b.offset + size;
        const bool j_in = j >= b.offset && j < b.offset + size;
        if (i_in && j_in) return b.W(i - b.offset, j - b.offset);
        if (i_in || j_in) return 0.0;   // indices fall in different segments
    }
    return 0.0;
}

Eigen::MatrixXd BlockDiagonal::times(const Eigen::MatrixXd& Y) const {
    if (Y.rows() != n) throw DimensionMismatch("adjacency has " + std::to_string(n) +
                                               " rows, Y has " + std::to_string(Y.rows()));
    Eigen::MatrixXd S = Eigen::MatrixXd::Zero(Y.rows(), Y.cols());
    for (const auto& b : blocks) {
        const Eigen::Index size = b.W.rows();
        S.middleRows(b.offset, size).noalias() = b.W * Y.middleRows(b.offset, size);
    }
    return S;
}

std::vector<int> BlockDiagonal::segment_of() const {
    std::vector<int> out(static_cast<std::size_t>(n), -1);
    for (std::size_t s = 0; s < blocks.size(); ++s)
        for (Eigen::Index k = 0; k < blocks[s].W.rows(); ++k)
            out[static_cast<std::size_t>(blocks[s].offset + k)] = static_cast<int>(s);
    return out;
}

BlockDiagonal build_adjacency(const std::vector<int>& block_sizes, const GraphConfig& config) {
    BlockDiagonal A;
    int offset = 0;
    for (int size : block_sizes) {
        BlockDiagonal::Block b;
        b.offset = offset;
        b.W = normalize_block(gaussian_block(size, config.sigma, config.prune_threshold));
        offset += size;
        A.blocks.push_back(std::move(b));
    }
    A.n = offset;
    return A;
}

}  // namespace motifcrf
