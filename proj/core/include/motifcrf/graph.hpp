#pragma once

#include <Eigen/Core>
#include <vector>

namespace motifcrf {

struct GraphConfig {
    double sigma = 1.0;
    double prune_threshold = 1e-5;
};

/// Raw Gaussian ordinal-proximity weights for one segment of the given
/// size: w_ij = exp(-(i-j)^2 / sigma^2), zero diagonal, entries below the
/// prune threshold set to exactly 0.
Eigen::MatrixXd gaussian_block(int size, double sigma, double prune_threshold);

/// Symmetric normalization D^{-1/2} W D^{-1/2} with D the row sums of the
/// pruned weights; zero-sum rows stay zero.
Eigen::MatrixXd normalize_block(const Eigen::MatrixXd& weights);

/// Globally block-diagonal adjacency over motif instances; one block per
/// segment, no cross-segment entries.
struct BlockDiagonal {
    struct Block {
        int offset = 0;         // first global row of this block
        Eigen::MatrixXd W;      // symmetric, zero diagonal, nonnegative
    };
    std::vector<Block> blocks;
    int n = 0;

    double entry(int i, int j) const;

    /// S = A * Y without materializing the N x N matrix.
    Eigen::MatrixXd times(const Eigen::MatrixXd& Y) const;

    /// Global row index -> block (segment) index.
    std::vector<int> segment_of() const;
};

/// Builds the normalized adjacency from per-segment instance counts,
/// in segment order.
BlockDiagonal build_adjacency(const std::vector<int>& block_sizes, const GraphConfig& config);

}  // namespace motifcrf
