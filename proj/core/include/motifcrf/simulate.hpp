#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "motifcrf/crf.hpp"
#include "motifcrf/graph.hpp"
#include "motifcrf/rng.hpp"

namespace motifcrf {

struct SimConfig {
    int n_segments = 50;
    int instances_min = 8;       // per-segment count drawn uniformly from
    int instances_max = 8;       // [instances_min, instances_max]
    int q = 3;
    int p = 3;                   // non-bias features
    Eigen::MatrixXd true_alpha;  // (p+1) x q
    Eigen::MatrixXd true_beta;   // q x q, symmetric and centered
    int burn_in = 200;
    int thinning = 5;            // sweeps between retained samples when chains are collected
    std::uint64_t seed = 0;
    GraphConfig graph;
};

/// Systematic-scan single-site Gibbs over one segment subgraph. Sites
/// (i,q) are visited in fixed order; Y_iq is resampled from the logistic
/// full conditional.
class GibbsSampler {
public:
    GibbsSampler(const Eigen::MatrixXd& X_block, const Eigen::MatrixXd& adjacency_block,
                 const CrfParams& params, Rng rng);

    void sweep();
    const Eigen::MatrixXd& state() const { return Y_; }

private:
    Eigen::MatrixXd X_;
    Eigen::MatrixXd A_;
    CrfParams params_;
    Eigen::MatrixXd Y_;
    Rng rng_;
};

/// State after burn_in full sweeps from an all-zero start.
Eigen::MatrixXd gibbs_sample_segment(const Eigen::MatrixXd& X_block,
                                     const Eigen::MatrixXd& adjacency_block,
                                     const CrfParams& params, int burn_in, std::uint64_t seed,
                                     std::uint64_t stream = 0);

struct SyntheticData {
    Eigen::MatrixXd X;            // N x (p+1), bias first
    Eigen::MatrixXd Y;            // N x q
    BlockDiagonal adjacency;
    std::vector<int> segment_of;
    int n_segments = 0;
};

/// Standard-normal features, per-segment Gaussian adjacency, labels from
/// per-segment Gibbs chains. Output depends only on (seed, config).
SyntheticData synthesize_corpus(const SimConfig& config);

/// Random feasible parameters with entries bounded by scale; beta is
/// drawn in basis coordinates so it satisfies the constraints exactly.
CrfParams random_params(int p, int q, double scale, std::uint64_t seed);

}  // namespace motifcrf
