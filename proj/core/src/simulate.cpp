#include "motifcrf/simulate.hpp"

#include "motifcrf/errors.hpp"

namespace motifcrf {

namespace {

// stream tags for deriving independent per-segment generators
constexpr std::uint64_t kStreamSizes = 1;
constexpr std::uint64_t kStreamFeatures = 2;
constexpr std::uint64_t kStreamGibbs = 3;

std::uint64_t segment_stream(std::uint64_t tag, int segment) {
    return (tag << 32) | static_cast<std::uint64_t>(segment);
}

}  // namespace

GibbsSampler::GibbsSampler(const Eigen::MatrixXd& X_block, const Eigen::MatrixXd& adjacency_block,
                           const CrfParams& params, Rng rng)
    : X_(X_block), A_(adjacency_block), params_(params),
      Y_(Eigen::MatrixXd::Zero(X_block.rows(), params.alpha.cols())), rng_(rng) {
    if (A_.rows() != X_.rows() || A_.cols() != X_.rows())
        throw DimensionMismatch("adjacency block does not match X block");
}

void GibbsSampler::sweep() {
    const int n = static_cast<int>(X_.rows());
    const int Q = static_cast<int>(params_.alpha.cols());
    for (int i = 0; i < n; ++i) {
        for (int q = 0; q < Q; ++q) {
            double z = X_.row(i).dot(params_.alpha.col(q));
            for (int j = 0; j < n; ++j) {
                const double a = A_(i, j);
                if (a == 0.0) continue;
                for (int r = 0; r < Q; ++r) z += a * Y_(j, r) * params_.beta(q, r);
            }
            Y_(i, q) = (rng_.uniform01() < logistic(z)) ? 1.0 : 0.0;
        }
    }
}

Eigen::MatrixXd gibbs_sample_segment(const Eigen::MatrixXd& X_block,
                                     const Eigen::MatrixXd& adjacency_block,
                                     const CrfParams& params, int burn_in, std::uint64_t seed,
                                     std::uint64_t stream) {
    GibbsSampler sampler(X_block, adjacency_block, params, Rng(seed, stream));
    for (int s = 0; s < burn_in; ++s) sampler.sweep();
    return sampler.state();
}

SyntheticData synthesize_corpus(const SimConfig& config) {
    if (config.true_alpha.rows() != config.p + 1 || config.true_alpha.cols() != config.q)
        throw DimensionMismatch("true_alpha must be (p+1) x q");
    if (config.true_beta.rows() != config.q || config.true_beta.cols() != config.q)
        throw DimensionMismatch("true_beta must be q x q");

    SyntheticData out;
    out.n_segments = config.n_segments;

    std::vector<int> sizes;
    {
        Rng rng(config.seed, kStreamSizes);
        for (int s = 0; s < config.n_segments; ++s) {
            const std::uint64_t span =
                static_cast<std::uint64_t>(config.instances_max - config.instances_min) + 1;
            sizes.push_back(config.instances_min + static_cast<int>(rng.bounded(span)));
        }
    }

    int total = 0;
    for (int s : sizes) total += s;
    out.X.resize(total, config.p + 1);
    out.Y.resize(total, config.q);
    out.adjacency = build_adjacency(sizes, config.graph);
    out.segment_of = out.adjacency.segment_of();

    CrfParams params{config.true_alpha, config.true_beta};
    int offset = 0;
    for (int s = 0; s < config.n_segments; ++s) {
        const int n = sizes[static_cast<std::size_t>(s)];
        Eigen::MatrixXd Xb(n, config.p + 1);
        Xb.col(0).setOnes();
        Rng feat_rng(config.seed, segment_stream(kStreamFeatures, s));
        for (int i = 0; i < n; ++i)
            for (int j = 1; j <= config.p; ++j) Xb(i, j) = feat_rng.normal();

        Eigen::MatrixXd Yb =
            gibbs_sample_segment(Xb, out.adjacency.blocks[static_cast<std::size_t>(s)].W, params,
                                 config.burn_in, config.seed, segment_stream(kStreamGibbs, s));

        out.X.middleRows(offset, n) = Xb;
        out.Y.middleRows(offset, n) = Yb;
        offset += n;
    }
    return out;
}

CrfParams random_params(int p, int q, double scale, std::uint64_t seed) {
    Rng rng(seed, 0xC0EFF);
    CrfParams params;
    params.alpha.resize(p + 1, q);
    for (Eigen::Index j = 0; j < params.alpha.rows(); ++j)
        for (Eigen::Index c = 0; c < params.alpha.cols(); ++c)
            params.alpha(j, c) = scale * (2.0 * rng.uniform01() - 1.0);

    const BetaBasis basis(q);
    Eigen::VectorXd coords(basis.dim());
    for (int k = 0; k < basis.dim(); ++k) coords(k) = 2.0 * rng.uniform01() - 1.0;
    params.beta = basis.matrix_from(coords);
    const double max_abs = params.beta.cwiseAbs().maxCoeff();
    if (max_abs > 0.0) params.beta *= scale / max_abs;
    return params;
}

}  // namespace motifcrf
