#include "motifcrf/crf.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "motifcrf/errors.hpp"

namespace motifcrf {

double logistic(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

double log1p_exp(double z) {
    if (z > 0.0) return z + std::log1p(std::exp(-z));
    return std::log1p(std::exp(z));
}

Eigen::MatrixXd neighbor_config(const BlockDiagonal& adjacency, const Eigen::MatrixXd& Y) {
    return adjacency.times(Y);
}

BetaBasis::BetaBasis(int q) : q_(q) {
    const int m = q * (q - 1) / 2;
    vec_.resize(q * q, m);
    elements_.reserve(m);
    if (m == 0) {
        // Q <= 1: the constrained subspace is {0}
        vec_.resize(q * q, 0);
        return;
    }

    // generators: +1 at (a,b),(b,a), -1 at (a,a),(b,b); symmetric, rows sum to 0
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(q * q, m);
    int k = 0;
    for (int a = 0; a < q; ++a)
        for (int b = a + 1; b < q; ++b, ++k) {
            Eigen::MatrixXd E = Eigen::MatrixXd::Zero(q, q);
            E(a, b) = 1.0;
            E(b, a) = 1.0;
            E(a, a) = -1.0;
            E(b, b) = -1.0;
            G.col(k) = Eigen::Map<Eigen::VectorXd>(E.data(), q * q);
        }

    // orthonormalize; the generators are linearly independent, so the thin
    // Q factor spans exactly the constrained subspace
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(G);
    vec_ = qr.householderQ() * Eigen::MatrixXd::Identity(q * q, m);

    for (int j = 0; j < m; ++j) {
        Eigen::MatrixXd B =
            Eigen::Map<const Eigen::MatrixXd>(vec_.col(j).data(), q, q);
        B = (0.5 * (B + B.transpose())).eval();   // scrub fp dust off exact symmetry
        vec_.col(j) = Eigen::Map<const Eigen::VectorXd>(B.data(), q * q);
        elements_.push_back(std::move(B));
    }
}

Eigen::MatrixXd BetaBasis::matrix_from(const Eigen::VectorXd& coords) const {
    if (coords.size() != dim()) throw DimensionMismatch("beta coordinate size mismatch");
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(q_, q_);
    for (int k = 0; k < dim(); ++k) B += coords(k) * elements_[k];
    return 0.5 * (B + B.transpose());
}

Eigen::VectorXd BetaBasis::coords_from(const Eigen::MatrixXd& beta) const {
    if (beta.rows() != q_ || beta.cols() != q_)
        throw DimensionMismatch("beta shape mismatch");
    const Eigen::Map<const Eigen::VectorXd> v(beta.data(), q_ * q_);
    return vec_.transpose() * v;
}

PseudoLikelihood::PseudoLikelihood(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y,
                                   const Eigen::MatrixXd& S, const ModelSpec& spec)
    : Y_(Y), S_(S), spec_(spec), basis_(static_cast<int>(Y.cols())) {
    if (X.rows() != Y.rows() || S.rows() != Y.rows() || S.cols() != Y.cols())
        throw DimensionMismatch("X/Y/S row or label dimensions disagree");
    Xact_ = spec.use_features ? X : X.leftCols(1);
}

int PseudoLikelihood::n_alpha() const {
    return static_cast<int>(Xact_.cols() * Y_.cols());
}

int PseudoLikelihood::n_params() const {
    return n_alpha() + (spec_.use_pairwise ? basis_.dim() : 0);
}

Eigen::MatrixXd PseudoLikelihood::z_matrix(const Eigen::VectorXd& theta) const {
    const int pa = static_cast<int>(Xact_.cols());
    const int Q = q();
    const Eigen::Map<const Eigen::MatrixXd> alpha(theta.data(), pa, Q);
    Eigen::MatrixXd Z = Xact_ * alpha;
    if (spec_.use_pairwise) {
        const Eigen::MatrixXd beta = basis_.matrix_from(theta.tail(basis_.dim()));
        Z.noalias() += S_ * beta;
    }
    return Z;
}

double PseudoLikelihood::value_and_gradient(const Eigen::VectorXd& theta, Eigen::VectorXd& grad,
                                            const PlConfig& penalties) const {
    if (theta.size() != n_params()) throw DimensionMismatch("theta size mismatch");
    const int pa = static_cast<int>(Xact_.cols());
    const int Q = q();

    const Eigen::MatrixXd Z = z_matrix(theta);
    double value = 0.0;
    Eigen::MatrixXd R(Z.rows(), Z.cols());   // Y - sigma(Z)
    for (Eigen::Index i = 0; i < Z.rows(); ++i)
        for (Eigen::Index c = 0; c < Z.cols(); ++c) {
            const double z = Z(i, c);
            value += Y_(i, c) * z - log1p_exp(z);
            R(i, c) = Y_(i, c) - logistic(z);
        }

    grad.resize(n_params());
    Eigen::Map<Eigen::MatrixXd> g_alpha(grad.data(), pa, Q);
    g_alpha = Xact_.transpose() * R;

    const Eigen::Map<const Eigen::MatrixXd> alpha(theta.data(), pa, Q);
    value -= penalties.lambda_alpha * alpha.squaredNorm();
    g_alpha -= 2.0 * penalties.lambda_alpha * alpha;

    if (spec_.use_pairwise) {
        const Eigen::VectorXd coords = theta.tail(basis_.dim());
        const Eigen::MatrixXd M = R.transpose() * S_;   // dL/dbeta_qr, entries independent
        const Eigen::Map<const Eigen::VectorXd> mv(M.data(), Q * Q);
        // orthonormal basis: the penalty is lambda * |coords|^2
        grad.tail(basis_.dim()) =
            basis_.vectorized().transpose() * mv - 2.0 * penalties.lambda_beta * coords;
        value -= penalties.lambda_beta * coords.squaredNorm();
    }

    if (!std::isfinite(value)) throw NonFiniteValue("pseudo-likelihood overflow");
    return value;
}

double PseudoLikelihood::unpenalized(const Eigen::VectorXd& theta) const {
    const Eigen::MatrixXd Z = z_matrix(theta);
    double value = 0.0;
    for (Eigen::Index i = 0; i < Z.rows(); ++i)
        for (Eigen::Index c = 0; c < Z.cols(); ++c)
            value += Y_(i, c) * Z(i, c) - log1p_exp(Z(i, c));
    if (!std::isfinite(value)) throw NonFiniteValue("pseudo-likelihood overflow");
    return value;
}

Eigen::MatrixXd PseudoLikelihood::hessian_unpenalized(const Eigen::VectorXd& theta) const {
    const int pa = static_cast<int>(Xact_.cols());
    const int Q = q();
    const int d = n_params();
    const int nb = spec_.use_pairwise ? basis_.dim() : 0;

    const Eigen::MatrixXd Z = z_matrix(theta);
    Eigen::MatrixXd W(Z.rows(), Z.cols());
    for (Eigen::Index i = 0; i < Z.rows(); ++i)
        for (Eigen::Index c = 0; c < Z.cols(); ++c) {
            const double s = logistic(Z(i, c));
            W(i, c) = s * (1.0 - s);
        }

    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(d, d);

    // alpha-alpha: block diagonal over labels
    for (int c = 0; c < Q; ++c)
        H.block(c * pa, c * pa, pa, pa) =
            -(Xact_.transpose() * W.col(c).asDiagonal() * Xact_);

    if (nb > 0) {
        // T_k = S * B_k holds dz_iq/dc_k
        std::vector<Eigen::MatrixXd> T(nb);
        for (int k = 0; k < nb; ++k) T[k] = S_ * basis_.element(k);

        for (int k = 0; k < nb; ++k) {
            for (int c = 0; c < Q; ++c) {
                const Eigen::VectorXd wt = W.col(c).cwiseProduct(T[k].col(c));
                H.block(c * pa, n_alpha() + k, pa, 1) -= Xact_.transpose() * wt;
            }
            for (int k2 = k; k2 < nb; ++k2) {
                const double h = -(W.array() * T[k].array() * T[k2].array()).sum();
                H(n_alpha() + k, n_alpha() + k2) = h;
            }
        }
        // mirror the upper triangle
        for (int k = 0; k < nb; ++k) {
            for (int k2 = 0; k2 < k; ++k2)
                H(n_alpha() + k, n_alpha() + k2) = H(n_alpha() + k2, n_alpha() + k);
            H.block(n_alpha() + k, 0, 1, n_alpha()) =
                H.block(0, n_alpha() + k, n_alpha(), 1).transpose();
        }
    }
    return H;
}

Eigen::MatrixXd PseudoLikelihood::segment_scores(const Eigen::VectorXd& theta,
                                                 const std::vector<int>& segment_of,
                                                 int n_segments) const {
    const int pa = static_cast<int>(Xact_.cols());
    const int Q = q();
    const int nb = spec_.use_pairwise ? basis_.dim() : 0;
    if (static_cast<Eigen::Index>(segment_of.size()) != Y_.rows())
        throw DimensionMismatch("segment index size mismatch");

    const Eigen::MatrixXd Z = z_matrix(theta);
    Eigen::MatrixXd R(Z.rows(), Z.cols());
    for (Eigen::Index i = 0; i < Z.rows(); ++i)
        for (Eigen::Index c = 0; c < Z.cols(); ++c)
            R(i, c) = Y_(i, c) - logistic(Z(i, c));

    std::vector<Eigen::MatrixXd> T(nb);
    for (int k = 0; k < nb; ++k) T[k] = S_ * basis_.element(k);

    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(n_segments, n_params());
    for (Eigen::Index i = 0; i < Z.rows(); ++i) {
        const int s = segment_of[static_cast<std::size_t>(i)];
        for (int c = 0; c < Q; ++c) {
            G.block(s, c * pa, 1, pa) += R(i, c) * Xact_.row(i);
            for (int k = 0; k < nb; ++k) G(s, n_alpha() + k) += R(i, c) * T[k](i, c);
        }
    }
    return G;
}

CrfParams PseudoLikelihood::unpack(const Eigen::VectorXd& theta, int p_plus_1) const {
    const int pa = static_cast<int>(Xact_.cols());
    const int Q = q();
    CrfParams out;
    out.alpha = Eigen::MatrixXd::Zero(p_plus_1, Q);
    const Eigen::Map<const Eigen::MatrixXd> alpha(theta.data(), pa, Q);
    out.alpha.topRows(pa) = alpha;
    out.beta = spec_.use_pairwise ? basis_.matrix_from(theta.tail(basis_.dim()))
                                  : Eigen::MatrixXd::Zero(Q, Q);
    return out;
}

Eigen::VectorXd PseudoLikelihood::pack(const CrfParams& params) const {
    const int pa = static_cast<int>(Xact_.cols());
    const int Q = q();
    Eigen::VectorXd theta(n_params());
    Eigen::Map<Eigen::MatrixXd>(theta.data(), pa, Q) = params.alpha.topRows(pa);
    if (spec_.use_pairwise) theta.tail(basis_.dim()) = basis_.coords_from(params.beta);
    return theta;
}

FitResult fit_crf_with_neighbors(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y,
                                 const Eigen::MatrixXd& S, const ModelSpec& spec,
                                 const FitConfig& config) {
    if (Y.rows() == 0) throw EmptyData("fit_crf: no instances");
    const PseudoLikelihood pl(X, Y, S, spec);

    optim::Options opts;
    opts.memory = config.lbfgs_memory;
    opts.max_iterations = config.max_iterations;
    opts.gradient_tolerance = config.gradient_tolerance;

    const auto objective = [&](const Eigen::VectorXd& theta, Eigen::VectorXd& grad) {
        const double v = pl.value_and_gradient(theta, grad, config.penalties);
        grad = -grad;
        return -v;
    };

    Eigen::VectorXd theta0 = Eigen::VectorXd::Zero(pl.n_params());
    if (config.warm_start) {
        if (config.warm_start->size() != pl.n_params())
            throw DimensionMismatch("warm start size mismatch");
        theta0 = *config.warm_start;
    }
    const optim::Result r = optim::minimize(objective, theta0, opts);

    FitResult out;
    out.params = pl.unpack(r.x, static_cast<int>(X.cols()));
    out.objective = -r.value;
    out.unpenalized = pl.unpenalized(r.x);
    out.converged = r.converged;
    out.iterations = r.iterations;
    out.gradient_norm = r.gradient_norm;
    out.trace.reserve(r.trace.size());
    for (double v : r.trace) out.trace.push_back(-v);
    return out;
}

FitResult fit_crf(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y,
                  const BlockDiagonal& adjacency, const ModelSpec& spec,
                  const FitConfig& config) {
    return fit_crf_with_neighbors(X, Y, neighbor_config(adjacency, Y), spec, config);
}

}  // namespace motifcrf
