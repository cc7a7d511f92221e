#pragma once

#include <Eigen/Core>
#include <optional>
#include <vector>

#include "motifcrf/graph.hpp"
#include "motifcrf/optim.hpp"

namespace motifcrf {

/// Overflow-safe logistic sigma(z) = 1 / (1 + e^-z).
double logistic(double z);

/// Overflow-safe log(1 + e^z).
double log1p_exp(double z);

/// Graph-weighted neighbor label sums S = A * Y (N x Q).
Eigen::MatrixXd neighbor_config(const BlockDiagonal& adjacency, const Eigen::MatrixXd& Y);

/// Unary coefficients plus the symmetric, centered interaction matrix.
struct CrfParams {
    Eigen::MatrixXd alpha;   // (p+1) x Q; row 0 holds the intercepts
    Eigen::MatrixXd beta;    // Q x Q; beta = beta^T, every row sums to 0
};

/// Orthonormal basis of the interaction-parameter subspace
/// { B in R^{QxQ} : B = B^T, B 1 = 0 }, of dimension Q(Q+1)/2 - Q.
/// The identifiability constraints hold by construction for every
/// coordinate vector, so optimizer iterates never leave the subspace.
class BetaBasis {
public:
    explicit BetaBasis(int q);

    int q() const { return q_; }
    int dim() const { return static_cast<int>(elements_.size()); }

    Eigen::MatrixXd matrix_from(const Eigen::VectorXd& coords) const;
    Eigen::VectorXd coords_from(const Eigen::MatrixXd& beta) const;
    const Eigen::MatrixXd& element(int k) const { return elements_[k]; }

    /// Q^2 x dim matrix of vectorized (column-major) basis elements.
    const Eigen::MatrixXd& vectorized() const { return vec_; }

private:
    int q_;
    Eigen::MatrixXd vec_;
    std::vector<Eigen::MatrixXd> elements_;
};

/// Which parameter groups a model specification activates.
struct ModelSpec {
    bool use_features = true;   // false: alpha restricted to the intercept row
    bool use_pairwise = true;   // false: beta fixed at zero

    static ModelSpec baseline() { return {false, false}; }
    static ModelSpec unary() { return {true, false}; }
    static ModelSpec pairwise() { return {false, true}; }
    static ModelSpec full() { return {true, true}; }
};

struct PlConfig {
    double lambda_alpha = 1e-3;
    double lambda_beta = 1e-3;
};

/// Regularized pseudo-log-likelihood of the multilabel CRF on a fixed
/// dataset. The neighbor matrix S is an input: during fitting it is the
/// observed A*Y, and permutation tests may substitute a permuted copy.
///
/// Free parameters are theta = [vec(active alpha) ; beta coordinates],
/// with z_iq = X_i^T alpha_{.q} + sum_r S_ir beta_qr.
class PseudoLikelihood {
public:
    PseudoLikelihood(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y, const Eigen::MatrixXd& S,
                     const ModelSpec& spec);

    int n_params() const;
    int n_alpha() const;   // active alpha entries
    int q() const { return static_cast<int>(Y_.cols()); }

    /// Penalized objective (to be maximized) and its gradient.
    /// Throws NonFiniteValue on numeric blow-up.
    double value_and_gradient(const Eigen::VectorXd& theta, Eigen::VectorXd& grad,
                              const PlConfig& penalties) const;

    /// Unpenalized pseudo-log-likelihood at theta.
    double unpenalized(const Eigen::VectorXd& theta) const;

    /// Analytic Hessian of the unpenalized pseudo-log-likelihood
    /// (negative semidefinite at any theta: z is linear in theta).
    Eigen::MatrixXd hessian_unpenalized(const Eigen::VectorXd& theta) const;

    /// Per-segment score contributions of the unpenalized objective,
    /// one row per segment (n_segments x n_params).
    Eigen::MatrixXd segment_scores(const Eigen::VectorXd& theta,
                                   const std::vector<int>& segment_of, int n_segments) const;

    /// Maps free parameters to full CrfParams (inactive groups zeroed);
    /// the reconstructed beta is exactly symmetric.
    CrfParams unpack(const Eigen::VectorXd& theta, int p_plus_1) const;
    Eigen::VectorXd pack(const CrfParams& params) const;

    const BetaBasis& basis() const { return basis_; }

private:
    Eigen::MatrixXd z_matrix(const Eigen::VectorXd& theta) const;

    Eigen::MatrixXd Xact_;   // N x pa (bias only, or full design)
    Eigen::MatrixXd Y_;
    Eigen::MatrixXd S_;
    ModelSpec spec_;
    BetaBasis basis_;
};

struct FitConfig {
    PlConfig penalties;
    int max_iterations = 500;
    double gradient_tolerance = 1e-6;
    int lbfgs_memory = 10;
    // speed flag for permutation refits; fits start from zero otherwise
    std::optional<Eigen::VectorXd> warm_start;
};

struct FitResult {
    CrfParams params;
    double objective = 0.0;        // maximized penalized pseudo-log-likelihood
    double unpenalized = 0.0;      // pseudo-log-likelihood at the optimum
    bool converged = false;
    int iterations = 0;
    double gradient_norm = 0.0;
    std::vector<double> trace;
};

/// L-BFGS fit from a zero start. S is taken as A*Y.
FitResult fit_crf(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y,
                  const BlockDiagonal& adjacency, const ModelSpec& spec, const FitConfig& config);

/// Fit with an explicit neighbor matrix (permutation-test refits).
FitResult fit_crf_with_neighbors(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y,
                                 const Eigen::MatrixXd& S, const ModelSpec& spec,
                                 const FitConfig& config);

}  // namespace motifcrf
