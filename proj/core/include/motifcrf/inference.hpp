#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "motifcrf/crf.hpp"
#include "motifcrf/graph.hpp"

namespace motifcrf {

struct SandwichOptions {
    bool per_instance_scores = false;   // sensitivity flag; default clusters by segment
    double jitter = 0.0;                // added to -H's diagonal when retrying
    double singular_tolerance = 1e-10;  // relative floor on -H's smallest eigenvalue
};

/// Godambe covariance G = H^-1 J H^-1 in free-parameter coordinates
/// (active alpha entries, then beta basis coordinates).
struct SandwichCovariance {
    Eigen::MatrixXd G;
};

/// Throws SingularHessian (with the offending eigenvalue) when -H is not
/// positive definite at the tolerance; retry with opts.jitter = 1e-8.
SandwichCovariance godambe_covariance(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y,
                                      const BlockDiagonal& adjacency, const CrfParams& params_hat,
                                      const ModelSpec& spec, const std::vector<int>& segment_of,
                                      int n_segments, const SandwichOptions& opts = {});

struct WaldRow {
    double estimate = 0.0;
    double se = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    double p_value = 1.0;
    double q_bh = 1.0;
};

/// Normal-reference Wald intervals plus BH q-values computed within the
/// given family. Callers invoke once per parameter family (alpha, beta).
/// With use_t_reference, quantiles and p-values use a t distribution with
/// df degrees of freedom instead.
std::vector<WaldRow> wald_intervals(const std::vector<double>& estimates,
                                    const std::vector<double>& ses, double level = 0.95,
                                    bool use_t_reference = false, int df = 0);

/// Same, with SEs taken from the covariance diagonal (negative diagonal
/// dust is clamped to zero).
std::vector<WaldRow> wald_intervals(const std::vector<double>& estimates,
                                    const Eigen::MatrixXd& covariance, double level = 0.95,
                                    bool use_t_reference = false, int df = 0);

/// Benjamini-Hochberg step-up adjustment, q_(i) = min_{j>=i} m p_(j) / j,
/// clipped to 1, returned in input order.
std::vector<double> bh_adjust(const std::vector<double>& p_values);

enum class ClrComparison { BaselineVsUnary, UnaryVsFull, PairwiseVsFull };

std::string to_string(ClrComparison comparison);

struct ClrTestResult {
    ClrComparison comparison;
    double observed_clr = 0.0;
    std::vector<double> permuted_clrs;
    double p_perm = 1.0;
    int n_retried = 0;
    int n_failed = 0;   // replicates counted as exceedances after a failed retry
};

struct ClrConfig {
    int B = 1000;
    std::uint64_t seed = 0;
    FitConfig fit;
    // speed flag: start permutation refits from the observed optimum
    // instead of zero (cold starts are the default)
    bool warm_start = false;
};

/// Segment-constrained permutation test of the composite likelihood
/// ratio between nested model specifications. The statistic is the
/// unpenalized pseudo-log-likelihood difference at the fitted optima.
ClrTestResult clr_permutation_test(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y,
                                   const BlockDiagonal& adjacency, ClrComparison comparison,
                                   const ClrConfig& config);

struct EssReport {
    int unary_ess = 0;            // number of segments
    Eigen::MatrixXi pairwise;     // Q x Q, segments with either label active
};

EssReport effective_sample_size(const Eigen::MatrixXd& Y, const std::vector<int>& segment_of,
                                int n_segments);

/// Row lists per segment, in segment order.
std::vector<std::vector<int>> segment_rows(const std::vector<int>& segment_of, int n_segments);

/// Shuffles whole rows of `target` within each segment (skipping the
/// bias column when requested). The building block of the CLR tests:
/// each segment's row multiset is preserved exactly.
void permute_rows_within_segments(Eigen::MatrixXd& target,
                                  const std::vector<std::vector<int>>& rows, bool skip_bias,
                                  class Rng& rng);

}  // namespace motifcrf
