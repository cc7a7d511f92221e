#include "motifcrf/inference.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <limits>
#include <numeric>

#include "motifcrf/errors.hpp"
#include "motifcrf/rng.hpp"
#include "motifcrf/stats.hpp"

namespace motifcrf {

SandwichCovariance godambe_covariance(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y,
                                      const BlockDiagonal& adjacency, const CrfParams& params_hat,
                                      const ModelSpec& spec, const std::vector<int>& segment_of,
                                      int n_segments, const SandwichOptions& opts) {
    const Eigen::MatrixXd S = neighbor_config(adjacency, Y);
    const PseudoLikelihood pl(X, Y, S, spec);
    const Eigen::VectorXd theta = pl.pack(params_hat);

    Eigen::MatrixXd H = pl.hessian_unpenalized(theta);
    if (opts.jitter > 0.0)
        H.diagonal().array() -= opts.jitter;   // pushes -H further into the PD cone

    // -H must be positive definite for a meaningful sandwich
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(-H);
    const double min_eig = es.eigenvalues().minCoeff();
    const double max_eig = es.eigenvalues().maxCoeff();
    if (!(min_eig > opts.singular_tolerance * std::max(1.0, max_eig)))
        throw SingularHessian("pseudo-likelihood Hessian is singular", min_eig);

    Eigen::MatrixXd scores;
    if (opts.per_instance_scores) {
        std::vector<int> identity(static_cast<std::size_t>(Y.rows()));
        std::iota(identity.begin(), identity.end(), 0);
        scores = pl.segment_scores(theta, identity, static_cast<int>(Y.rows()));
    } else {
        scores = pl.segment_scores(theta, segment_of, n_segments);
    }
    const Eigen::MatrixXd J = scores.transpose() * scores;

    const auto ldlt = H.ldlt();
    const Eigen::MatrixXd HinvJ = ldlt.solve(J);
    Eigen::MatrixXd G = ldlt.solve(HinvJ.transpose()).transpose();
    G = (0.5 * (G + G.transpose())).eval();
    return SandwichCovariance{std::move(G)};
}

std::vector<double> bh_adjust(const std::vector<double>& p_values) {
    const std::size_t m = p_values.size();
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return p_values[a] < p_values[b]; });

    std::vector<double> q(m, 1.0);
    double running_min = 1.0;
    for (std::size_t i = m; i-- > 0;) {
        const double scaled =
            static_cast<double>(m) * p_values[order[i]] / static_cast<double>(i + 1);
        running_min = std::min(running_min, scaled);
        q[order[i]] = std::min(running_min, 1.0);
    }
    return q;
}

std::vector<WaldRow> wald_intervals(const std::vector<double>& estimates,
                                    const std::vector<double>& ses, double level,
                                    bool use_t_reference, int df) {
    if (estimates.size() != ses.size())
        throw DimensionMismatch("estimates and SEs differ in length");
    const double tail = 0.5 * (1.0 + level);

    double quantile;
    if (use_t_reference) {
        const boost::math::students_t dist(df);
        quantile = boost::math::quantile(dist, tail);
    } else {
        quantile = stats::normal_quantile(tail);
    }

    std::vector<WaldRow> rows(estimates.size());
    std::vector<double> ps(estimates.size());
    for (std::size_t j = 0; j < estimates.size(); ++j) {
        WaldRow& r = rows[j];
        r.estimate = estimates[j];
        r.se = ses[j];
        r.ci_lo = r.estimate - quantile * r.se;
        r.ci_hi = r.estimate + quantile * r.se;
        if (r.se == 0.0) {
            r.p_value = r.estimate == 0.0 ? 1.0 : 0.0;
        } else if (use_t_reference) {
            const boost::math::students_t dist(df);
            r.p_value = 2.0 * boost::math::cdf(dist, -std::fabs(r.estimate / r.se));
        } else {
            r.p_value = stats::wald_p_value(r.estimate, r.se);
        }
        ps[j] = r.p_value;
    }
    const auto qs = bh_adjust(ps);
    for (std::size_t j = 0; j < rows.size(); ++j) rows[j].q_bh = qs[j];
    return rows;
}

std::vector<WaldRow> wald_intervals(const std::vector<double>& estimates,
                                    const Eigen::MatrixXd& covariance, double level,
                                    bool use_t_reference, int df) {
    if (covariance.rows() != covariance.cols() ||
        static_cast<std::size_t>(covariance.rows()) != estimates.size())
        throw DimensionMismatch("covariance shape does not match the estimates");
    std::vector<double> ses(estimates.size());
    for (std::size_t j = 0; j < estimates.size(); ++j)
        ses[j] = std::sqrt(std::max(0.0, covariance(static_cast<Eigen::Index>(j),
                                                    static_cast<Eigen::Index>(j))));
    return wald_intervals(estimates, ses, level, use_t_reference, df);
}

std::string to_string(ClrComparison comparison) {
    switch (comparison) {
        case ClrComparison::BaselineVsUnary: return "baseline_vs_unary";
        case ClrComparison::UnaryVsFull: return "unary_vs_full";
        case ClrComparison::PairwiseVsFull: return "pairwise_vs_full";
    }
    return "?";
}

namespace {

struct ComparisonSpec {
    ModelSpec null_spec;
    ModelSpec alt_spec;
    bool permute_neighbors = false;   // else permute X's non-bias columns
};

ComparisonSpec comparison_spec(ClrComparison c) {
    switch (c) {
        case ClrComparison::BaselineVsUnary:
            return {ModelSpec::baseline(), ModelSpec::unary(), false};
        case ClrComparison::UnaryVsFull:
            return {ModelSpec::unary(), ModelSpec::full(), true};
        case ClrComparison::PairwiseVsFull:
            return {ModelSpec::pairwise(), ModelSpec::full(), false};
    }
    throw Error("unknown comparison");
}

constexpr double kClrSlack = 1e-6;   // tolerance on the CLR >= 0 invariant

}  // namespace

std::vector<std::vector<int>> segment_rows(const std::vector<int>& segment_of, int n_segments) {
    std::vector<std::vector<int>> rows(static_cast<std::size_t>(n_segments));
    for (std::size_t i = 0; i < segment_of.size(); ++i)
        rows[static_cast<std::size_t>(segment_of[i])].push_back(static_cast<int>(i));
    return rows;
}

void permute_rows_within_segments(Eigen::MatrixXd& target,
                                  const std::vector<std::vector<int>>& rows, bool skip_bias,
                                  Rng& rng) {
    const Eigen::Index c0 = skip_bias ? 1 : 0;
    const Eigen::Index width = target.cols() - c0;
    for (const auto& seg : rows) {
        std::vector<int> perm(seg.begin(), seg.end());
        rng.shuffle(perm);
        Eigen::MatrixXd block(static_cast<Eigen::Index>(seg.size()), width);
        for (std::size_t t = 0; t < seg.size(); ++t)
            block.row(static_cast<Eigen::Index>(t)) = target.row(perm[t]).segment(c0, width);
        for (std::size_t t = 0; t < seg.size(); ++t)
            target.row(seg[t]).segment(c0, width) = block.row(static_cast<Eigen::Index>(t));
    }
}

ClrTestResult clr_permutation_test(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y,
                                   const BlockDiagonal& adjacency, ClrComparison comparison,
                                   const ClrConfig& config) {
    if (Y.rows() == 0) throw EmptyData("clr_permutation_test: no instances");
    const ComparisonSpec spec = comparison_spec(comparison);
    const Eigen::MatrixXd S = neighbor_config(adjacency, Y);
    const auto segment_of = adjacency.segment_of();
    const auto rows = segment_rows(segment_of, static_cast<int>(adjacency.blocks.size()));

    const FitResult null_fit = fit_crf_with_neighbors(X, Y, S, spec.null_spec, config.fit);
    const FitResult alt_fit = fit_crf_with_neighbors(X, Y, S, spec.alt_spec, config.fit);
    ClrTestResult out;
    out.comparison = comparison;
    out.observed_clr = alt_fit.unpenalized - null_fit.unpenalized;
    if (out.observed_clr < -kClrSlack)
        throw FitFailure("observed CLR negative: nested optimization failed");
    out.observed_clr = std::max(0.0, out.observed_clr);

    // The permuted block (X covariates or S) never enters the null model
    // of any comparison, so the null refit equals the observed null fit.
    const double null_pl = null_fit.unpenalized;

    FitConfig refit_cfg = config.fit;
    if (config.warm_start) {
        const PseudoLikelihood pl_alt(X, Y, S, spec.alt_spec);
        refit_cfg.warm_start = pl_alt.pack(alt_fit.params);
    }

    const std::uint64_t cmp_id = static_cast<std::uint64_t>(comparison) + 1;
    int exceed = 0;
    for (int b = 1; b <= config.B; ++b) {
        double clr_b = 0.0;
        bool ok = false;
        for (int retry = 0; retry < 2 && !ok; ++retry) {
            if (retry == 1) ++out.n_retried;
            Rng rng(config.seed,
                    (cmp_id << 40) | (static_cast<std::uint64_t>(retry) << 32) |
                        static_cast<std::uint64_t>(b));
            try {
                FitResult alt_b;
                if (spec.permute_neighbors) {
                    Eigen::MatrixXd Sp = S;
                    permute_rows_within_segments(Sp, rows, false, rng);
                    alt_b = fit_crf_with_neighbors(X, Y, Sp, spec.alt_spec, refit_cfg);
                } else {
                    Eigen::MatrixXd Xp = X;
                    permute_rows_within_segments(Xp, rows, true, rng);
                    alt_b = fit_crf_with_neighbors(Xp, Y, S, spec.alt_spec, refit_cfg);
                }
                clr_b = alt_b.unpenalized - null_pl;
                if (!std::isfinite(clr_b) || clr_b < -kClrSlack)
                    throw FitFailure("permutation refit produced an invalid CLR");
                clr_b = std::max(0.0, clr_b);
                ok = true;
            } catch (const Error&) {
                // retried once with a fresh sub-stream; then conservative
            }
        }
        if (!ok) {
            ++out.n_failed;
            ++exceed;   // counted as an exceedance
            out.permuted_clrs.push_back(std::numeric_limits<double>::quiet_NaN());
            continue;
        }
        out.permuted_clrs.push_back(clr_b);
        if (clr_b >= out.observed_clr) ++exceed;
    }
    out.p_perm = (1.0 + static_cast<double>(exceed)) / (static_cast<double>(config.B) + 1.0);
    return out;
}

EssReport effective_sample_size(const Eigen::MatrixXd& Y, const std::vector<int>& segment_of,
                                int n_segments) {
    const int Q = static_cast<int>(Y.cols());
    EssReport out;
    out.unary_ess = n_segments;
    out.pairwise = Eigen::MatrixXi::Zero(Q, Q);

    // active[s][q]: segment s contains an instance with label q on
    std::vector<std::vector<bool>> active(static_cast<std::size_t>(n_segments),
                                          std::vector<bool>(static_cast<std::size_t>(Q), false));
    for (Eigen::Index i = 0; i < Y.rows(); ++i)
        for (int qq = 0; qq < Q; ++qq)
            if (Y(i, qq) != 0.0)
                active[static_cast<std::size_t>(segment_of[static_cast<std::size_t>(i)])]
                      [static_cast<std::size_t>(qq)] = true;

    for (int a = 0; a < Q; ++a)
        for (int b = 0; b < Q; ++b) {
            int count = 0;
            for (int s = 0; s < n_segments; ++s)
                if (active[static_cast<std::size_t>(s)][static_cast<std::size_t>(a)] ||
                    active[static_cast<std::size_t>(s)][static_cast<std::size_t>(b)])
                    ++count;
            out.pairwise(a, b) = count;
        }
    return out;
}

}  // namespace motifcrf
