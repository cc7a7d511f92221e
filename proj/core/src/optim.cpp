#include "motifcrf/optim.hpp"

#include <cmath>
#include <deque>
#include <limits>

#include "motifcrf/errors.hpp"

namespace motifcrf::optim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Evaluation that maps numeric blow-ups to +inf so the line search can
/// back away from them.
double guarded_eval(const Objective& f, const Eigen::VectorXd& x, Eigen::VectorXd& grad) {
    try {
        const double v = f(x, grad);
        return std::isfinite(v) ? v : kInf;
    } catch (const NonFiniteValue&) {
        return kInf;
    }
}

struct LineSearchResult {
    double alpha = 0.0;
    double value = 0.0;
    Eigen::VectorXd x;
    Eigen::VectorXd grad;
    bool ok = false;
};

/// Strong-Wolfe line search (bracket + zoom, Nocedal & Wright alg. 3.5/3.6).
LineSearchResult line_search(const Objective& f, const Eigen::VectorXd& x0, double f0,
                             const Eigen::VectorXd& g0, const Eigen::VectorXd& d,
                             const Options& opts) {
    LineSearchResult out;
    const double dphi0 = g0.dot(d);
    if (dphi0 >= 0.0) return out;   // not a descent direction

    Eigen::VectorXd grad(x0.size());
    auto phi = [&](double a, double& dphi) {
        out.x = x0 + a * d;
        const double v = guarded_eval(f, out.x, grad);
        dphi = std::isfinite(v) ? grad.dot(d) : kInf;
        return v;
    };
    auto accept = [&](double a, double fa) {
        out.alpha = a;
        out.value = fa;
        out.grad = grad;
        out.ok = true;
    };

    auto zoom = [&](double lo, double f_lo, double hi) {
        for (int it = 0; it < opts.max_line_search; ++it) {
            const double a = 0.5 * (lo + hi);
            double dphi_a;
            const double fa = phi(a, dphi_a);
            if (fa > f0 + opts.wolfe_c1 * a * dphi0 || fa >= f_lo) {
                hi = a;
            } else {
                if (std::fabs(dphi_a) <= -opts.wolfe_c2 * dphi0) {
                    accept(a, fa);
                    return;
                }
                if (dphi_a * (hi - lo) >= 0.0) hi = lo;
                lo = a;
                f_lo = fa;
            }
            if (std::fabs(hi - lo) < 1e-16 * std::max(1.0, std::fabs(lo))) break;
        }
        // settle for the best sufficient-decrease point found
        if (f_lo < f0) {
            double dphi_lo;
            const double v = phi(lo, dphi_lo);
            if (std::isfinite(v)) accept(lo, v);
        }
    };

    double a_prev = 0.0, f_prev = f0, dphi_prev = dphi0;
    double a = 1.0;
    for (int it = 0; it < opts.max_line_search; ++it) {
        double dphi_a;
        const double fa = phi(a, dphi_a);
        if (fa > f0 + opts.wolfe_c1 * a * dphi0 || (it > 0 && fa >= f_prev)) {
            zoom(a_prev, f_prev, a);
            return out;
        }
        if (std::fabs(dphi_a) <= -opts.wolfe_c2 * dphi0) {
            accept(a, fa);
            return out;
        }
        if (dphi_a >= 0.0) {
            zoom(a, fa, a_prev);
            return out;
        }
        a_prev = a;
        f_prev = fa;
        dphi_prev = dphi_a;
        a *= 2.0;
    }
    (void)dphi_prev;
    return out;
}

}  // namespace

Result minimize(const Objective& f, const Eigen::VectorXd& x0, const Options& opts) {
    Result res;
    res.x = x0;
    if (x0.size() == 0) {
        Eigen::VectorXd g(0);
        res.value = f(x0, g);
        res.converged = true;
        return res;
    }

    Eigen::VectorXd g(x0.size());
    double fx = guarded_eval(f, res.x, g);
    if (!std::isfinite(fx)) throw NonFiniteValue("objective not finite at the starting point");

    std::deque<Eigen::VectorXd> s_hist, y_hist;
    std::deque<double> rho_hist;

    for (int iter = 0; iter < opts.max_iterations; ++iter) {
        res.gradient_norm = g.lpNorm<Eigen::Infinity>();
        if (res.gradient_norm < opts.gradient_tolerance) {
            res.converged = true;
            break;
        }

        // two-loop recursion
        Eigen::VectorXd q = g;
        std::vector<double> alpha_coef(s_hist.size());
        for (std::size_t k = s_hist.size(); k-- > 0;) {
            alpha_coef[k] = rho_hist[k] * s_hist[k].dot(q);
            q -= alpha_coef[k] * y_hist[k];
        }
        if (!s_hist.empty()) {
            const double gamma =
                s_hist.back().dot(y_hist.back()) / y_hist.back().dot(y_hist.back());
            q *= gamma;
        }
        for (std::size_t k = 0; k < s_hist.size(); ++k) {
            const double beta = rho_hist[k] * y_hist[k].dot(q);
            q += (alpha_coef[k] - beta) * s_hist[k];
        }
        Eigen::VectorXd d = -q;

        LineSearchResult ls = line_search(f, res.x, fx, g, d, opts);
        if (!ls.ok) {
            // retry along steepest descent before giving up
            d = -g;
            ls = line_search(f, res.x, fx, g, d, opts);
            if (!ls.ok) break;
        }

        const Eigen::VectorXd s = ls.x - res.x;
        const Eigen::VectorXd y = ls.grad - g;
        const double sy = s.dot(y);
        if (sy > 1e-12 * s.norm() * y.norm()) {
            s_hist.push_back(s);
            y_hist.push_back(y);
            rho_hist.push_back(1.0 / sy);
            if (static_cast<int>(s_hist.size()) > opts.memory) {
                s_hist.pop_front();
                y_hist.pop_front();
                rho_hist.pop_front();
            }
        }

        res.x = ls.x;
        fx = ls.value;
        g = ls.grad;
        res.iterations = iter + 1;
        res.trace.push_back(fx);
    }

    res.value = fx;
    res.gradient_norm = g.lpNorm<Eigen::Infinity>();
    if (res.gradient_norm < opts.gradient_tolerance) res.converged = true;
    return res;
}

}  // namespace motifcrf::optim
