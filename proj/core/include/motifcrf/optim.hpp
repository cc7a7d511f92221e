#pragma once

#include <Eigen/Core>
#include <functional>
#include <vector>

namespace motifcrf::optim {

/// Objective callback: fills the gradient and returns the value.
/// May throw NonFiniteValue; the line search backs off in response.
using Objective = std::function<double(const Eigen::VectorXd&, Eigen::VectorXd&)>;

struct Options {
    int memory = 10;
    int max_iterations = 500;
    double gradient_tolerance = 1e-6;   // infinity norm of the gradient
    double wolfe_c1 = 1e-4;
    double wolfe_c2 = 0.9;
    int max_line_search = 60;
};

struct Result {
    Eigen::VectorXd x;
    double value = 0.0;
    bool converged = false;
    int iterations = 0;
    double gradient_norm = 0.0;
    std::vector<double> trace;   // objective value after each iteration
};

/// Limited-memory BFGS with a strong-Wolfe line search. Deterministic:
/// identical inputs give bitwise-identical iterates.
Result minimize(const Objective& f, const Eigen::VectorXd& x0, const Options& opts);

}  // namespace motifcrf::optim
