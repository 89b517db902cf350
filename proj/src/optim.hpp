#ifndef STATFUSE_SRC_OPTIM_HPP
#define STATFUSE_SRC_OPTIM_HPP

#include <Eigen/Dense>

#include <functional>

namespace statfuse::detail {

struct MinimizeResult {
    Eigen::VectorXd x;
    double value = 0.0;
    double grad_inf_norm = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Limited-memory BFGS with Armijo backtracking. `fg` evaluates the
/// objective and writes the gradient. Fully deterministic.
MinimizeResult lbfgs_minimize(
    const std::function<double(const Eigen::VectorXd&, Eigen::VectorXd&)>& fg,
    Eigen::VectorXd x0, double grad_tol, int max_iter, int memory = 10);

} // namespace statfuse::detail

#endif
