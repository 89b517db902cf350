#include "optim.hpp"

#include "statfuse/error.hpp"

#include <cmath>
#include <deque>

namespace statfuse::detail {

MinimizeResult lbfgs_minimize(
    const std::function<double(const Eigen::VectorXd&, Eigen::VectorXd&)>& fg,
    Eigen::VectorXd x0, double grad_tol, int max_iter, int memory) {
    const Eigen::Index n = x0.size();
    Eigen::VectorXd x = std::move(x0);
    Eigen::VectorXd grad(n);
    double value = fg(x, grad);
    if (!std::isfinite(value)) {
        throw NumericError("NonFiniteObjective", "objective is not finite at the start point");
    }

    std::deque<Eigen::VectorXd> s_hist, y_hist;
    std::deque<double> rho_hist;

    MinimizeResult result;
    int iter = 0;
    for (; iter < max_iter; ++iter) {
        const double gnorm = grad.lpNorm<Eigen::Infinity>();
        if (gnorm <= grad_tol) {
            result.converged = true;
            break;
        }

        // Two-loop recursion for the search direction.
        Eigen::VectorXd direction = -grad;
        std::vector<double> alpha(s_hist.size());
        for (int i = static_cast<int>(s_hist.size()) - 1; i >= 0; --i) {
            alpha[i] = rho_hist[i] * s_hist[i].dot(direction);
            direction -= alpha[i] * y_hist[i];
        }
        if (!s_hist.empty()) {
            const double gamma =
                s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
            direction *= gamma;
        }
        for (std::size_t i = 0; i < s_hist.size(); ++i) {
            const double beta = rho_hist[i] * y_hist[i].dot(direction);
            direction += (alpha[i] - beta) * s_hist[i];
        }

        double slope = grad.dot(direction);
        if (slope >= 0.0) { // not a descent direction; fall back to steepest
            direction = -grad;
            slope = -grad.squaredNorm();
        }

        // Armijo backtracking.
        double step = iter == 0 ? std::min(1.0, 1.0 / std::max(1.0, gnorm)) : 1.0;
        const double c1 = 1e-4;
        Eigen::VectorXd x_new(n), grad_new(n);
        double value_new = value;
        bool accepted = false;
        for (int ls = 0; ls < 60; ++ls) {
            x_new = x + step * direction;
            value_new = fg(x_new, grad_new);
            if (std::isfinite(value_new) && value_new <= value + c1 * step * slope) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break; // no further progress possible

        const Eigen::VectorXd s = x_new - x;
        const Eigen::VectorXd yv = grad_new - grad;
        const double sy = s.dot(yv);
        if (sy > 1e-10 * s.norm() * yv.norm()) {
            s_hist.push_back(s);
            y_hist.push_back(yv);
            rho_hist.push_back(1.0 / sy);
            if (static_cast<int>(s_hist.size()) > memory) {
                s_hist.pop_front();
                y_hist.pop_front();
                rho_hist.pop_front();
            }
        }
        x = std::move(x_new);
        grad = std::move(grad_new);
        value = value_new;
    }

    result.x = std::move(x);
    result.value = value;
    result.grad_inf_norm = grad.lpNorm<Eigen::Infinity>();
    result.iterations = iter;
    return result;
}

} // namespace statfuse::detail
