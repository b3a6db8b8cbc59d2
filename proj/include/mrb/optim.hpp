#pragma once
// Small bounded optimizers for the fitting problems in this library. The
// problems are tiny (1..30 parameters), so simple, deterministic methods with
// tight tolerances beat pulling in a solver dependency.

#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace mrb {

// Grid scan + golden-section refinement of a 1-D function on [lo, hi].
double minimize_scalar(const std::function<double(double)>& f, double lo, double hi,
                       int grid = 2000, double tol = 1e-9);

struct LeastSquaresResult {
    Eigen::VectorXd x;
    double cost = 0;         // 0.5 * sum of squared residuals
    int iterations = 0;
    bool converged = false;
};

// Box-constrained Levenberg-Marquardt with a forward-difference Jacobian.
// `residuals` maps parameters to the residual vector.
LeastSquaresResult levenberg_marquardt(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& residuals,
    Eigen::VectorXd x0, const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
    int max_iter = 400, double xtol = 1e-10);

struct GradientResult {
    Eigen::VectorXd x;
    double value = 0;
    double projected_grad_norm = 0;
    bool converged = false;
};

// Projected gradient descent with Barzilai-Borwein steps for box-constrained
// minimization of a smooth function (numeric gradient).
GradientResult projected_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                                  Eigen::VectorXd x0, const Eigen::VectorXd& lower,
                                  const Eigen::VectorXd& upper, int max_iter = 2000,
                                  double gtol = 1e-6);

}  // namespace mrb
