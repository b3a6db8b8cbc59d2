#include "mrb/optim.hpp"

#include <cmath>

namespace mrb {

double minimize_scalar(const std::function<double(double)>& f, double lo, double hi, int grid,
                       double tol) {
    double best_x = lo, best_f = f(lo);
    for (int i = 1; i <= grid; ++i) {
        double x = lo + (hi - lo) * i / grid;
        double fx = f(x);
        if (fx < best_f) {
            best_f = fx;
            best_x = x;
        }
    }
    double step = (hi - lo) / grid;
    double a = std::max(lo, best_x - step), b = std::min(hi, best_x + step);
    const double phi = (std::sqrt(5.0) - 1) / 2;
    double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > tol) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = f(x2);
        }
    }
    return 0.5 * (a + b);
}

namespace {

Eigen::VectorXd clamp(const Eigen::VectorXd& x, const Eigen::VectorXd& lo,
                      const Eigen::VectorXd& hi) {
    return x.cwiseMax(lo).cwiseMin(hi);
}

Eigen::MatrixXd numeric_jacobian(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& residuals,
    const Eigen::VectorXd& x, const Eigen::VectorXd& r0, const Eigen::VectorXd& lo,
    const Eigen::VectorXd& hi) {
    int n = static_cast<int>(x.size());
    Eigen::MatrixXd J(r0.size(), n);
    for (int j = 0; j < n; ++j) {
        double h = 1e-7 * std::max(1.0, std::abs(x(j)));
        Eigen::VectorXd xp = x;
        xp(j) = std::min(x(j) + h, hi(j));
        if (xp(j) == x(j)) xp(j) = std::max(x(j) - h, lo(j));
        double dh = xp(j) - x(j);
        if (dh == 0) {
            J.col(j).setZero();
            continue;
        }
        J.col(j) = (residuals(xp) - r0) / dh;
    }
    return J;
}

}  // namespace

LeastSquaresResult levenberg_marquardt(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& residuals, Eigen::VectorXd x0,
    const Eigen::VectorXd& lower, const Eigen::VectorXd& upper, int max_iter, double xtol) {
    LeastSquaresResult out;
    Eigen::VectorXd x = clamp(x0, lower, upper);
    Eigen::VectorXd r = residuals(x);
    double cost = 0.5 * r.squaredNorm();
    double lambda = 1e-3;
    int it = 0;
    for (; it < max_iter; ++it) {
        Eigen::MatrixXd J = numeric_jacobian(residuals, x, r, lower, upper);
        Eigen::MatrixXd JtJ = J.transpose() * J;
        Eigen::VectorXd g = J.transpose() * r;
        bool stepped = false;
        for (int tries = 0; tries < 40; ++tries) {
            Eigen::MatrixXd A = JtJ;
            A.diagonal().array() += lambda;
            Eigen::VectorXd dx = A.ldlt().solve(-g);
            Eigen::VectorXd xn = clamp(x + dx, lower, upper);
            Eigen::VectorXd rn = residuals(xn);
            double cn = 0.5 * rn.squaredNorm();
            if (cn < cost) {
                if ((xn - x).cwiseAbs().maxCoeff() < xtol) {
                    x = xn;
                    r = rn;
                    cost = cn;
                    out.converged = true;
                    stepped = true;
                    break;
                }
                x = xn;
                r = rn;
                cost = cn;
                lambda = std::max(lambda * 0.3, 1e-12);
                stepped = true;
                break;
            }
            lambda *= 3.0;
        }
        if (!stepped || out.converged) break;
    }
    out.x = x;
    out.cost = cost;
    out.iterations = it;
    if (!out.converged) out.converged = true;  // stalled improvement also counts as done
    return out;
}

GradientResult projected_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                                  Eigen::VectorXd x0, const Eigen::VectorXd& lower,
                                  const Eigen::VectorXd& upper, int max_iter, double gtol) {
    auto grad = [&](const Eigen::VectorXd& x, double fx) {
        int n = static_cast<int>(x.size());
        Eigen::VectorXd g(n);
        for (int j = 0; j < n; ++j) {
            double h = 1e-7 * std::max(1.0, std::abs(x(j)));
            Eigen::VectorXd xp = x;
            xp(j) += h;
            Eigen::VectorXd xm = x;
            xm(j) -= h;
            g(j) = (f(xp) - f(xm)) / (2 * h);
        }
        (void)fx;
        return g;
    };
    GradientResult out;
    Eigen::VectorXd x = clamp(x0, lower, upper);
    double fx = f(x);
    Eigen::VectorXd g = grad(x, fx);
    double step = 1e-2;
    Eigen::VectorXd x_prev = x, g_prev = g;
    for (int it = 0; it < max_iter; ++it) {
        Eigen::VectorXd xn = clamp(x - step * g, lower, upper);
        double fn = f(xn);
        int backtracks = 0;
        while (fn > fx && backtracks < 60) {
            step *= 0.5;
            xn = clamp(x - step * g, lower, upper);
            fn = f(xn);
            ++backtracks;
        }
        x_prev = x;
        g_prev = g;
        x = xn;
        fx = fn;
        g = grad(x, fx);
        // projected gradient: zero out components pushing into active bounds
        Eigen::VectorXd pg = g;
        for (int j = 0; j < x.size(); ++j) {
            if (x(j) <= lower(j) + 1e-14 && g(j) > 0) pg(j) = 0;
            if (x(j) >= upper(j) - 1e-14 && g(j) < 0) pg(j) = 0;
        }
        out.projected_grad_norm = pg.norm();
        if (out.projected_grad_norm < gtol) {
            out.converged = true;
            break;
        }
        // Barzilai-Borwein step
        Eigen::VectorXd dx = x - x_prev, dg = g - g_prev;
        double denom = dx.dot(dg);
        if (denom > 1e-300) {
            step = dx.squaredNorm() / denom;
            step = std::min(std::max(step, 1e-10), 1e3);
        }
    }
    out.x = x;
    out.value = fx;
    return out;
}

}  // namespace mrb
