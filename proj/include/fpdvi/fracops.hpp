// Discrete fractional calculus on time grids: left-sided Riemann-Liouville
// integration and Caputo (L1-type) differentiation, by product integration.
//
// The sampled path is reconstructed piecewise-linearly and the weakly
// singular kernel (xi - s)^{alpha-1} is integrated against that interpolant
// in closed form, so both operators are exact (to roundoff) on piecewise
// linear data.  That exactness is what makes manufactured-solution tests and
// the residual certificate sharp.

#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "fpdvi/errors.hpp"
#include "fpdvi/grid.hpp"
#include "fpdvi/problem.hpp"
#include "fpdvi/special.hpp"

namespace fpdvi {

/// Left-sided fractional integral of order alpha in (0, 1]:
///   (I^alpha phi)(xi_i) = (1/Gamma(alpha)) int_0^{xi_i} (xi_i-s)^{alpha-1} phi(s) ds
/// with phi the piecewise-linear interpolant of the samples.  Node 0 maps
/// to zero (empty integration range).
inline SampledPath rl_integral(double alpha, const SampledPath& path) {
    if (!(alpha > 0.0) || !(alpha <= 1.0) || !std::isfinite(alpha))
        throw InvalidOrder("rl_integral: order must lie in (0,1]");
    path.check();

    const auto& xi = path.grid.nodes;
    const std::size_t count = xi.size();
    const Eigen::Index dim = path.values[0].size();
    const double inv_gamma = 1.0 / gamma_fn(alpha);

    SampledPath out;
    out.grid = path.grid;
    out.values.assign(count, Eigen::VectorXd::Zero(dim));
    for (std::size_t i = 1; i < count; ++i) {
        Eigen::VectorXd acc = Eigen::VectorXd::Zero(dim);
        for (std::size_t j = 0; j < i; ++j) {
            // Kernel moments over [xi_j, xi_{j+1}] in the variable
            // t = xi_i - s, which runs from a down to b.
            const double a = xi[i] - xi[j];
            const double b = xi[i] - xi[j + 1];
            const double w0 = (std::pow(a, alpha) - std::pow(b, alpha)) / alpha;
            const double w1 =
                (std::pow(a, alpha + 1.0) - std::pow(b, alpha + 1.0)) / (alpha + 1.0);
            const Eigen::VectorXd slope =
                (path.values[j + 1] - path.values[j]) / (a - b);
            acc += path.values[j] * w0 + slope * (a * w0 - w1);
        }
        out.values[i] = inv_gamma * acc;
    }
    return out;
}

/// Caputo derivative of order alpha in (0, 1) by the L1 scheme: the
/// composition I^{1-alpha} d/dxi with the difference quotients of the
/// piecewise-linear reconstruction.  Defined at nodes 1..N; slot 0 of the
/// result is zero by convention (the operator has no value there).
inline SampledPath caputo_derivative(double alpha, const SampledPath& path) {
    if (!(alpha > 0.0) || !(alpha < 1.0) || !std::isfinite(alpha))
        throw InvalidOrder(
            "caputo_derivative: order must lie strictly inside (0,1); "
            "order 1 is plain differencing and has no L1 weights");
    path.check();

    const auto& xi = path.grid.nodes;
    const std::size_t count = xi.size();
    const Eigen::Index dim = path.values[0].size();
    const double inv_gamma2 = 1.0 / gamma_fn(2.0 - alpha);

    SampledPath out;
    out.grid = path.grid;
    out.values.assign(count, Eigen::VectorXd::Zero(dim));
    for (std::size_t i = 1; i < count; ++i) {
        Eigen::VectorXd acc = Eigen::VectorXd::Zero(dim);
        for (std::size_t j = 0; j < i; ++j) {
            const double a = xi[i] - xi[j];
            const double b = xi[i] - xi[j + 1];
            const double kernel =
                std::pow(a, 1.0 - alpha) - std::pow(b, 1.0 - alpha);
            acc += (path.values[j + 1] - path.values[j]) * (kernel / (a - b));
        }
        out.values[i] = inv_gamma2 * acc;
    }
    return out;
}

/// Strong-form defect of a trajectory against the evolution system:
///   max_i | D^alpha theta(xi_i) - A theta - B(xi_i, theta) u - f(xi_i, theta) |
/// over nodes i >= ceil(0.05 N).  The early nodes are excluded because the
/// Caputo residual of a genuine mild solution is polluted by the xi^alpha
/// boundary layer there.  For alpha = 1 the derivative is the backward
/// difference quotient.
inline double fpdvi_residual(const FPDVIProblem& problem, const Trajectory& traj) {
    traj.check(problem);
    const auto& xi = traj.grid.nodes;
    if (std::abs(traj.grid.horizon() - problem.T) >
        1e-9 * std::max(1.0, problem.T))
        throw GridMismatch("trajectory grid horizon disagrees with the problem");

    const std::size_t count = xi.size();
    SampledPath deriv;
    if (problem.alpha < 1.0) {
        deriv = caputo_derivative(problem.alpha, traj.state_path());
    } else {
        deriv.grid = traj.grid;
        deriv.values.assign(count, Eigen::VectorXd::Zero(traj.theta[0].size()));
        for (std::size_t i = 1; i < count; ++i)
            deriv.values[i] =
                (traj.theta[i] - traj.theta[i - 1]) / (xi[i] - xi[i - 1]);
    }

    const std::size_t first = std::max<std::size_t>(
        1, static_cast<std::size_t>(
               std::ceil(0.05 * static_cast<double>(count - 1))));
    double worst = 0.0;
    for (std::size_t i = first; i < count; ++i) {
        const Eigen::VectorXd defect =
            deriv.values[i] - problem.A.entries() * traj.theta[i] -
            problem.B(xi[i], traj.theta[i]) * traj.u[i] -
            problem.f(xi[i], traj.theta[i]);
        worst = std::max(worst, defect.norm());
    }
    return worst;
}

} // namespace fpdvi
