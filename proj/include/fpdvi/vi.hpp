// Mixed variational inequality solver.
//
// Problem: find u in K with  <w + G(u), v - u> + phi(v) - phi(u) >= 0  for
// all v in K.  The solver is the extragradient scheme with a composite
// prox-after-projection step,
//
//     u+      = prox_{lambda phi}( proj_K( u - lambda (w + G(u)) ) )
//
// applied twice per iteration (predictor/corrector), with the step size
// backtracked on the local Lipschitz test  lambda |G(u+) - G(u)| <=
// 0.9 |u+ - u|.  The composite step equals the exact resolvent of
// phi + indicator(K) only for pairings where the two factor: separable phi
// with a box, zero phi with anything, or an effectively unconstrained box.
// Problem validation rejects everything else, which is what keeps the
// natural-residual certificate meaningful.

#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "fpdvi/convex.hpp"
#include "fpdvi/errors.hpp"
#include "fpdvi/monotone.hpp"
#include "fpdvi/prox.hpp"
#include "fpdvi/random.hpp"

namespace fpdvi {

struct VIProblem {
    ConvexSet K;
    Eigen::VectorXd w; // affine shift; the slot g(xi, theta(xi)) feeds
    MonotoneMap G;
    ConvexFunction phi;

    void check() const {
        const int m = K.dimension();
        if (w.size() != m || G.dimension() != m || !phi.dimension_matches(m))
            throw DimensionMismatch("VI problem dimensions disagree with K");
        if (!w.allFinite())
            throw ValidationError("vi.w", "shift must be finite");
        // Pairing rule: composite prox-after-projection must be exact.
        const bool ok = phi.variant() == ConvexFunction::Variant::zero ||
                        (phi.is_separable() &&
                         K.variant() == ConvexSet::Variant::box) ||
                        K.is_unbounded_box_surrogate();
        if (!ok)
            throw UnsupportedCombination(
                "composite prox-after-projection step is not exact for this "
                "(constraint set, nonsmooth term) pairing");
    }
};

struct VIResult {
    Eigen::VectorXd u;
    double residual = 0.0;
    int iterations = 0;
    bool converged = false;
    double lambda_final = 0.0;
};

namespace detail {

// One composite forward step at step size lambda.
inline Eigen::VectorXd vi_step(const VIProblem& p, const Eigen::VectorXd& u,
                               const Eigen::VectorXd& flow, double lambda) {
    return p.phi.prox(lambda, p.K.project(u - lambda * flow));
}

} // namespace detail

/// Fixed-point residual  |u - prox_phi(proj_K(u - (w + G(u))))|  at the
/// reference step size 1.  Zero exactly at solutions of the discretized VI.
inline double natural_residual(const VIProblem& p, const Eigen::VectorXd& u) {
    if (u.size() != p.K.dimension())
        throw DimensionMismatch("natural_residual argument dimension mismatch");
    const Eigen::VectorXd flow = p.w + p.G(u);
    return (u - detail::vi_step(p, u, flow, 1.0)).norm();
}

/// Extragradient iteration.  Returns the best iterate found; `converged`
/// distinguishes a met tolerance from an exhausted budget (the budget case
/// is a soft outcome, not an exception).  `iterate_log`, when supplied,
/// receives every accepted iterate (used by convergence-monotonicity tests).
inline VIResult solve_vi(const VIProblem& p, double tol, int max_iter,
                         std::optional<Eigen::VectorXd> warm_start = std::nullopt,
                         std::vector<Eigen::VectorXd>* iterate_log = nullptr) {
    p.check();
    if (!(tol >= 1e-14))
        throw InvalidOrder("solve_vi: tolerance must be >= 1e-14");
    if (max_iter < 1)
        throw InvalidOrder("solve_vi: iteration budget must be positive");

    const double lambda0 = 1.0 / std::max(p.G.lipschitz(), 1.0);
    double lambda = lambda0;

    Eigen::VectorXd u =
        warm_start ? *warm_start : p.K.project(Eigen::VectorXd::Zero(p.K.dimension()));
    if (iterate_log) iterate_log->push_back(u);

    VIResult best;
    best.u = u;
    best.residual = natural_residual(p, u);
    best.lambda_final = lambda;
    if (best.residual <= tol) {
        best.converged = true;
        return best;
    }

    for (int k = 1; k <= max_iter; ++k) {
        const Eigen::VectorXd gu = p.G(u);
        const Eigen::VectorXd flow = p.w + gu;

        // Backtrack lambda until the local Lipschitz test accepts the
        // predictor; collapse of lambda means G is not monotone-Lipschitz
        // at this scale.
        Eigen::VectorXd u_half;
        Eigen::VectorXd g_half;
        for (;;) {
            u_half = detail::vi_step(p, u, flow, lambda);
            g_half = p.G(u_half);
            if (lambda * (g_half - gu).norm() <= 0.9 * (u_half - u).norm())
                break;
            lambda *= 0.5;
            if (lambda < 1e-12)
                throw NonMonotoneDetected(
                    "extragradient step size collapsed below 1e-12");
        }

        u = detail::vi_step(p, u, p.w + g_half, lambda);
        if (iterate_log) iterate_log->push_back(u);

        const double res = natural_residual(p, u);
        if (res < best.residual) {
            best.u = u;
            best.residual = res;
        }
        best.iterations = k;
        best.lambda_final = lambda;
        if (res <= tol) {
            best.u = u;
            best.residual = res;
            best.converged = true;
            return best;
        }
        // Gentle recovery so one conservative backtrack does not throttle
        // the entire run.
        lambda = std::min(lambda * 1.05, lambda0);
    }
    return best;
}

/// Deterministic selection from the solution set: solve with the strictly
/// monotone regularization G + eps I (eps = 1e-8), then polish the
/// unregularized problem warm-started from that point.  The regularized
/// limit is the minimal-norm solution; the finite iteration returns a
/// reproducible approximation of it (see the module notes on flat solution
/// sets).  An optional warm start accelerates repeated selections along a
/// slowly varying shift (the per-node pattern of the evolution solver);
/// identical inputs, warm start included, give bitwise-identical outputs.
inline Eigen::VectorXd select_control(
    const ConvexSet& K, const MonotoneMap& G, const ConvexFunction& phi,
    const Eigen::VectorXd& g_value, double tol = 1e-10, int max_iter = 200000,
    std::optional<Eigen::VectorXd> warm_start = std::nullopt) {
    if (!g_value.allFinite())
        throw ValidationError("vi.w", "selection shift must be finite");
    static constexpr double kTikhonovEps = 1e-8;

    // Any point of the true solution set satisfies the regularized VI to
    // O(eps |u|); demanding more of stage one would spin the budget on flat
    // directions the polish stage does not need resolved.
    const double tol_reg = std::max(tol, 2.0 * kTikhonovEps * (1.0 + g_value.norm()));
    VIProblem regularized{K, g_value, G.tikhonov(kTikhonovEps), phi};
    const VIResult stage1 = solve_vi(regularized, tol_reg, max_iter, warm_start);

    VIProblem full{K, g_value, G, phi};
    const VIResult stage2 = solve_vi(full, tol, max_iter, stage1.u);
    return stage2.u;
}

/// Empirical solution-norm bound: max |select_control| over seeded draws of
/// the shift w uniform in the ball |w| <= n.  A lower estimate of the true
/// bound; reports must flag it as empirical.  Draws are a fixed sequence, so
/// enlarging sample_count only extends the max over a superset.
inline double sol_bound(const ConvexSet& K, const MonotoneMap& G,
                        const ConvexFunction& phi, double n, int sample_count,
                        std::uint64_t seed = 0x501b0d) {
    if (!(n > 0.0))
        throw InvalidOrder("sol_bound: shift magnitude must be positive");
    if (sample_count < 10)
        throw InvalidOrder("sol_bound: need at least 10 samples");
    DeterministicRng rng(seed);
    double bound = 0.0;
    for (int s = 0; s < sample_count; ++s) {
        const Eigen::VectorXd w = rng.ball_vector(K.dimension(), n);
        bound = std::max(bound, select_control(K, G, phi, w, 1e-8, 50000).norm());
    }
    return bound;
}

} // namespace fpdvi
