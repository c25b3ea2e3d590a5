// Problem definition for the nonlocal fractional evolution coupled to a
// variational inequality:
//
//     D^alpha theta(xi) = A theta(xi) + B(xi, theta) u(xi) + f(xi, theta)
//     u(xi) solves VI(K, g(xi, theta(xi)) + G(.), phi)
//     theta(0)          = h(theta)          (nonlocal initial condition)
//
// with D^alpha the Caputo derivative of order alpha in (0, 1].  The data
// maps B, f, g are black-box callables over (xi, theta); h sees the whole
// sampled state path so that genuinely nonlocal conditions (terminal values,
// path averages) are expressible.

#pragma once

#include <cmath>
#include <functional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "fpdvi/convex.hpp"
#include "fpdvi/errors.hpp"
#include "fpdvi/grid.hpp"
#include "fpdvi/mittag_leffler.hpp"
#include "fpdvi/monotone.hpp"
#include "fpdvi/prox.hpp"
#include "fpdvi/random.hpp"
#include "fpdvi/vi.hpp"

namespace fpdvi {

struct FPDVIProblem {
    double alpha = 0.5;
    double T = 1.0;
    GeneratorMatrix A{Eigen::MatrixXd::Zero(1, 1)};
    std::function<Eigen::MatrixXd(double, const Eigen::VectorXd&)> B;
    std::function<Eigen::VectorXd(double, const Eigen::VectorXd&)> f;
    std::function<Eigen::VectorXd(double, const Eigen::VectorXd&)> g;
    std::function<Eigen::VectorXd(const SampledPath&)> h;
    ConvexSet K = ConvexSet::box(-Eigen::VectorXd::Ones(1), Eigen::VectorXd::Ones(1));
    MonotoneMap G =
        MonotoneMap::affine(Eigen::MatrixXd::Identity(1, 1), Eigen::VectorXd::Zero(1));
    ConvexFunction phi = ConvexFunction::zero();

    int state_dimension() const { return static_cast<int>(A.size()); }
    int control_dimension() const { return K.dimension(); }

    /// Structural validation plus a light seeded finiteness probe of the data
    /// maps over [0, T] x ball(0, probe_radius).  Dimension mismatches in
    /// black-box maps only surface on evaluation, so the probe evaluates.
    void check(double probe_radius = 10.0, int probe_samples = 8) const {
        if (!(alpha > 0.0) || !(alpha <= 1.0) || !std::isfinite(alpha))
            throw ValidationError("alpha", "order must lie in (0,1]");
        if (!(T > 0.0) || !std::isfinite(T))
            throw ValidationError("T", "horizon must be positive and finite");
        if (!B || !f || !g || !h)
            throw ValidationError("maps", "B, f, g, h must all be supplied");

        const int n = state_dimension();
        const int m = control_dimension();
        if (G.dimension() != m || !phi.dimension_matches(m))
            throw DimensionMismatch("VI block dimensions disagree with K");
        // Pairing rule for the composite prox step, checked once up front.
        VIProblem{K, Eigen::VectorXd::Zero(m), G, phi}.check();

        DeterministicRng rng(0xda7a);
        for (int s = 0; s < probe_samples; ++s) {
            const double xi = T * rng.uniform();
            const Eigen::VectorXd theta = rng.ball_vector(n, probe_radius);
            const Eigen::MatrixXd Bv = B(xi, theta);
            if (Bv.rows() != n || Bv.cols() != m)
                throw ValidationError("B", "map must return an n x m matrix");
            if (!Bv.allFinite())
                throw ValidationError("B", "map returned non-finite values");
            const Eigen::VectorXd fv = f(xi, theta);
            if (fv.size() != n)
                throw ValidationError("f", "map must return an n-vector");
            if (!fv.allFinite())
                throw ValidationError("f", "map returned non-finite values");
            const Eigen::VectorXd gv = g(xi, theta);
            if (gv.size() != m)
                throw ValidationError("g", "map must return an m-vector");
            if (!gv.allFinite())
                throw ValidationError("g", "map returned non-finite values");
        }
    }
};

/// Discrete mild trajectory: state and control, one value per grid node.
struct Trajectory {
    TimeGrid grid;
    std::vector<Eigen::VectorXd> theta;
    std::vector<Eigen::VectorXd> u;

    SampledPath state_path() const { return SampledPath{grid, theta}; }

    /// Structural checks plus control feasibility u(xi_i) in K to 1e-9.
    void check(const FPDVIProblem& problem) const {
        grid.check();
        if (theta.size() != grid.nodes.size() || u.size() != grid.nodes.size())
            throw DimensionMismatch("trajectory must hold one state and one "
                                    "control per node");
        for (std::size_t i = 0; i < theta.size(); ++i) {
            if (theta[i].size() != problem.state_dimension() ||
                u[i].size() != problem.control_dimension())
                throw DimensionMismatch("trajectory value dimensions disagree "
                                        "with the problem");
            if (!theta[i].allFinite() || !u[i].allFinite())
                throw ValidationError("trajectory", "non-finite trajectory values");
            if ((u[i] - problem.K.project(u[i])).norm() > 1e-9)
                throw ValidationError("trajectory",
                                      "control leaves the constraint set");
        }
    }
};

} // namespace fpdvi
