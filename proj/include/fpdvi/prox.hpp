// Nonsmooth convex terms with closed-form proximal maps.
//
// The catalog is closed on purpose: every variant ships a prox rule that is
// exact (no inner iteration), which is what keeps the VI residual
// certificate honest.  Values are anchored so phi(0) = 0 for every variant;
// only differences of phi enter the variational inequality, so the anchor is
// a convention, but a fixed one makes reports comparable.

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "fpdvi/errors.hpp"

namespace fpdvi {

/// One convex piecewise-linear coordinate function: slopes[i] applies on
/// (breakpoints[i-1], breakpoints[i]) with the outer intervals unbounded.
/// Convexity = nondecreasing slopes, enforced at construction.
struct PiecewiseLinear1D {
    std::vector<double> breakpoints; // strictly increasing
    std::vector<double> slopes;      // size = breakpoints.size() + 1
};

class ConvexFunction {
public:
    enum class Variant { zero, weighted_l1, quadratic, separable_pwl };

    static ConvexFunction zero() {
        ConvexFunction f;
        f.variant_ = Variant::zero;
        f.dimension_ = 0; // matches any dimension
        return f;
    }

    static ConvexFunction weighted_l1(Eigen::VectorXd weights) {
        if (weights.size() == 0 || !weights.allFinite() || weights.minCoeff() < 0.0)
            throw ValidationError("phi.weighted_l1",
                                  "weights must be finite and nonnegative");
        ConvexFunction f;
        f.variant_ = Variant::weighted_l1;
        f.dimension_ = static_cast<int>(weights.size());
        f.weights_ = std::move(weights);
        return f;
    }

    /// phi(x) = x'Px/2 + r'x with P symmetric positive semidefinite.
    static ConvexFunction quadratic(Eigen::MatrixXd P, Eigen::VectorXd r) {
        if (P.rows() != P.cols() || P.rows() == 0 || r.size() != P.rows())
            throw DimensionMismatch("quadratic term needs square P and matching r");
        if (!P.allFinite() || !r.allFinite())
            throw ValidationError("phi.quadratic", "P and r must be finite");
        const double asym = (P - P.transpose()).cwiseAbs().maxCoeff();
        if (asym > 1e-12 * (1.0 + P.cwiseAbs().maxCoeff()))
            throw ValidationError("phi.quadratic", "P must be symmetric");
        Eigen::MatrixXd Ps = 0.5 * (P + P.transpose());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Ps);
        if (es.eigenvalues().minCoeff() < -1e-10)
            throw ValidationError("phi.quadratic", "P must be positive semidefinite");
        ConvexFunction f;
        f.variant_ = Variant::quadratic;
        f.dimension_ = static_cast<int>(Ps.rows());
        f.P_ = std::move(Ps);
        f.r_ = std::move(r);
        return f;
    }

    static ConvexFunction separable_pwl(std::vector<PiecewiseLinear1D> pieces) {
        if (pieces.empty())
            throw ValidationError("phi.separable_pwl", "need at least one coordinate");
        for (const auto& p : pieces) {
            if (p.slopes.size() != p.breakpoints.size() + 1)
                throw ValidationError("phi.separable_pwl",
                                      "need breakpoints + 1 slopes per coordinate");
            for (std::size_t i = 0; i + 1 < p.breakpoints.size(); ++i)
                if (!(p.breakpoints[i] < p.breakpoints[i + 1]))
                    throw ValidationError("phi.separable_pwl",
                                          "breakpoints must increase strictly");
            for (const double b : p.breakpoints)
                if (!std::isfinite(b))
                    throw ValidationError("phi.separable_pwl",
                                          "breakpoints must be finite");
            for (std::size_t i = 0; i + 1 < p.slopes.size(); ++i)
                if (!(p.slopes[i] <= p.slopes[i + 1]))
                    throw ValidationError("phi.separable_pwl",
                                          "slopes must be nondecreasing (convexity)");
            for (const double s : p.slopes)
                if (!std::isfinite(s))
                    throw ValidationError("phi.separable_pwl", "slopes must be finite");
        }
        ConvexFunction f;
        f.variant_ = Variant::separable_pwl;
        f.dimension_ = static_cast<int>(pieces.size());
        f.pieces_ = std::move(pieces);
        return f;
    }

    Variant variant() const { return variant_; }

    /// 0 means "any dimension" (the zero function is shapeless).
    int dimension() const { return dimension_; }
    bool dimension_matches(int m) const {
        return variant_ == Variant::zero || dimension_ == m;
    }

    /// Separable variants admit the composite prox-after-projection step onto
    /// boxes; a quadratic counts only when P is diagonal.
    bool is_separable() const {
        switch (variant_) {
        case Variant::zero:
        case Variant::weighted_l1:
        case Variant::separable_pwl:
            return true;
        case Variant::quadratic:
            return P_.isDiagonal(0.0);
        }
        return false;
    }

    double value(const Eigen::VectorXd& x) const {
        check_arg(x);
        switch (variant_) {
        case Variant::zero:
            return 0.0;
        case Variant::weighted_l1:
            return weights_.dot(x.cwiseAbs());
        case Variant::quadratic:
            return 0.5 * x.dot(P_ * x) + r_.dot(x);
        case Variant::separable_pwl: {
            double acc = 0.0;
            for (std::size_t i = 0; i < pieces_.size(); ++i)
                acc += pwl_value(pieces_[i], x[static_cast<Eigen::Index>(i)]);
            return acc;
        }
        }
        throw UnsupportedVariant("unknown convex-function variant");
    }

    /// prox_{lambda phi}(x) = argmin_y phi(y) + |y - x|^2 / (2 lambda).
    Eigen::VectorXd prox(double lambda, const Eigen::VectorXd& x) const {
        if (!(lambda > 0.0))
            throw InvalidOrder("prox: step must be positive");
        check_arg(x);
        switch (variant_) {
        case Variant::zero:
            return x;
        case Variant::weighted_l1: {
            Eigen::VectorXd y(x.size());
            for (Eigen::Index i = 0; i < x.size(); ++i) {
                const double t = lambda * weights_[i];
                y[i] = std::copysign(std::max(std::abs(x[i]) - t, 0.0), x[i]);
            }
            return y;
        }
        case Variant::quadratic: {
            // (I + lambda P) y = x - lambda r; I + lambda P is SPD.
            Eigen::MatrixXd M =
                Eigen::MatrixXd::Identity(dimension_, dimension_) + lambda * P_;
            return M.ldlt().solve(x - lambda * r_);
        }
        case Variant::separable_pwl: {
            Eigen::VectorXd y(x.size());
            for (Eigen::Index i = 0; i < x.size(); ++i)
                y[i] = pwl_prox(pieces_[static_cast<std::size_t>(i)], lambda, x[i]);
            return y;
        }
        }
        throw UnsupportedVariant("unknown convex-function variant");
    }

private:
    void check_arg(const Eigen::VectorXd& x) const {
        if (!dimension_matches(static_cast<int>(x.size())))
            throw DimensionMismatch("convex-function argument dimension mismatch");
    }

    // Integral of the slope function from 0 to t (anchors phi(0) = 0).
    static double pwl_value(const PiecewiseLinear1D& f, double t) {
        if (t == 0.0) return 0.0;
        const double a = std::min(0.0, t);
        const double b = std::max(0.0, t);
        double acc = 0.0;
        const std::size_t p = f.breakpoints.size();
        for (std::size_t i = 0; i <= p; ++i) {
            const double lo = (i == 0) ? -std::numeric_limits<double>::infinity()
                                       : f.breakpoints[i - 1];
            const double hi = (i == p) ? std::numeric_limits<double>::infinity()
                                       : f.breakpoints[i];
            const double seg_lo = std::max(lo, a);
            const double seg_hi = std::min(hi, b);
            if (seg_hi > seg_lo) acc += f.slopes[i] * (seg_hi - seg_lo);
        }
        return t > 0.0 ? acc : -acc;
    }

    // Solve (x - t)/lambda in subdifferential(f)(t).  The map t + lambda s(t)
    // is nondecreasing, so walking the intervals in order finds the unique
    // root: either an interior stationary point or the breakpoint where the
    // subdifferential jumps across the target slope.
    static double pwl_prox(const PiecewiseLinear1D& f, double lambda, double x) {
        const std::size_t p = f.breakpoints.size();
        for (std::size_t i = 0; i <= p; ++i) {
            const double lo = (i == 0) ? -std::numeric_limits<double>::infinity()
                                       : f.breakpoints[i - 1];
            const double hi = (i == p) ? std::numeric_limits<double>::infinity()
                                       : f.breakpoints[i];
            const double t = x - lambda * f.slopes[i];
            if (t < lo) return lo; // jumped past: the breakpoint absorbs it
            if (t <= hi) return t;
        }
        return f.breakpoints.back(); // unreachable: last interval is unbounded
    }

    Variant variant_ = Variant::zero;
    int dimension_ = 0;
    Eigen::VectorXd weights_;            // weighted_l1
    Eigen::MatrixXd P_;                  // quadratic
    Eigen::VectorXd r_;                  // quadratic
    std::vector<PiecewiseLinear1D> pieces_; // separable_pwl
};

/// Free-function spelling: prox_{lambda phi}(x).
inline Eigen::VectorXd prox(const ConvexFunction& phi, double lambda,
                            const Eigen::VectorXd& x) {
    return phi.prox(lambda, x);
}

} // namespace fpdvi
