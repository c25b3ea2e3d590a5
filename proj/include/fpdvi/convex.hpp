// Constraint sets with computable Euclidean projections.
//
// Three variants cover the problems the solver ships with: coordinate boxes,
// Euclidean balls, and finite intersections of halfspaces.  Box and ball
// project in closed form; halfspace intersections run Dykstra's cyclic
// scheme, which converges to the exact projection for polyhedra (plain
// cyclic projection would only find *some* feasible point).
//
// A halfspace intersection must be certified nonempty at construction by a
// feasible point; there is no built-in phase-1 solver.

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "fpdvi/errors.hpp"

namespace fpdvi {

// Boxes whose bounds reach this magnitude stand in for unconstrained
// coordinates; the pairing rules in the VI layer treat them as all of R^m.
inline constexpr double kUnboundedBoxThreshold = 1e8;

class ConvexSet {
public:
    enum class Variant { box, ball, halfspaces };

    struct Halfspace {
        Eigen::VectorXd normal; // stored with unit norm
        double offset;          // constraint is normal . u <= offset
    };

    static ConvexSet box(Eigen::VectorXd lower, Eigen::VectorXd upper) {
        if (lower.size() != upper.size() || lower.size() == 0)
            throw DimensionMismatch("box bounds must share a positive dimension");
        for (Eigen::Index i = 0; i < lower.size(); ++i) {
            if (!std::isfinite(lower[i]) || !std::isfinite(upper[i]) ||
                lower[i] > upper[i])
                throw ValidationError("K.box",
                                      "bounds must be finite with lower <= upper");
        }
        ConvexSet s;
        s.variant_ = Variant::box;
        s.dimension_ = static_cast<int>(lower.size());
        s.lower_ = std::move(lower);
        s.upper_ = std::move(upper);
        return s;
    }

    static ConvexSet ball(Eigen::VectorXd center, double radius) {
        if (center.size() == 0 || !center.allFinite())
            throw ValidationError("K.ball", "center must be finite and nonempty");
        if (!(radius > 0.0) || !std::isfinite(radius))
            throw ValidationError("K.ball", "radius must be positive and finite");
        ConvexSet s;
        s.variant_ = Variant::ball;
        s.dimension_ = static_cast<int>(center.size());
        s.center_ = std::move(center);
        s.radius_ = radius;
        return s;
    }

    /// Intersection of {a_i . u <= b_i}.  `interior_point` certifies the set
    /// nonempty; it must satisfy every constraint (boundary allowed to 1e-10).
    static ConvexSet halfspace_intersection(
        std::vector<std::pair<Eigen::VectorXd, double>> constraints,
        Eigen::VectorXd interior_point) {
        if (constraints.empty())
            throw ValidationError("K.halfspaces", "need at least one constraint");
        if (interior_point.size() == 0 || !interior_point.allFinite())
            throw ValidationError("K.halfspaces", "interior point must be finite");
        ConvexSet s;
        s.variant_ = Variant::halfspaces;
        s.dimension_ = static_cast<int>(interior_point.size());
        s.interior_ = std::move(interior_point);
        s.halfspaces_.reserve(constraints.size());
        for (auto& [a, b] : constraints) {
            if (a.size() != s.interior_.size())
                throw DimensionMismatch("halfspace normal dimension mismatch");
            const double nrm = a.norm();
            if (!(nrm > 0.0) || !std::isfinite(nrm) || !std::isfinite(b))
                throw ValidationError("K.halfspaces",
                                      "constraint normals must be finite and nonzero");
            Halfspace h;
            h.normal = a / nrm;
            h.offset = b / nrm;
            if (h.normal.dot(s.interior_) > h.offset + 1e-10)
                throw InfeasibleSet(
                    "claimed interior point violates a halfspace constraint");
            s.halfspaces_.push_back(std::move(h));
        }
        return s;
    }

    Variant variant() const { return variant_; }
    int dimension() const { return dimension_; }
    const Eigen::VectorXd& lower() const { return lower_; }
    const Eigen::VectorXd& upper() const { return upper_; }
    const Eigen::VectorXd& center() const { return center_; }
    double radius() const { return radius_; }
    const std::vector<Halfspace>& halfspaces() const { return halfspaces_; }

    /// Euclidean projection onto the set.
    Eigen::VectorXd project(const Eigen::VectorXd& x) const {
        if (x.size() != dimension_)
            throw DimensionMismatch("projection argument dimension mismatch");
        switch (variant_) {
        case Variant::box: {
            Eigen::VectorXd y = x;
            for (Eigen::Index i = 0; i < y.size(); ++i)
                y[i] = std::clamp(y[i], lower_[i], upper_[i]);
            return y;
        }
        case Variant::ball: {
            const Eigen::VectorXd d = x - center_;
            const double r = d.norm();
            if (r <= radius_) return x;
            return center_ + (radius_ / r) * d;
        }
        case Variant::halfspaces:
            return project_dykstra(x);
        }
        throw UnsupportedVariant("unknown constraint-set variant");
    }

    /// Membership up to tolerance (projection-free checks where closed form
    /// exists; halfspaces test every constraint directly).
    bool contains(const Eigen::VectorXd& x, double tol = 1e-9) const {
        if (x.size() != dimension_) return false;
        switch (variant_) {
        case Variant::box:
            for (Eigen::Index i = 0; i < x.size(); ++i)
                if (x[i] < lower_[i] - tol || x[i] > upper_[i] + tol) return false;
            return true;
        case Variant::ball:
            return (x - center_).norm() <= radius_ + tol;
        case Variant::halfspaces:
            for (const auto& h : halfspaces_)
                if (h.normal.dot(x) > h.offset + tol) return false;
            return true;
        }
        return false;
    }

    /// True when the set is (numerically) bounded.  Boxes compare bounds
    /// against the unbounded-surrogate threshold; balls are always bounded;
    /// halfspace intersections are probed by projecting far points along
    /// the +/- coordinate directions (a diagnostic, not a proof).
    bool is_bounded() const {
        switch (variant_) {
        case Variant::box:
            for (Eigen::Index i = 0; i < lower_.size(); ++i)
                if (std::abs(lower_[i]) >= kUnboundedBoxThreshold ||
                    std::abs(upper_[i]) >= kUnboundedBoxThreshold)
                    return false;
            return true;
        case Variant::ball:
            return true;
        case Variant::halfspaces: {
            const double far = 1e7;
            for (int i = 0; i < dimension_; ++i) {
                for (double sign : {1.0, -1.0}) {
                    Eigen::VectorXd probe = interior_;
                    probe[i] += sign * far;
                    if ((project(probe) - interior_).norm() > 1e6) return false;
                }
            }
            return true;
        }
        }
        return false;
    }

    /// Treats the set as an unconstrained surrogate: a box whose every bound
    /// reaches the threshold magnitude.  The VI pairing rules use this to
    /// allow any proximal term when the projection is effectively identity.
    bool is_unbounded_box_surrogate() const {
        if (variant_ != Variant::box) return false;
        for (Eigen::Index i = 0; i < lower_.size(); ++i)
            if (lower_[i] > -kUnboundedBoxThreshold ||
                upper_[i] < kUnboundedBoxThreshold)
                return false;
        return true;
    }

private:
    // Dykstra's algorithm: cyclic halfspace projections with per-constraint
    // correction terms.  Unlike plain cyclic projection, the corrections make
    // the limit the exact Euclidean projection.  Terminates when both the
    // worst constraint violation and the displacement over a full cycle drop
    // below kDykstraResidual (scaled by the iterate size).
    Eigen::VectorXd project_dykstra(const Eigen::VectorXd& x) const {
        static constexpr double kDykstraResidual = 1e-12;
        static constexpr double kStallFloor = 1e-9;
        static constexpr int kMaxCycles = 50000;

        const std::size_t mcon = halfspaces_.size();
        Eigen::VectorXd u = x;
        std::vector<Eigen::VectorXd> correction(
            mcon, Eigen::VectorXd::Zero(dimension_));

        const double scale = 1.0 + x.norm();
        double residual = std::numeric_limits<double>::infinity();
        for (int cycle = 0; cycle < kMaxCycles; ++cycle) {
            const Eigen::VectorXd u_prev = u;
            for (std::size_t i = 0; i < mcon; ++i) {
                const Halfspace& h = halfspaces_[i];
                const Eigen::VectorXd y = u + correction[i];
                const double viol = h.normal.dot(y) - h.offset;
                if (viol > 0.0)
                    u = y - viol * h.normal;
                else
                    u = y;
                correction[i] = y - u;
            }
            double worst = 0.0;
            for (const auto& h : halfspaces_)
                worst = std::max(worst, h.normal.dot(u) - h.offset);
            const double moved = (u - u_prev).norm();
            residual = std::max(worst, moved);
            if (residual <= kDykstraResidual * scale) return u;
            // A stalled iterate that still violates a constraint means the
            // description is inconsistent with its certificate.
            if (moved < 1e-15 * scale && worst > kStallFloor * scale)
                throw InfeasibleSet(
                    "cyclic projection stalled above its residual floor");
        }
        if (residual > kStallFloor * scale)
            throw InfeasibleSet("cyclic projection failed to converge");
        return u; // converged past the hard floor, short of the target: accept
    }

    Variant variant_ = Variant::box;
    int dimension_ = 0;
    Eigen::VectorXd lower_, upper_;   // box
    Eigen::VectorXd center_;          // ball
    double radius_ = 0.0;             // ball
    std::vector<Halfspace> halfspaces_;
    Eigen::VectorXd interior_;        // feasibility certificate
};

/// Euclidean projection onto K (free-function spelling of the member).
inline Eigen::VectorXd project(const ConvexSet& K, const Eigen::VectorXd& x) {
    return K.project(x);
}

} // namespace fpdvi
