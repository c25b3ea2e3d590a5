// Monotone maps G for the variational inequality layer.
//
// Affine maps M u + q are certified monotone at construction through the
// symmetric part (eigenvalues of (M + M') / 2 above -1e-10).  Black-box
// callables cannot be certified, so construction runs a seeded sampling
// probe: <G(v) - G(u), v - u> on random pairs.  The probe rejects obvious
// non-monotonicity; it proves nothing, and the solver's step-size
// backtracking still guards against maps that slip through.

#pragma once

#include <cmath>
#include <functional>
#include <utility>

#include <Eigen/Dense>

#include "fpdvi/errors.hpp"
#include "fpdvi/random.hpp"

namespace fpdvi {

class MonotoneMap {
public:
    enum class Variant { affine, callable };
    using Fn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

    static MonotoneMap affine(Eigen::MatrixXd M, Eigen::VectorXd q) {
        if (M.rows() != M.cols() || M.rows() == 0 || q.size() != M.rows())
            throw DimensionMismatch("affine map needs square M and matching q");
        if (!M.allFinite() || !q.allFinite())
            throw ValidationError("G.affine", "M and q must be finite");
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (M + M.transpose()));
        if (es.eigenvalues().minCoeff() < -1e-10)
            throw NonMonotoneDetected(
                "affine map has an indefinite symmetric part");
        MonotoneMap g;
        g.variant_ = Variant::affine;
        g.dimension_ = static_cast<int>(M.rows());
        g.lipschitz_ = M.jacobiSvd().singularValues()(0);
        g.M_ = std::move(M);
        g.q_ = std::move(q);
        return g;
    }

    /// Black-box map with a caller-supplied Lipschitz estimate (used only to
    /// size the initial extragradient step; backtracking corrects it).
    static MonotoneMap callable(Fn fn, int dimension, double lipschitz_estimate,
                                std::uint64_t probe_seed = 0x6d6f6e6f) {
        if (!fn) throw ValidationError("G.callable", "missing evaluation function");
        if (dimension < 1)
            throw ValidationError("G.callable", "dimension must be positive");
        if (!(lipschitz_estimate >= 0.0) || !std::isfinite(lipschitz_estimate))
            throw ValidationError("G.callable",
                                  "Lipschitz estimate must be finite and >= 0");
        MonotoneMap g;
        g.variant_ = Variant::callable;
        g.dimension_ = dimension;
        g.lipschitz_ = lipschitz_estimate;
        g.fn_ = std::move(fn);

        // Sampling probe, not a proof: random pairs at unit scale.
        DeterministicRng rng(probe_seed);
        for (int k = 0; k < 64; ++k) {
            const Eigen::VectorXd u = rng.gaussian_vector(dimension);
            const Eigen::VectorXd v = rng.gaussian_vector(dimension);
            const double inner = (g(v) - g(u)).dot(v - u);
            if (inner < -1e-10)
                throw NonMonotoneDetected(
                    "sampled monotonicity violated at construction");
        }
        return g;
    }

    Variant variant() const { return variant_; }
    int dimension() const { return dimension_; }
    double lipschitz() const { return lipschitz_; }

    const Eigen::MatrixXd& affine_matrix() const {
        require(Variant::affine);
        return M_;
    }
    const Eigen::VectorXd& affine_shift() const {
        require(Variant::affine);
        return q_;
    }

    Eigen::VectorXd operator()(const Eigen::VectorXd& u) const {
        if (u.size() != dimension_)
            throw DimensionMismatch("monotone-map argument dimension mismatch");
        Eigen::VectorXd y =
            variant_ == Variant::affine ? Eigen::VectorXd(M_ * u + q_) : fn_(u);
        if (y.size() != dimension_)
            throw DimensionMismatch("monotone-map returned wrong dimension");
        if (!y.allFinite())
            throw ValidationError("G", "map returned non-finite values");
        return y;
    }

    /// G + eps I: the strictly monotone regularization used by the canonical
    /// selection rule.  Skips the construction probe (monotonicity only
    /// improves under the shift).
    MonotoneMap tikhonov(double eps) const {
        if (!(eps > 0.0)) throw InvalidOrder("tikhonov: shift must be positive");
        MonotoneMap g;
        g.variant_ = variant_;
        g.dimension_ = dimension_;
        g.lipschitz_ = lipschitz_ + eps;
        if (variant_ == Variant::affine) {
            g.M_ = M_ + eps * Eigen::MatrixXd::Identity(dimension_, dimension_);
            g.q_ = q_;
        } else {
            g.fn_ = [base = fn_, eps](const Eigen::VectorXd& u) {
                return Eigen::VectorXd(base(u) + eps * u);
            };
        }
        return g;
    }

private:
    void require(Variant v) const {
        if (variant_ != v)
            throw UnsupportedVariant("accessor does not match map variant");
    }

    Variant variant_ = Variant::affine;
    int dimension_ = 0;
    double lipschitz_ = 0.0;
    Eigen::MatrixXd M_;
    Eigen::VectorXd q_;
    Fn fn_;
};

} // namespace fpdvi
