// Deterministic sampling for probes and empirical bounds.
//
// Reproducibility of pass/fail verdicts is a contract here: every randomized
// probe records its seed, and re-running with that seed must reproduce the
// verdict bitwise.  std::normal_distribution leaves its algorithm to the
// implementation, so we roll the generator and the Gaussian transform by
// hand: splitmix64 for bits (public-domain mixer, passes BigCrush when used
// as a stream) and Box-Muller for shape.  Quality requirements are mild --
// these streams feed Monte-Carlo probes, not cryptography.

#pragma once

#include <cmath>
#include <cstdint>

#include <Eigen/Dense>

namespace fpdvi {

class DeterministicRng {
public:
    explicit DeterministicRng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_bits() {
        // splitmix64 step.
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1).
    double uniform() {
        return static_cast<double>(next_bits() >> 11) * 0x1.0p-53;
    }

    /// Uniform in (0, 1]; safe as a logarithm argument.
    double uniform_positive() { return 1.0 - uniform(); }

    /// Standard normal via Box-Muller (one value per call; the sine partner
    /// is discarded to keep the stream layout independent of call pairing).
    double gaussian() {
        const double u1 = uniform_positive();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    Eigen::VectorXd gaussian_vector(int dim) {
        Eigen::VectorXd v(dim);
        for (int i = 0; i < dim; ++i) v[i] = gaussian();
        return v;
    }

    /// Uniform draw from the Euclidean ball of given radius.
    Eigen::VectorXd ball_vector(int dim, double radius) {
        Eigen::VectorXd d = gaussian_vector(dim);
        const double nrm = d.norm();
        if (nrm == 0.0) return Eigen::VectorXd::Zero(dim);
        const double r =
            radius * std::pow(uniform_positive(), 1.0 / static_cast<double>(dim));
        return (r / nrm) * d;
    }

private:
    std::uint64_t state_;
};

} // namespace fpdvi
