// Time grids on [0, T] and vector-valued samples on them.
//
// Two grid families are supported: uniform, and graded xi_i = T (i/N)^gamma,
// which clusters nodes near xi = 0 where the fractional kernel (xi - s)^{a-1}
// concentrates its mass.  Everything downstream (quadrature weights, operator
// tables, trajectories) is indexed by these nodes.

#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fpdvi/errors.hpp"

namespace fpdvi {

struct TimeGrid {
    enum class Kind { uniform, graded };

    std::vector<double> nodes; // xi_0 = 0 < xi_1 < ... < xi_N = T
    Kind kind = Kind::uniform;
    double gamma = 1.0; // grading exponent (1 for uniform grids)

    static TimeGrid uniform(double T, int N) {
        if (!(T > 0.0) || N < 2)
            throw ValidationError("grid", "uniform grid needs T > 0 and N >= 2");
        TimeGrid g;
        g.kind = Kind::uniform;
        g.nodes.resize(static_cast<std::size_t>(N) + 1);
        for (int i = 0; i <= N; ++i) g.nodes[i] = T * static_cast<double>(i) / N;
        g.nodes[N] = T; // exact endpoint
        return g;
    }

    static TimeGrid graded(double T, int N, double gamma) {
        if (!(T > 0.0) || N < 2 || !(gamma >= 1.0))
            throw ValidationError("grid",
                                  "graded grid needs T > 0, N >= 2, gamma >= 1");
        TimeGrid g;
        g.kind = Kind::graded;
        g.gamma = gamma;
        g.nodes.resize(static_cast<std::size_t>(N) + 1);
        for (int i = 0; i <= N; ++i)
            g.nodes[i] = T * std::pow(static_cast<double>(i) / N, gamma);
        g.nodes[N] = T;
        return g;
    }

    int intervals() const { return static_cast<int>(nodes.size()) - 1; }
    double horizon() const { return nodes.back(); }

    double min_spacing() const {
        double h = nodes[1] - nodes[0];
        for (std::size_t i = 1; i + 1 < nodes.size(); ++i)
            h = std::min(h, nodes[i + 1] - nodes[i]);
        return h;
    }

    void check() const {
        if (nodes.size() < 3)
            throw ValidationError("grid", "need at least N = 2 intervals");
        if (nodes.front() != 0.0)
            throw ValidationError("grid", "first node must be exactly 0");
        for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
            if (!(nodes[i] < nodes[i + 1]) || !std::isfinite(nodes[i + 1]))
                throw ValidationError("grid", "nodes must increase strictly");
        }
    }

    bool same_nodes(const TimeGrid& other, double tol = 0.0) const {
        if (nodes.size() != other.nodes.size()) return false;
        for (std::size_t i = 0; i < nodes.size(); ++i)
            if (std::abs(nodes[i] - other.nodes[i]) > tol) return false;
        return true;
    }
};

// Vector samples, one per grid node; the discrete stand-in for a continuous
// path on [0, T].
struct SampledPath {
    TimeGrid grid;
    std::vector<Eigen::VectorXd> values;

    SampledPath() = default;
    SampledPath(TimeGrid g, std::vector<Eigen::VectorXd> v)
        : grid(std::move(g)), values(std::move(v)) {
        check();
    }

    static SampledPath zero(const TimeGrid& g, int dimension) {
        SampledPath p;
        p.grid = g;
        p.values.assign(g.nodes.size(), Eigen::VectorXd::Zero(dimension));
        return p;
    }

    int dimension() const { return values.empty() ? 0 : static_cast<int>(values[0].size()); }

    void check() const {
        grid.check();
        if (values.size() != grid.nodes.size())
            throw DimensionMismatch("sampled path must hold one value per node");
        const Eigen::Index d = values.empty() ? 0 : values[0].size();
        for (const auto& v : values) {
            if (v.size() != d)
                throw DimensionMismatch("sampled path values must share a dimension");
            if (!v.allFinite())
                throw ValidationError("path", "sampled path contains non-finite values");
        }
    }
};

} // namespace fpdvi
