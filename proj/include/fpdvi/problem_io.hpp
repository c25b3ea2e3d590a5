// JSON problem format, version "1".  The format is a closed catalog rather
// than arbitrary user code: data maps are constants, affine-in-state forms,
// or expressions over xi and theta components (see expr.hpp).  That keeps
// problem files portable, makes growth-constant estimation meaningful, and
// lets the loader cross-validate every dimension before any solve starts.
//
// Parsing is strict: unknown keys are rejected, and every error names the
// offending field with a dotted path (e.g. "vi.K.lower").

#pragma once

#include <cstdint>
#include <fstream>
#include <functional>
#include <initializer_list>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "fpdvi/convex.hpp"
#include "fpdvi/errors.hpp"
#include "fpdvi/expr.hpp"
#include "fpdvi/grid.hpp"
#include "fpdvi/monotone.hpp"
#include "fpdvi/problem.hpp"
#include "fpdvi/prox.hpp"

namespace fpdvi {

struct SolverConfig {
    double tol = 1e-10;
    int max_outer = 200;
    double damping = 1.0;
    std::uint64_t seed = 1;
    double vi_tol = 1e-10;
    int vi_max_iter = 200000;
};

struct HypothesisConfig {
    std::vector<double> k_sequence{1e2, 1e3, 1e4, 1e6, 1e8};
    double delta = 0.0; // 0 = auto (T/100)
    int pair_count = 200;
    int sample_count = 200;
    double probe_radius = 10.0;
    std::vector<double> radii{4.0, 8.0, 16.0};
};

struct GridConfig {
    int N = 256;
    bool graded = false;
    double gamma = 1.0;

    TimeGrid build(double T) const {
        return graded ? TimeGrid::graded(T, N, gamma) : TimeGrid::uniform(T, N);
    }
};

struct LoadedProblem {
    FPDVIProblem problem;
    GridConfig grid;
    SolverConfig solver;
    HypothesisConfig hypotheses;
    std::string name;
    nlohmann::json document; // configuration echo: the exact parsed file
};

namespace detail_io {

using nlohmann::json;

inline void check_keys(const json& j, const std::string& path,
                       std::initializer_list<const char*> allowed) {
    if (!j.is_object())
        throw ValidationError(path, "expected an object");
    for (const auto& [key, _] : j.items()) {
        bool known = false;
        for (const char* a : allowed)
            if (key == a) { known = true; break; }
        if (!known)
            throw ValidationError(path.empty() ? key : path + "." + key,
                                  "unknown key");
    }
}

inline const json& require(const json& j, const std::string& path,
                           const char* key) {
    const auto it = j.find(key);
    if (it == j.end())
        throw ValidationError(path.empty() ? key : path + "." + key,
                              "missing required key");
    return *it;
}

inline std::string join(const std::string& path, const char* key) {
    return path.empty() ? key : path + "." + key;
}

inline double as_number(const json& j, const std::string& path) {
    if (!j.is_number())
        throw ValidationError(path, "expected a number");
    return j.get<double>();
}

inline int as_int(const json& j, const std::string& path) {
    if (!j.is_number_integer())
        throw ValidationError(path, "expected an integer");
    return j.get<int>();
}

inline std::string as_string(const json& j, const std::string& path) {
    if (!j.is_string())
        throw ValidationError(path, "expected a string");
    return j.get<std::string>();
}

inline Eigen::VectorXd as_vector(const json& j, const std::string& path) {
    if (!j.is_array() || j.empty())
        throw ValidationError(path, "expected a non-empty array of numbers");
    Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number())
            throw ValidationError(path + "[" + std::to_string(i) + "]",
                                  "expected a number");
        v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
    }
    return v;
}

inline Eigen::MatrixXd as_matrix(const json& j, const std::string& path) {
    if (!j.is_array() || j.empty())
        throw ValidationError(path, "expected a non-empty array of rows");
    const std::size_t rows = j.size();
    std::size_t cols = 0;
    Eigen::MatrixXd m;
    for (std::size_t r = 0; r < rows; ++r) {
        const std::string row_path = path + "[" + std::to_string(r) + "]";
        if (!j[r].is_array() || j[r].empty())
            throw ValidationError(row_path, "expected a non-empty array row");
        if (r == 0) {
            cols = j[r].size();
            m.resize(static_cast<Eigen::Index>(rows),
                     static_cast<Eigen::Index>(cols));
        } else if (j[r].size() != cols) {
            throw ValidationError(row_path, "ragged matrix rows");
        }
        for (std::size_t c = 0; c < cols; ++c) {
            if (!j[r][c].is_number())
                throw ValidationError(row_path + "[" + std::to_string(c) + "]",
                                      "expected a number");
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                j[r][c].get<double>();
        }
    }
    return m;
}

/// Vector-valued map over (xi, theta): constant | affine_in_state | expression.
inline std::function<Eigen::VectorXd(double, const Eigen::VectorXd&)>
parse_vector_map(const json& j, const std::string& path, int out_dim,
                 int state_dim) {
    const std::string type = as_string(require(j, path, "type"), join(path, "type"));
    if (type == "constant") {
        check_keys(j, path, {"type", "entries"});
        const Eigen::VectorXd c =
            as_vector(require(j, path, "entries"), join(path, "entries"));
        if (c.size() != out_dim)
            throw ValidationError(join(path, "entries"),
                                  "expected " + std::to_string(out_dim) +
                                      " entries, got " + std::to_string(c.size()));
        return [c](double, const Eigen::VectorXd&) { return c; };
    }
    if (type == "affine_in_state") {
        check_keys(j, path, {"type", "matrix", "shift"});
        const Eigen::MatrixXd M =
            as_matrix(require(j, path, "matrix"), join(path, "matrix"));
        const Eigen::VectorXd c =
            as_vector(require(j, path, "shift"), join(path, "shift"));
        if (M.rows() != out_dim || M.cols() != state_dim)
            throw ValidationError(join(path, "matrix"),
                                  "expected a " + std::to_string(out_dim) + "x" +
                                      std::to_string(state_dim) + " matrix");
        if (c.size() != out_dim)
            throw ValidationError(join(path, "shift"),
                                  "shift length must match the matrix rows");
        return [M, c](double, const Eigen::VectorXd& theta) {
            return (M * theta + c).eval();
        };
    }
    if (type == "expression") {
        check_keys(j, path, {"type", "entries"});
        const json& entries = require(j, path, "entries");
        if (!entries.is_array() ||
            entries.size() != static_cast<std::size_t>(out_dim))
            throw ValidationError(join(path, "entries"),
                                  "expected " + std::to_string(out_dim) +
                                      " expression strings");
        std::vector<Expression> exprs;
        exprs.reserve(entries.size());
        for (std::size_t i = 0; i < entries.size(); ++i) {
            const std::string e_path =
                join(path, "entries") + "[" + std::to_string(i) + "]";
            exprs.push_back(
                Expression::parse(as_string(entries[i], e_path), state_dim));
        }
        return [exprs, out_dim](double xi, const Eigen::VectorXd& theta) {
            Eigen::VectorXd out(out_dim);
            for (int i = 0; i < out_dim; ++i)
                out(i) = exprs[static_cast<std::size_t>(i)](xi, theta);
            return out;
        };
    }
    throw ValidationError(join(path, "type"),
                          "unknown map type '" + type +
                              "' (expected constant, affine_in_state, or "
                              "expression)");
}

/// Matrix-valued map over (xi, theta): constant | expression (entry-wise).
inline std::function<Eigen::MatrixXd(double, const Eigen::VectorXd&)>
parse_matrix_map(const json& j, const std::string& path, int rows, int cols,
                 int state_dim) {
    const std::string type = as_string(require(j, path, "type"), join(path, "type"));
    if (type == "constant") {
        check_keys(j, path, {"type", "entries"});
        const Eigen::MatrixXd M =
            as_matrix(require(j, path, "entries"), join(path, "entries"));
        if (M.rows() != rows || M.cols() != cols)
            throw ValidationError(join(path, "entries"),
                                  "expected a " + std::to_string(rows) + "x" +
                                      std::to_string(cols) + " matrix");
        return [M](double, const Eigen::VectorXd&) { return M; };
    }
    if (type == "expression") {
        check_keys(j, path, {"type", "entries"});
        const json& entries = require(j, path, "entries");
        if (!entries.is_array() || entries.size() != static_cast<std::size_t>(rows))
            throw ValidationError(join(path, "entries"),
                                  "expected " + std::to_string(rows) +
                                      " rows of expression strings");
        std::vector<std::vector<Expression>> exprs(static_cast<std::size_t>(rows));
        for (std::size_t r = 0; r < entries.size(); ++r) {
            const std::string r_path =
                join(path, "entries") + "[" + std::to_string(r) + "]";
            if (!entries[r].is_array() ||
                entries[r].size() != static_cast<std::size_t>(cols))
                throw ValidationError(r_path,
                                      "expected " + std::to_string(cols) +
                                          " expression strings");
            for (std::size_t c = 0; c < entries[r].size(); ++c)
                exprs[r].push_back(Expression::parse(
                    as_string(entries[r][c],
                              r_path + "[" + std::to_string(c) + "]"),
                    state_dim));
        }
        return [exprs, rows, cols](double xi, const Eigen::VectorXd& theta) {
            Eigen::MatrixXd out(rows, cols);
            for (int r = 0; r < rows; ++r)
                for (int c = 0; c < cols; ++c)
                    out(r, c) = exprs[static_cast<std::size_t>(r)]
                                     [static_cast<std::size_t>(c)](xi, theta);
            return out;
        };
    }
    throw ValidationError(join(path, "type"),
                          "unknown map type '" + type +
                              "' (expected constant or expression)");
}

/// Path functional h: constant | terminal_affine | terminal_expression.
inline std::function<Eigen::VectorXd(const SampledPath&)>
parse_path_map(const json& j, const std::string& path, int state_dim, double T) {
    const std::string type = as_string(require(j, path, "type"), join(path, "type"));
    if (type == "constant") {
        check_keys(j, path, {"type", "entries"});
        const Eigen::VectorXd c =
            as_vector(require(j, path, "entries"), join(path, "entries"));
        if (c.size() != state_dim)
            throw ValidationError(join(path, "entries"),
                                  "expected " + std::to_string(state_dim) +
                                      " entries");
        return [c](const SampledPath&) { return c; };
    }
    if (type == "terminal_affine") {
        check_keys(j, path, {"type", "scale", "offset"});
        const double scale =
            as_number(require(j, path, "scale"), join(path, "scale"));
        const Eigen::VectorXd offset =
            as_vector(require(j, path, "offset"), join(path, "offset"));
        if (offset.size() != state_dim)
            throw ValidationError(join(path, "offset"),
                                  "expected " + std::to_string(state_dim) +
                                      " entries");
        return [scale, offset](const SampledPath& theta) {
            return (scale * theta.values.back() + offset).eval();
        };
    }
    if (type == "terminal_expression") {
        check_keys(j, path, {"type", "entries"});
        const json& entries = require(j, path, "entries");
        if (!entries.is_array() ||
            entries.size() != static_cast<std::size_t>(state_dim))
            throw ValidationError(join(path, "entries"),
                                  "expected " + std::to_string(state_dim) +
                                      " expression strings");
        std::vector<Expression> exprs;
        for (std::size_t i = 0; i < entries.size(); ++i)
            exprs.push_back(Expression::parse(
                as_string(entries[i], join(path, "entries") + "[" +
                                          std::to_string(i) + "]"),
                state_dim));
        return [exprs, state_dim, T](const SampledPath& theta) {
            Eigen::VectorXd out(state_dim);
            for (int i = 0; i < state_dim; ++i)
                out(i) = exprs[static_cast<std::size_t>(i)](T, theta.values.back());
            return out;
        };
    }
    throw ValidationError(join(path, "type"),
                          "unknown terminal map type '" + type +
                              "' (expected constant, terminal_affine, or "
                              "terminal_expression)");
}

inline ConvexSet parse_set(const json& j, const std::string& path) {
    const std::string type = as_string(require(j, path, "type"), join(path, "type"));
    if (type == "box") {
        check_keys(j, path, {"type", "lower", "upper"});
        return ConvexSet::box(
            as_vector(require(j, path, "lower"), join(path, "lower")),
            as_vector(require(j, path, "upper"), join(path, "upper")));
    }
    if (type == "ball") {
        check_keys(j, path, {"type", "center", "radius"});
        return ConvexSet::ball(
            as_vector(require(j, path, "center"), join(path, "center")),
            as_number(require(j, path, "radius"), join(path, "radius")));
    }
    if (type == "halfspaces") {
        check_keys(j, path, {"type", "normals", "offsets", "interior_point"});
        const Eigen::MatrixXd A =
            as_matrix(require(j, path, "normals"), join(path, "normals"));
        const Eigen::VectorXd b =
            as_vector(require(j, path, "offsets"), join(path, "offsets"));
        if (b.size() != A.rows())
            throw ValidationError(join(path, "offsets"),
                                  "one offset per normal row required");
        std::vector<std::pair<Eigen::VectorXd, double>> rows;
        for (Eigen::Index r = 0; r < A.rows(); ++r)
            rows.emplace_back(A.row(r).transpose(), b(r));
        return ConvexSet::halfspace_intersection(
            rows, as_vector(require(j, path, "interior_point"),
                            join(path, "interior_point")));
    }
    throw ValidationError(join(path, "type"),
                          "unknown set type '" + type +
                              "' (expected box, ball, or halfspaces)");
}

inline MonotoneMap parse_map_G(const json& j, const std::string& path, int m) {
    const std::string type = as_string(require(j, path, "type"), join(path, "type"));
    if (type == "identity") {
        check_keys(j, path, {"type"});
        return MonotoneMap::affine(Eigen::MatrixXd::Identity(m, m),
                                   Eigen::VectorXd::Zero(m));
    }
    if (type == "affine") {
        check_keys(j, path, {"type", "matrix", "shift"});
        const Eigen::MatrixXd M =
            as_matrix(require(j, path, "matrix"), join(path, "matrix"));
        const Eigen::VectorXd q =
            as_vector(require(j, path, "shift"), join(path, "shift"));
        if (M.rows() != m || M.cols() != m || q.size() != m)
            throw ValidationError(path, "operator must be " + std::to_string(m) +
                                            "-dimensional square");
        return MonotoneMap::affine(M, q);
    }
    throw ValidationError(join(path, "type"),
                          "unknown operator type '" + type +
                              "' (expected identity or affine)");
}

inline ConvexFunction parse_phi(const json& j, const std::string& path, int m) {
    const std::string type = as_string(require(j, path, "type"), join(path, "type"));
    if (type == "zero") {
        check_keys(j, path, {"type"});
        return ConvexFunction::zero();
    }
    if (type == "weighted_l1") {
        check_keys(j, path, {"type", "weights"});
        const Eigen::VectorXd w =
            as_vector(require(j, path, "weights"), join(path, "weights"));
        if (w.size() != m)
            throw ValidationError(join(path, "weights"),
                                  "expected " + std::to_string(m) + " weights");
        return ConvexFunction::weighted_l1(w);
    }
    if (type == "quadratic") {
        check_keys(j, path, {"type", "matrix", "shift"});
        const Eigen::MatrixXd P =
            as_matrix(require(j, path, "matrix"), join(path, "matrix"));
        const Eigen::VectorXd r =
            as_vector(require(j, path, "shift"), join(path, "shift"));
        if (P.rows() != m || P.cols() != m || r.size() != m)
            throw ValidationError(path, "quadratic term must be " +
                                            std::to_string(m) + "-dimensional");
        return ConvexFunction::quadratic(P, r);
    }
    if (type == "separable_piecewise_linear") {
        check_keys(j, path, {"type", "breakpoints", "slopes"});
        const json& bps = require(j, path, "breakpoints");
        const json& slopes = require(j, path, "slopes");
        if (!bps.is_array() || bps.size() != static_cast<std::size_t>(m) ||
            !slopes.is_array() || slopes.size() != static_cast<std::size_t>(m))
            throw ValidationError(path, "need one breakpoint and slope list per "
                                        "component");
        std::vector<PiecewiseLinear1D> pieces;
        for (int i = 0; i < m; ++i) {
            const std::string b_path =
                join(path, "breakpoints") + "[" + std::to_string(i) + "]";
            const std::string s_path =
                join(path, "slopes") + "[" + std::to_string(i) + "]";
            const Eigen::VectorXd b = as_vector(bps[static_cast<std::size_t>(i)],
                                                b_path);
            const Eigen::VectorXd s =
                as_vector(slopes[static_cast<std::size_t>(i)], s_path);
            PiecewiseLinear1D piece;
            piece.breakpoints.assign(b.data(), b.data() + b.size());
            piece.slopes.assign(s.data(), s.data() + s.size());
            pieces.push_back(std::move(piece));
        }
        return ConvexFunction::separable_pwl(pieces);
    }
    throw ValidationError(join(path, "type"),
                          "unknown convex-term type '" + type + "'");
}

} // namespace detail_io

/// Build a validated problem plus solver/hypothesis configuration from a
/// parsed JSON document.  `source` names the document in error messages.
inline LoadedProblem load_problem_from_json(const nlohmann::json& doc,
                                            const std::string& source) {
    using namespace detail_io;
    check_keys(doc, "",
               {"format_version", "name", "alpha", "T", "grid", "A", "B", "f",
                "g", "h", "vi", "solver", "hypotheses"});

    const std::string version =
        as_string(require(doc, "", "format_version"), "format_version");
    if (version != "1")
        throw ValidationError("format_version",
                              "unsupported version '" + version +
                                  "' (this build reads version \"1\")");

    LoadedProblem loaded;
    loaded.document = doc;
    loaded.name = doc.contains("name")
                      ? as_string(doc["name"], "name")
                      : source;

    FPDVIProblem& p = loaded.problem;
    p.alpha = as_number(require(doc, "", "alpha"), "alpha");
    if (!(p.alpha > 0.0) || !(p.alpha <= 1.0))
        throw ValidationError("alpha", "order must lie in (0,1]");
    p.T = as_number(require(doc, "", "T"), "T");
    if (!(p.T > 0.0)) throw ValidationError("T", "horizon must be positive");

    const json& grid = require(doc, "", "grid");
    check_keys(grid, "grid", {"N", "kind", "gamma"});
    loaded.grid.N = as_int(require(grid, "grid", "N"), "grid.N");
    if (loaded.grid.N < 2)
        throw ValidationError("grid.N", "need at least 2 intervals");
    const std::string kind =
        grid.contains("kind") ? as_string(grid["kind"], "grid.kind") : "uniform";
    if (kind == "graded") {
        loaded.grid.graded = true;
        loaded.grid.gamma =
            as_number(require(grid, "grid", "gamma"), "grid.gamma");
        if (!(loaded.grid.gamma >= 1.0))
            throw ValidationError("grid.gamma", "grading exponent must be >= 1");
    } else if (kind == "uniform") {
        if (grid.contains("gamma"))
            throw ValidationError("grid.gamma",
                                  "gamma only applies to graded grids");
    } else {
        throw ValidationError("grid.kind", "expected 'uniform' or 'graded'");
    }

    const Eigen::MatrixXd A = as_matrix(require(doc, "", "A"), "A");
    if (A.rows() != A.cols())
        throw ValidationError("A", "generator must be square");
    p.A = GeneratorMatrix(A);
    const int n = static_cast<int>(A.rows());

    const json& vi = require(doc, "", "vi");
    check_keys(vi, "vi", {"K", "G", "phi"});
    p.K = parse_set(require(vi, "vi", "K"), "vi.K");
    const int m = p.K.dimension();
    p.G = parse_map_G(require(vi, "vi", "G"), "vi.G", m);
    p.phi = vi.contains("phi") ? parse_phi(vi["phi"], "vi.phi", m)
                               : ConvexFunction::zero();

    p.B = parse_matrix_map(require(doc, "", "B"), "B", n, m, n);
    p.f = parse_vector_map(require(doc, "", "f"), "f", n, n);
    p.g = parse_vector_map(require(doc, "", "g"), "g", m, n);
    p.h = parse_path_map(require(doc, "", "h"), "h", n, p.T);

    if (doc.contains("solver")) {
        const json& s = doc["solver"];
        check_keys(s, "solver",
                   {"tol", "max_outer", "damping", "seed", "vi_tol",
                    "vi_max_iter"});
        auto& cfg = loaded.solver;
        if (s.contains("tol")) cfg.tol = as_number(s["tol"], "solver.tol");
        if (s.contains("max_outer"))
            cfg.max_outer = as_int(s["max_outer"], "solver.max_outer");
        if (s.contains("damping"))
            cfg.damping = as_number(s["damping"], "solver.damping");
        if (s.contains("seed"))
            cfg.seed = static_cast<std::uint64_t>(
                as_int(s["seed"], "solver.seed"));
        if (s.contains("vi_tol"))
            cfg.vi_tol = as_number(s["vi_tol"], "solver.vi_tol");
        if (s.contains("vi_max_iter"))
            cfg.vi_max_iter = as_int(s["vi_max_iter"], "solver.vi_max_iter");
        if (!(cfg.tol >= 1e-12))
            throw ValidationError("solver.tol", "tolerance must be >= 1e-12");
        if (cfg.max_outer < 1)
            throw ValidationError("solver.max_outer", "need at least 1 sweep");
        if (!(cfg.damping > 0.0) || !(cfg.damping <= 1.0))
            throw ValidationError("solver.damping", "damping must lie in (0,1]");
    }

    if (doc.contains("hypotheses")) {
        const json& hyp = doc["hypotheses"];
        check_keys(hyp, "hypotheses",
                   {"k_sequence", "delta", "pair_count", "sample_count",
                    "probe_radius", "radii"});
        auto& cfg = loaded.hypotheses;
        if (hyp.contains("k_sequence")) {
            const Eigen::VectorXd ks =
                as_vector(hyp["k_sequence"], "hypotheses.k_sequence");
            cfg.k_sequence.assign(ks.data(), ks.data() + ks.size());
        }
        if (hyp.contains("delta"))
            cfg.delta = as_number(hyp["delta"], "hypotheses.delta");
        if (hyp.contains("pair_count"))
            cfg.pair_count = as_int(hyp["pair_count"], "hypotheses.pair_count");
        if (hyp.contains("sample_count"))
            cfg.sample_count =
                as_int(hyp["sample_count"], "hypotheses.sample_count");
        if (hyp.contains("probe_radius"))
            cfg.probe_radius =
                as_number(hyp["probe_radius"], "hypotheses.probe_radius");
        if (hyp.contains("radii")) {
            const Eigen::VectorXd rs = as_vector(hyp["radii"], "hypotheses.radii");
            cfg.radii.assign(rs.data(), rs.data() + rs.size());
        }
    }

    // Cross-validate maps, dimensions, and the VI pairing rule before
    // handing the problem to any solver (throws ValidationError /
    // DimensionMismatch / UnsupportedCombination).
    loaded.problem.check();
    return loaded;
}

/// Load and validate a problem file.  Parse failures raise ParseError with
/// the parser's position diagnostics; validation failures raise
/// ValidationError with a dotted field path.
inline LoadedProblem load_problem(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ParseError("cannot open problem file '" + path + "'");
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("invalid JSON in '") + path +
                         "': " + e.what());
    }
    return load_problem_from_json(doc, path);
}

} // namespace fpdvi
