#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include <fpdvi/convex.hpp>
#include <fpdvi/monotone.hpp>
#include <fpdvi/prox.hpp>
#include <fpdvi/random.hpp>
#include <fpdvi/vi.hpp>

using namespace fpdvi;

namespace {

VIProblem make_problem(ConvexSet K, Eigen::VectorXd w, MonotoneMap G,
                       ConvexFunction phi = ConvexFunction::zero()) {
    VIProblem p{std::move(K), std::move(w), std::move(G), std::move(phi)};
    p.check();
    return p;
}

/// Mixed-VI inequality slack at u against direction v:
///   <G(u) + w, v - u> + phi(v) - phi(u); nonnegative for all v in K iff u
/// solves the problem.
double slack(const VIProblem& p, const Eigen::VectorXd& u,
             const Eigen::VectorXd& v) {
    return (p.G(u) + p.w).dot(v - u) + p.phi.value(v) - p.phi.value(u);
}

/// Check the defining inequality along `count` random feasible directions.
double worst_slack(const VIProblem& p, const Eigen::VectorXd& u, int count,
                   std::uint64_t seed) {
    DeterministicRng rng(seed);
    double worst = std::numeric_limits<double>::infinity();
    for (int i = 0; i < count; ++i) {
        const Eigen::VectorXd v =
            p.K.project(u + 3.0 * rng.gaussian_vector(u.size()));
        worst = std::min(worst, slack(p, u, v));
    }
    return worst;
}

} // namespace

TEST_CASE("scalar box instance has the closed-form solution", "[vi]") {
    // K = [0,1], G(u) = u - 1/2: unique solution 1/2.
    auto p = make_problem(
        ConvexSet::box(Eigen::VectorXd::Zero(1), Eigen::VectorXd::Ones(1)),
        Eigen::VectorXd::Constant(1, -0.5),
        MonotoneMap::affine(Eigen::MatrixXd::Identity(1, 1),
                            Eigen::VectorXd::Zero(1)));
    const auto result = solve_vi(p, 1e-10, 100000);
    REQUIRE(result.converged);
    CHECK(std::abs(result.u(0) - 0.5) < 1e-8);
    CHECK(result.residual <= 1e-10);
    CHECK(worst_slack(p, result.u, 200, 0xd1) >= -1e-6);
}

TEST_CASE("clamped coordinates solve the box instance", "[vi]") {
    // K = [0,1]^2, w = (-1/4, -2): solution (1/4, 1) with the second
    // coordinate pinned at the boundary.
    auto p = make_problem(
        ConvexSet::box(Eigen::VectorXd::Zero(2), Eigen::VectorXd::Ones(2)),
        (Eigen::VectorXd(2) << -0.25, -2.0).finished(),
        MonotoneMap::affine(Eigen::MatrixXd::Identity(2, 2),
                            Eigen::VectorXd::Zero(2)));
    const auto result = solve_vi(p, 1e-10, 100000);
    REQUIRE(result.converged);
    CHECK((result.u - (Eigen::VectorXd(2) << 0.25, 1.0).finished()).norm() <
          1e-8);
    CHECK(worst_slack(p, result.u, 200, 0xd2) >= -1e-6);
}

TEST_CASE("solver matches a brute-force grid oracle in 2-D", "[vi]") {
    // Non-symmetric monotone operator on a box; oracle scans a uniform grid
    // of K for the smallest natural residual.
    Eigen::MatrixXd M(2, 2);
    M << 2.0, 0.9, -0.9, 1.5; // positive definite symmetric part
    const Eigen::VectorXd q = (Eigen::VectorXd(2) << -1.7, 0.4).finished();
    auto p = make_problem(
        ConvexSet::box(Eigen::VectorXd::Zero(2), Eigen::VectorXd::Ones(2)),
        Eigen::VectorXd::Zero(2), MonotoneMap::affine(M, q));

    const auto result = solve_vi(p, 1e-10, 200000);
    REQUIRE(result.converged);

    const int R = 800;
    Eigen::VectorXd best(2);
    double best_res = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= R; ++i) {
        for (int j = 0; j <= R; ++j) {
            Eigen::VectorXd u(2);
            u << static_cast<double>(i) / R, static_cast<double>(j) / R;
            const double res = natural_residual(p, u);
            if (res < best_res) {
                best_res = res;
                best = u;
            }
        }
    }
    CHECK((result.u - best).norm() < 2e-3);
    CHECK(worst_slack(p, result.u, 200, 0xd3) >= -1e-6);
}

TEST_CASE("extragradient distances to the solution never increase", "[vi]") {
    Eigen::MatrixXd M(3, 3);
    M << 1.0, 0.5, 0.0,
        -0.5, 1.0, 0.3,
         0.0, -0.3, 1.0;
    const Eigen::VectorXd q = (Eigen::VectorXd(3) << -0.4, 0.9, -1.3).finished();
    auto p = make_problem(
        ConvexSet::ball(Eigen::VectorXd::Zero(3), 2.0),
        Eigen::VectorXd::Zero(3), MonotoneMap::affine(M, q));

    std::vector<Eigen::VectorXd> iterates;
    const auto result = solve_vi(p, 1e-11, 200000, std::nullopt, &iterates);
    REQUIRE(result.converged);
    REQUIRE(iterates.size() >= 2);
    double prev = std::numeric_limits<double>::infinity();
    for (const auto& u : iterates) {
        const double dist = (u - result.u).norm();
        CHECK(dist <= prev + 1e-12); // Fejer monotonicity w.r.t. SOL
        prev = dist;
    }
}

TEST_CASE("weighted l1 term keeps coordinates at zero", "[vi]") {
    // G(u) = u, w = (-0.3, -2): with phi = |u|_1 the first coordinate's
    // pull (0.3) is below the unit threshold, the second lands at 1.
    auto p = make_problem(
        ConvexSet::box(Eigen::VectorXd::Constant(2, -5.0),
                       Eigen::VectorXd::Constant(2, 5.0)),
        (Eigen::VectorXd(2) << -0.3, -2.0).finished(),
        MonotoneMap::affine(Eigen::MatrixXd::Identity(2, 2),
                            Eigen::VectorXd::Zero(2)),
        ConvexFunction::weighted_l1(Eigen::VectorXd::Ones(2)));
    const auto result = solve_vi(p, 1e-10, 100000);
    REQUIRE(result.converged);
    CHECK(std::abs(result.u(0)) < 1e-9);
    CHECK(std::abs(result.u(1) - 1.0) < 1e-8);
    CHECK(worst_slack(p, result.u, 200, 0xd4) >= -1e-6);
}

TEST_CASE("pairing rule rejects unsplittable compositions", "[vi]") {
    // l1 term over a ball: prox-of-sum does not factor, so construction
    // must refuse.
    VIProblem p{ConvexSet::ball(Eigen::VectorXd::Zero(2), 1.0),
                Eigen::VectorXd::Zero(2),
                MonotoneMap::affine(Eigen::MatrixXd::Identity(2, 2),
                                    Eigen::VectorXd::Zero(2)),
                ConvexFunction::weighted_l1(Eigen::VectorXd::Ones(2))};
    CHECK_THROWS_AS(p.check(), UnsupportedCombination);

    // Non-diagonal quadratic over a box: same refusal.
    Eigen::MatrixXd P(2, 2);
    P << 2.0, 0.5, 0.5, 1.0;
    VIProblem p2{ConvexSet::box(Eigen::VectorXd::Zero(2),
                                Eigen::VectorXd::Ones(2)),
                 Eigen::VectorXd::Zero(2),
                 MonotoneMap::affine(Eigen::MatrixXd::Identity(2, 2),
                                     Eigen::VectorXd::Zero(2)),
                 ConvexFunction::quadratic(P, Eigen::VectorXd::Zero(2))};
    CHECK_THROWS_AS(p2.check(), UnsupportedCombination);

    // Diagonal quadratic over a box is separable and fine.
    VIProblem p3{ConvexSet::box(Eigen::VectorXd::Zero(2),
                                Eigen::VectorXd::Ones(2)),
                 Eigen::VectorXd::Zero(2),
                 MonotoneMap::affine(Eigen::MatrixXd::Identity(2, 2),
                                     Eigen::VectorXd::Zero(2)),
                 ConvexFunction::quadratic(Eigen::MatrixXd::Identity(2, 2),
                                           Eigen::VectorXd::Zero(2))};
    CHECK_NOTHROW(p3.check());

    // Over the unbounded box surrogate the projection is the identity, so
    // any supported term factors -- even the non-diagonal quadratic that a
    // bounded box refuses.
    const auto surrogate = ConvexSet::box(Eigen::VectorXd::Constant(2, -1e9),
                                          Eigen::VectorXd::Constant(2, 1e9));
    VIProblem p4{surrogate, Eigen::VectorXd::Zero(2),
                 MonotoneMap::affine(Eigen::MatrixXd::Identity(2, 2),
                                     Eigen::VectorXd::Zero(2)),
                 ConvexFunction::quadratic(P, Eigen::VectorXd::Zero(2))};
    CHECK_NOTHROW(p4.check());

    // And the free problem certifies any point: zero flow, zero term.
    VIProblem free_p{surrogate, Eigen::VectorXd::Zero(2),
                     MonotoneMap::affine(Eigen::MatrixXd::Zero(2, 2),
                                         Eigen::VectorXd::Zero(2)),
                     ConvexFunction::zero()};
    CHECK(natural_residual(free_p,
                           (Eigen::VectorXd(2) << 3.7, -120.0).finished()) ==
          0.0);
}

TEST_CASE("selection is deterministic and warm starts change nothing",
          "[vi]") {
    Eigen::MatrixXd M(2, 2);
    M << 1.5, 0.2, 0.2, 2.0;
    const auto K =
        ConvexSet::box(Eigen::VectorXd::Constant(2, -3.0),
                       Eigen::VectorXd::Constant(2, 3.0));
    const auto G = MonotoneMap::affine(M, Eigen::VectorXd::Zero(2));
    const Eigen::VectorXd w = (Eigen::VectorXd(2) << 0.7, -1.1).finished();

    const Eigen::VectorXd a = select_control(K, G, ConvexFunction::zero(), w);
    const Eigen::VectorXd b = select_control(K, G, ConvexFunction::zero(), w);
    CHECK(a == b); // bitwise: identical inputs, identical output

    // A warm start may change the iteration path but must land on the same
    // point within tolerance (strongly monotone instance: unique solution).
    const Eigen::VectorXd c =
        select_control(K, G, ConvexFunction::zero(), w, 1e-10, 200000,
                       Eigen::VectorXd::Constant(2, 2.5));
    CHECK((a - c).norm() < 1e-6);
}

TEST_CASE("selection agrees with the plain solver when unique", "[vi]") {
    // Strongly monotone: SOL is a single point, so the regularized
    // selection and the direct solve coincide.
    Eigen::MatrixXd M(2, 2);
    M << 2.0, 0.0, 0.0, 1.0;
    const auto K = ConvexSet::box(Eigen::VectorXd::Constant(2, -1.0),
                                  Eigen::VectorXd::Constant(2, 1.0));
    const auto G = MonotoneMap::affine(M, Eigen::VectorXd::Zero(2));
    const Eigen::VectorXd w = (Eigen::VectorXd(2) << -0.6, 0.9).finished();

    auto p = make_problem(K, w, G);
    const auto direct = solve_vi(p, 1e-12, 200000);
    const Eigen::VectorXd selected =
        select_control(K, G, ConvexFunction::zero(), w, 1e-12);
    REQUIRE(direct.converged);
    CHECK((direct.u - selected).norm() < 1e-6);
}

TEST_CASE("selection picks the minimum-norm point on flat directions",
          "[vi]") {
    // G = 0 on a box: every point solves the VI; the Tikhonov stage must
    // pull the selection to the least-norm feasible point.
    const auto K = ConvexSet::box(Eigen::VectorXd::Constant(2, 1.0),
                                  Eigen::VectorXd::Constant(2, 4.0));
    const auto G = MonotoneMap::affine(Eigen::MatrixXd::Zero(2, 2),
                                       Eigen::VectorXd::Zero(2));
    const Eigen::VectorXd u =
        select_control(K, G, ConvexFunction::zero(), Eigen::VectorXd::Zero(2));
    CHECK((u - Eigen::VectorXd::Constant(2, 1.0)).norm() < 1e-5);
}

TEST_CASE("solution bound is stable under sample doubling", "[vi]") {
    const auto K = ConvexSet::box(Eigen::VectorXd::Constant(2, -2.0),
                                  Eigen::VectorXd::Constant(2, 2.0));
    const auto G = MonotoneMap::affine(Eigen::MatrixXd::Identity(2, 2),
                                       Eigen::VectorXd::Zero(2));
    const double b1 = sol_bound(K, G, ConvexFunction::zero(), 1.5, 40);
    const double b2 = sol_bound(K, G, ConvexFunction::zero(), 1.5, 80);
    CHECK(std::abs(b2 - b1) <= 0.1 * std::max(b1, b2));
    // Monotone in the shift radius: a larger reach can only enlarge it.
    const double b3 = sol_bound(K, G, ConvexFunction::zero(), 3.0, 40);
    CHECK(b3 >= b1 - 1e-12);
}

TEST_CASE("projection onto halfspace intersections", "[vi]") {
    // Simplex-like constraint set: u >= 0, u1 + u2 <= 1.
    std::vector<std::pair<Eigen::VectorXd, double>> rows;
    rows.emplace_back((Eigen::VectorXd(2) << -1.0, 0.0).finished(), 0.0);
    rows.emplace_back((Eigen::VectorXd(2) << 0.0, -1.0).finished(), 0.0);
    rows.emplace_back((Eigen::VectorXd(2) << 1.0, 1.0).finished(), 1.0);
    const auto K = ConvexSet::halfspace_intersection(
        rows, Eigen::VectorXd::Constant(2, 0.25));

    const Eigen::VectorXd p =
        K.project((Eigen::VectorXd(2) << 1.0, 1.0).finished());
    CHECK((p - Eigen::VectorXd::Constant(2, 0.5)).norm() < 1e-9);
    CHECK(K.is_bounded());
    CHECK(K.contains(p, 1e-9));

    // Interior point must actually satisfy the constraints.
    CHECK_THROWS_AS(ConvexSet::halfspace_intersection(
                        rows, Eigen::VectorXd::Constant(2, 5.0)),
                    InfeasibleSet);
}

TEST_CASE("non-monotone operators are rejected", "[vi]") {
    Eigen::MatrixXd M(2, 2);
    M << -1.0, 0.0, 0.0, 1.0; // indefinite symmetric part
    CHECK_THROWS_AS(MonotoneMap::affine(M, Eigen::VectorXd::Zero(2)),
                    NonMonotoneDetected);
    CHECK_THROWS_AS(
        MonotoneMap::callable(
            [](const Eigen::VectorXd& u) { return (-u).eval(); }, 2, 1.0),
        NonMonotoneDetected);
}
