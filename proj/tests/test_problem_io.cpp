#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <string>

#include <json.hpp>

#include <fpdvi/problem_io.hpp>

using namespace fpdvi;
using nlohmann::json;

namespace {

json baseline() {
    return json::parse(R"({
        "format_version": "1",
        "name": "inline",
        "alpha": 0.5,
        "T": 1.0,
        "grid": {"N": 16},
        "A": [[-1.0]],
        "B": {"type": "constant", "entries": [[0.0]]},
        "f": {"type": "constant", "entries": [0.0]},
        "g": {"type": "constant", "entries": [0.0]},
        "h": {"type": "constant", "entries": [1.0]},
        "vi": {
            "K": {"type": "box", "lower": [-1.0], "upper": [1.0]},
            "G": {"type": "identity"}
        }
    })");
}

std::string problems_dir() { return FPDVI_PROBLEMS_DIR; }

std::string validation_field(const json& doc) {
    try {
        load_problem_from_json(doc, "inline");
    } catch (const ValidationError& e) {
        return e.field;
    }
    return "(no error)";
}

} // namespace

TEST_CASE("every shipped problem file loads and validates", "[io]") {
    for (const char* name :
         {"scalar_decay", "linear_coupled", "classical_linear", "nonlocal_half",
          "diverging"}) {
        INFO(name);
        const auto loaded =
            load_problem(problems_dir() + "/" + name + ".json");
        CHECK(loaded.name == name);
        CHECK_NOTHROW(loaded.problem.check());
        CHECK(loaded.grid.N >= 2);
    }
}

TEST_CASE("the decay instance round-trips its configuration", "[io]") {
    const auto loaded = load_problem(problems_dir() + "/scalar_decay.json");
    CHECK(loaded.problem.alpha == 0.5);
    CHECK(loaded.problem.T == 1.0);
    CHECK(loaded.problem.state_dimension() == 1);
    CHECK(loaded.problem.control_dimension() == 1);
    CHECK(loaded.grid.N == 256);
    CHECK_FALSE(loaded.grid.graded);
    CHECK(loaded.solver.tol == 1e-10);
    CHECK(loaded.solver.max_outer == 50);
    CHECK(loaded.solver.seed == 1);
    CHECK(loaded.hypotheses.delta == 0.1);
    // The untouched document rides along for configuration echoes.
    CHECK(loaded.document["name"] == "scalar_decay");
}

TEST_CASE("defaults fill the optional blocks", "[io]") {
    const auto loaded = load_problem_from_json(baseline(), "inline");
    CHECK(loaded.solver.tol == 1e-10);
    CHECK(loaded.solver.max_outer == 200);
    CHECK(loaded.solver.damping == 1.0);
    CHECK(loaded.hypotheses.delta == 0.0); // auto
    CHECK(loaded.hypotheses.k_sequence.back() == 1e8);
    CHECK(loaded.grid.build(1.0).nodes.size() == 17);
}

TEST_CASE("validation errors carry dotted field paths", "[io]") {
    auto doc = baseline();
    doc["alpha"] = 1.5;
    CHECK(validation_field(doc) == "alpha");
    doc["alpha"] = 0.0;
    CHECK(validation_field(doc) == "alpha");

    doc = baseline();
    doc["T"] = -1.0;
    CHECK(validation_field(doc) == "T");

    doc = baseline();
    doc["format_version"] = "2";
    CHECK(validation_field(doc) == "format_version");
    doc.erase("format_version");
    CHECK(validation_field(doc) == "format_version");

    doc = baseline();
    doc["surprise"] = 1;
    CHECK(validation_field(doc) == "surprise");

    doc = baseline();
    doc["solver"] = {{"tol", 1e-9}, {"verbose", true}};
    CHECK(validation_field(doc) == "solver.verbose");

    doc = baseline();
    doc["vi"]["junk"] = 1;
    CHECK(validation_field(doc) == "vi.junk");

    doc = baseline();
    doc["grid"]["spacing"] = 0.1;
    CHECK(validation_field(doc) == "grid.spacing");

    doc = baseline();
    doc["A"] = {{1.0, 2.0}};
    CHECK(validation_field(doc) == "A");

    doc = baseline();
    doc["B"]["entries"] = {{0.0, 0.0}};
    CHECK(validation_field(doc) == "B.entries");

    doc = baseline();
    doc["grid"]["N"] = 1;
    CHECK(validation_field(doc) == "grid.N");
}

TEST_CASE("grid kinds parse and build", "[io]") {
    auto doc = baseline();
    doc["grid"] = {{"N", 32}, {"kind", "graded"}, {"gamma", 2.0}};
    const auto loaded = load_problem_from_json(doc, "inline");
    REQUIRE(loaded.grid.graded);
    const auto grid = loaded.grid.build(loaded.problem.T);
    REQUIRE(grid.nodes.size() == 33);
    // Quadratic grading clusters nodes at the origin.
    CHECK(grid.nodes[1] == Catch::Approx(1.0 / 1024.0));

    doc["grid"] = {{"N", 32}, {"kind", "uniform"}, {"gamma", 2.0}};
    CHECK(validation_field(doc) == "grid.gamma");
    doc["grid"] = {{"N", 32}, {"kind", "chebyshev"}};
    CHECK(validation_field(doc) == "grid.kind");
    doc["grid"] = {{"N", 32}, {"kind", "graded"}, {"gamma", 0.5}};
    CHECK(validation_field(doc) == "grid.gamma");
}

TEST_CASE("map catalog evaluates what it parsed", "[io]") {
    auto doc = baseline();
    doc["f"] = {{"type", "expression"}, {"entries", {"sin(xi) * theta_1"}}};
    doc["B"] = {{"type", "expression"}, {"entries", {{"xi + theta_1"}}}};
    doc["g"] = {{"type", "affine_in_state"},
                {"matrix", {{-1.0}}},
                {"shift", {0.5}}};
    const auto loaded = load_problem_from_json(doc, "inline");

    const Eigen::VectorXd th2 = Eigen::VectorXd::Constant(1, 2.0);
    CHECK(loaded.problem.f(0.3, th2)(0) ==
          Catch::Approx(std::sin(0.3) * 2.0));
    CHECK(loaded.problem.B(0.25, (Eigen::VectorXd(1) << 3.0).finished())(0, 0) ==
          Catch::Approx(3.25));
    CHECK(loaded.problem.g(0.0, th2)(0) == Catch::Approx(-1.5));
}

TEST_CASE("terminal maps see the end of the path", "[io]") {
    SampledPath path;
    path.grid = TimeGrid::uniform(1.0, 4);
    path.values.assign(5, Eigen::VectorXd::Constant(1, 1.0));
    path.values.back() = Eigen::VectorXd::Constant(1, 4.0);

    auto doc = baseline();
    doc["h"] = {{"type", "terminal_affine"},
                {"scale", 0.5},
                {"offset", {1.0}}};
    CHECK(load_problem_from_json(doc, "inline").problem.h(path)(0) ==
          Catch::Approx(3.0));

    doc["h"] = {{"type", "terminal_expression"}, {"entries", {"theta_1 ^ 2"}}};
    CHECK(load_problem_from_json(doc, "inline").problem.h(path)(0) ==
          Catch::Approx(16.0));

    doc["h"] = {{"type", "average"}};
    CHECK(validation_field(doc) == "h.type");
}

TEST_CASE("set and convex-term catalogs parse", "[io]") {
    auto doc = baseline();
    doc["vi"]["K"] = {{"type", "ball"}, {"center", {0.0, 0.0}}, {"radius", 2.0}};
    doc["vi"]["G"] = {{"type", "affine"},
                      {"matrix", {{2.0, 0.0}, {0.0, 1.0}}},
                      {"shift", {0.0, 0.0}}};
    doc["B"] = {{"type", "constant"}, {"entries", {{0.0, 0.0}}}};
    doc["g"] = {{"type", "constant"}, {"entries", {0.0, 0.0}}};
    const auto ball = load_problem_from_json(doc, "inline");
    CHECK(ball.problem.control_dimension() == 2);
    CHECK(ball.problem.K.contains((Eigen::VectorXd(2) << 1.0, 1.0).finished(),
                                  1e-12));

    doc["vi"]["K"] = {{"type", "halfspaces"},
                      {"normals", {{1.0, 1.0}}},
                      {"offsets", {1.0}},
                      {"interior_point", {0.25, 0.25}}};
    doc["vi"]["G"] = {{"type", "identity"}};
    const auto simplexish = load_problem_from_json(doc, "inline");
    CHECK(simplexish.problem.K.contains(
        (Eigen::VectorXd(2) << 0.2, 0.2).finished(), 1e-12));
    CHECK_FALSE(simplexish.problem.K.contains(
        (Eigen::VectorXd(2) << 0.9, 0.9).finished(), 1e-12));

    // Convex terms over a box.
    doc = baseline();
    doc["vi"]["phi"] = {{"type", "weighted_l1"}, {"weights", {0.5}}};
    CHECK_NOTHROW(load_problem_from_json(doc, "inline"));
    doc["vi"]["phi"] = {{"type", "quadratic"},
                        {"matrix", {{1.0}}},
                        {"shift", {0.0}}};
    CHECK_NOTHROW(load_problem_from_json(doc, "inline"));
    doc["vi"]["phi"] = {{"type", "separable_piecewise_linear"},
                        {"breakpoints", {{0.0}}},
                        {"slopes", {{-1.0, 1.0}}}};
    CHECK_NOTHROW(load_problem_from_json(doc, "inline"));
}

TEST_CASE("the prox pairing rule is enforced at load time", "[io]") {
    auto doc = baseline();
    doc["vi"]["K"] = {{"type", "ball"}, {"center", {0.0}}, {"radius", 1.0}};
    doc["vi"]["phi"] = {{"type", "weighted_l1"}, {"weights", {1.0}}};
    CHECK_THROWS_AS(load_problem_from_json(doc, "inline"),
                    UnsupportedCombination);
}

TEST_CASE("solver overrides are validated", "[io]") {
    auto doc = baseline();
    doc["solver"] = {{"tol", 1e-9},     {"max_outer", 7}, {"damping", 0.5},
                     {"seed", 42},      {"vi_tol", 1e-8}, {"vi_max_iter", 5000}};
    const auto loaded = load_problem_from_json(doc, "inline");
    CHECK(loaded.solver.tol == 1e-9);
    CHECK(loaded.solver.max_outer == 7);
    CHECK(loaded.solver.damping == 0.5);
    CHECK(loaded.solver.seed == 42);
    CHECK(loaded.solver.vi_tol == 1e-8);
    CHECK(loaded.solver.vi_max_iter == 5000);

    doc["solver"] = {{"damping", 1.5}};
    CHECK(validation_field(doc) == "solver.damping");
    doc["solver"] = {{"tol", 1e-13}};
    CHECK(validation_field(doc) == "solver.tol");
    doc["solver"] = {{"max_outer", 0}};
    CHECK(validation_field(doc) == "solver.max_outer");
}

TEST_CASE("hypothesis overrides land in the config", "[io]") {
    auto doc = baseline();
    doc["hypotheses"] = {{"k_sequence", {10.0, 100.0, 1e3, 1e4, 1e6}},
                         {"delta", 0.05},
                         {"pair_count", 150},
                         {"sample_count", 120},
                         {"probe_radius", 5.0},
                         {"radii", {2.0, 4.0, 8.0}}};
    const auto loaded = load_problem_from_json(doc, "inline");
    CHECK(loaded.hypotheses.k_sequence.back() == 1e6);
    CHECK(loaded.hypotheses.delta == 0.05);
    CHECK(loaded.hypotheses.pair_count == 150);
    CHECK(loaded.hypotheses.sample_count == 120);
    CHECK(loaded.hypotheses.probe_radius == 5.0);
    CHECK(loaded.hypotheses.radii == std::vector<double>{2.0, 4.0, 8.0});
}

TEST_CASE("unreadable and malformed files raise parse errors", "[io]") {
    CHECK_THROWS_AS(load_problem("/nonexistent/nowhere.json"), ParseError);
    CHECK_THROWS_AS(load_problem(std::string(FPDVI_TEST_DATA_DIR) + "/bad.json"),
                    ParseError);
}
