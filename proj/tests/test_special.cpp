#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include <fpdvi/special.hpp>

using namespace fpdvi;

TEST_CASE("gamma function matches known values", "[special]") {
    CHECK(gamma_fn(1.0) == 1.0);
    CHECK(gamma_fn(2.0) == 1.0);
    CHECK(gamma_fn(5.0) == Catch::Approx(24.0).epsilon(1e-14));
    CHECK(gamma_fn(0.5) == Catch::Approx(std::sqrt(M_PI)).epsilon(1e-14));
    CHECK(gamma_fn(1.5) == Catch::Approx(0.5 * std::sqrt(M_PI)).epsilon(1e-14));
}

TEST_CASE("log_gamma agrees with gamma in the overlap", "[special]") {
    for (double x : {0.1, 0.5, 1.0, 2.5, 7.0, 20.0, 100.0})
        CHECK(std::exp(log_gamma(x)) ==
              Catch::Approx(gamma_fn(x)).epsilon(1e-12));
}

TEST_CASE("reciprocal gamma handles the poles", "[special]") {
    // 1/Gamma has removable zeros at 0, -1, -2, ... and must be exact at 1.
    CHECK(reciprocal_gamma(0.0) == 0.0);
    CHECK(reciprocal_gamma(-1.0) == 0.0);
    CHECK(reciprocal_gamma(-2.0) == 0.0);
    CHECK(reciprocal_gamma(1.0) == 1.0); // bitwise: weighted norms rely on it
    CHECK(reciprocal_gamma(0.5) ==
          Catch::Approx(1.0 / std::sqrt(M_PI)).epsilon(1e-14));
    // Continuity across a pole neighborhood: small but nonzero nearby.
    CHECK(std::abs(reciprocal_gamma(-0.9999)) < 1e-3);
}
