#include <doctest.h>

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <numbers>
#include <vector>

#include "entropic/errors.hpp"
#include "entropic/quadrature.hpp"
#include "entropic/specialfn.hpp"

using namespace entropic;
using namespace entropic::special;

TEST_CASE("log_gamma closed forms") {
    CHECK(log_gamma(1.0) == 0.0);
    CHECK(log_gamma(2.0) == 0.0);
    CHECK(log_gamma(5.0) == doctest::Approx(std::log(24.0)).epsilon(1e-14));
    CHECK(log_gamma(0.5) == doctest::Approx(0.5 * std::log(std::numbers::pi)).epsilon(1e-14));
}

TEST_CASE("log_gamma at 1/2 matches quadrature of the defining integral") {
    // t = x / (1 - x): Gamma(a) = int_0^1 x^{a-1} (1-x)^{-a-1} exp(-x/(1-x)) dx
    const double a = 0.5;
    BetaWeightedIntegrand f{a, 1.0, [a](double x) {
                                if (x >= 1.0) return 0.0;
                                return std::pow(1.0 - x, -a - 1.0) * std::exp(-x / (1.0 - x));
                            }};
    const double gamma_half = quadrature_oracle(f, 0.0, 1.0, 1e-12);
    CHECK(std::log(gamma_half) == doctest::Approx(log_gamma(0.5)).epsilon(1e-10));
}

TEST_CASE("log_gamma agrees with an independent implementation") {
    for (double x = 1e-300; x < 1e6; x *= 1.37) {
        const double ref = boost::math::lgamma(x);
        CHECK(std::abs(log_gamma(x) - ref) <= 1e-12 * std::max(1.0, std::abs(ref)));
    }
    for (double x = 0.01; x < 12.0; x += 0.0137) {
        const double ref = boost::math::lgamma(x);
        CHECK(std::abs(log_gamma(x) - ref) <= 1e-12 * std::max(1.0, std::abs(ref)));
    }
}

TEST_CASE("log_gamma recurrence and reflection") {
    for (double x = 1e-6; x < 1e5; x *= 1.9) {
        CHECK(std::abs(log_gamma(x + 1.0) - log_gamma(x) - std::log(x)) <= 1e-10);
    }
    for (double x = 0.01; x < 1.0; x += 0.01) {
        const double rhs = std::log(std::numbers::pi) - std::log(std::sin(std::numbers::pi * x));
        CHECK(std::abs(log_gamma(x) + log_gamma(1.0 - x) - rhs) <= 1e-10);
    }
}

TEST_CASE("log_gamma rejects nonpositive and non-finite input") {
    CHECK_THROWS_AS(log_gamma(0.0), DomainError);
    CHECK_THROWS_AS(log_gamma(-1.5), DomainError);
    CHECK_THROWS_AS(log_gamma(std::numeric_limits<double>::infinity()), DomainError);
    CHECK_THROWS_AS(log_gamma(std::nan("")), DomainError);
}

TEST_CASE("BetaPair invariants") {
    CHECK_THROWS_AS(BetaPair(0.0, 1.0), DomainError);
    CHECK_THROWS_AS(BetaPair(1.0, -2.0), DomainError);
    CHECK_THROWS_AS(BetaPair(1.0, std::numeric_limits<double>::infinity()), DomainError);
    const BetaPair p(0.25, 3.0);
    CHECK(p.reflected().a() == 3.0);
    CHECK(p.reflected().b() == 0.25);
}

TEST_CASE("reg_inc_beta closed forms") {
    CHECK(reg_inc_beta(0.7, BetaPair(1, 1)) == doctest::Approx(0.7).epsilon(1e-15));
    CHECK(reg_inc_beta(0.5, BetaPair(3, 3)) == doctest::Approx(0.5).epsilon(1e-15));
    const double x = 0.3;
    const double poly = 6 * x * x - 8 * x * x * x + 3 * x * x * x * x;  // I_x(2,3)
    CHECK(poly == doctest::Approx(0.3483).epsilon(1e-12));
    CHECK(reg_inc_beta(x, BetaPair(2, 3)) == doctest::Approx(poly).epsilon(1e-14));
    CHECK(reg_inc_beta(0.0, BetaPair(0.3, 2)) == 0.0);
    CHECK(reg_inc_beta(1.0, BetaPair(0.3, 2)) == 1.0);
    CHECK_THROWS_AS(reg_inc_beta(-0.1, BetaPair(1, 1)), DomainError);
    CHECK_THROWS_AS(reg_inc_beta(1.1, BetaPair(1, 1)), DomainError);
}

TEST_CASE("reg_inc_beta agrees with quadrature on the shape grid") {
    const std::vector<double> shapes = {1e-8, 1e-4, 0.1, 1.0, 10.0};
    double worst = 0.0;
    for (double a : shapes) {
        for (double b : shapes) {
            const BetaPair p(a, b);
            const BetaWeightedIntegrand f{a, b, {}};
            // Normalizer from the same quadrature, split at 1/2, so no
            // special-function value enters the reference.
            const double left_half = quadrature_oracle(f, 0.0, 0.5, 1e-13);
            const double right_half = quadrature_oracle(f, 0.5, 1.0, 1e-13);
            const double total = left_half + right_half;
            for (int k = 1; k <= 9; ++k) {
                const double x = 0.1 * k;
                const double lower = x <= 0.5 ? quadrature_oracle(f, 0.0, x, 1e-13) : total - quadrature_oracle(f, x, 1.0, 1e-13);
                const double ref = lower / total;
                worst = std::max(worst, std::abs(reg_inc_beta(x, p) - ref));
                CHECK(std::abs(reg_inc_beta(x, p) - ref) <= 1e-8);
            }
        }
    }
    MESSAGE("worst |I - quadrature| = " << worst);
}

TEST_CASE("reg_inc_beta agrees with an independent implementation") {
    const std::vector<double> shapes = {1e-9, 1e-6, 1e-3, 0.05, 0.5, 1.0, 2.5, 30.0, 400.0};
    for (double a : shapes) {
        for (double b : shapes) {
            for (double x : {1e-6, 0.01, 0.2, 0.5, 0.77, 0.999}) {
                const double ref = boost::math::ibeta(a, b, x);
                CHECK(std::abs(reg_inc_beta(x, BetaPair(a, b)) - ref) <= 1e-12);
                const double ref_upper = boost::math::ibetac(a, b, x);
                if (ref_upper > 1e-290) {
                    CHECK(std::abs(reg_inc_beta_upper(x, BetaPair(a, b)) / ref_upper - 1.0) <= 1e-10);
                }
            }
        }
    }
}

TEST_CASE("reg_inc_beta reflection and monotonicity") {
    const std::vector<std::pair<double, double>> shapes = {{1e-9, 1.0}, {1e-3, 0.999}, {0.3, 0.7}, {2, 5}, {50, 0.5}};
    for (const auto& [a, b] : shapes) {
        const BetaPair p(a, b);
        double previous = 0.0;
        for (int i = 0; i <= 1000; ++i) {
            const double x = i / 1000.0;
            const double v = reg_inc_beta(x, p);
            CHECK(v >= previous);
            CHECK(std::abs(v - (1.0 - reg_inc_beta(1.0 - x, p.reflected()))) <= 1e-12);
            previous = v;
        }
    }
}

TEST_CASE("log tails stay accurate where the complement underflows") {
    // I_x(a, b) for a = 1e-9: the upper tail is ~ a * int_x^1 t^{-1} dt.
    const BetaPair p(1e-9, 1.0 - 1e-9);
    const BetaTails t = log_inc_beta_tails(0.25, p);
    CHECK(t.log_lower == doctest::Approx(std::log1p(-std::exp(t.log_upper))).epsilon(1e-15));
    CHECK(t.log_upper == doctest::Approx(std::log(1e-9 * std::log(4.0))).epsilon(1e-6));
}

TEST_CASE("quadrature_oracle examples") {
    CHECK(quadrature_oracle({1.0, 1.0, {}}, 0.0, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
    const double expected = std::numbers::pi / std::sin(0.3 * std::numbers::pi);
    CHECK(expected == doctest::Approx(3.8833).epsilon(1e-4));
    CHECK(quadrature_oracle({0.3, 0.7, {}}, 0.0, 1.0) == doctest::Approx(expected).epsilon(1e-10));
    CHECK(quadrature_oracle({0.0, 1.0, {}}, 0.25, 1.0) == doctest::Approx(std::log(4.0)).epsilon(1e-10));
}

TEST_CASE("quadrature_oracle handles tiny shapes") {
    // int_0^1 x^{a-1} dx = 1/a
    for (double a : {1e-9, 1e-6, 1e-2}) {
        CHECK(quadrature_oracle({a, 1.0, {}}, 0.0, 1.0) == doctest::Approx(1.0 / a).epsilon(1e-10));
        CHECK(quadrature_oracle({1.0, a, {}}, 0.0, 1.0) == doctest::Approx(1.0 / a).epsilon(1e-10));
    }
}

TEST_CASE("quadrature_oracle validates its domain") {
    CHECK_THROWS_AS(quadrature_oracle({1.0, 1.0, {}}, 0.5, 0.5), DomainError);
    CHECK_THROWS_AS(quadrature_oracle({1.0, 1.0, {}}, -0.1, 0.5), DomainError);
    CHECK_THROWS_AS(quadrature_oracle({0.0, 1.0, {}}, 0.0, 0.5), DomainError);
}
