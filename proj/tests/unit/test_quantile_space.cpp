#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "entropic/errors.hpp"
#include "entropic/quantile_space.hpp"

using namespace entropic;

namespace {

using Breakpoints = std::vector<std::pair<double, double>>;

DiscreteMeasure random_measure(std::mt19937_64& gen, std::size_t max_atoms) {
    std::uniform_int_distribution<std::size_t> count(1, max_atoms);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<Atom> atoms(count(gen));
    double total = 0.0;
    for (Atom& a : atoms) {
        a.location = unit(gen);
        a.mass = 0.01 + unit(gen);
        total += a.mass;
    }
    for (Atom& a : atoms) a.mass /= total;
    return DiscreteMeasure(std::move(atoms));
}

// Masses are multiples of 2^-20, so cumulative sums are exact.
DiscreteMeasure random_dyadic_measure(std::mt19937_64& gen, std::size_t max_atoms) {
    constexpr int units = 1 << 20;
    std::uniform_int_distribution<std::size_t> count(1, max_atoms);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const std::size_t n = count(gen);
    std::vector<int> cuts{0, units};
    std::uniform_int_distribution<int> cut(1, units - 1);
    while (cuts.size() < n + 1) cuts.push_back(cut(gen));
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    std::vector<Atom> atoms;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        atoms.push_back({unit(gen), std::ldexp(cuts[i + 1] - cuts[i], -20)});
    }
    return DiscreteMeasure(std::move(atoms));
}

QuantileFunction random_step(std::mt19937_64& gen, std::size_t max_steps) {
    return inverse_distribution(random_measure(gen, max_steps));
}

QuantileFunction random_linear(std::mt19937_64& gen, std::size_t max_knots) {
    std::uniform_int_distribution<std::size_t> count(1, max_knots);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const std::size_t n = count(gen);
    std::vector<double> s(n), v(n + 1);
    for (double& x : s) x = unit(gen);
    for (double& x : v) x = unit(gen);
    s[0] = 0.0;
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    v.resize(s.size() + 1);
    std::sort(v.begin(), v.end());
    Breakpoints knots;
    for (std::size_t i = 0; i < s.size(); ++i) knots.emplace_back(s[i], v[i]);
    knots.emplace_back(1.0, v[s.size()]);
    return QuantileFunction::linear(knots);
}

bool monotone(const QuantileFunction& g) {
    double previous = 0.0;
    for (const QuantilePiece& p : g.pieces()) {
        if (p.left < previous || p.right < p.left || p.left < 0.0 || p.right > 1.0) return false;
        previous = p.right;
    }
    return true;
}

}  // namespace

TEST_CASE("QuantileFunction invariants") {
    CHECK_THROWS_AS(QuantileFunction::step(Breakpoints{{0.0, 0.5}, {0.3, 0.2}}), DomainError);
    CHECK_THROWS_AS(QuantileFunction::step(Breakpoints{{0.1, 0.5}}), DomainError);
    CHECK_THROWS_AS(QuantileFunction::step(Breakpoints{{0.0, 0.5}, {0.0, 0.6}}), DomainError);
    CHECK_THROWS_AS(QuantileFunction::step(Breakpoints{{0.0, 1.5}}), DomainError);
    CHECK_THROWS_AS(QuantileFunction::step(Breakpoints{}), DomainError);

    const auto g = QuantileFunction::step(Breakpoints{{0.0, 0.1}, {0.2, 0.4}, {0.5, 0.9}});
    CHECK(g(0.0) == 0.1);
    CHECK(g(0.2) == 0.4);  // right-continuous
    CHECK(g(0.4999) == 0.4);
    CHECK(g(0.5) == 0.9);
    CHECK(g(1.0) == 0.9);
    CHECK(QuantileFunction::identity()(0.3) == doctest::Approx(0.3).epsilon(1e-15));
}

TEST_CASE("pushforward_leb examples") {
    const DiscreteMeasure dirac = pushforward_leb(QuantileFunction::constant(0.3));
    REQUIRE(dirac.size() == 1);
    CHECK(dirac.atoms()[0].location == 0.3);
    CHECK(dirac.atoms()[0].mass == 1.0);

    const DiscreteMeasure two = pushforward_leb(QuantileFunction::step(Breakpoints{{0.0, 0.0}, {0.5, 1.0}}));
    CHECK(two == DiscreteMeasure({{0.0, 0.5}, {1.0, 0.5}}));

    const DiscreteMeasure three =
        pushforward_leb(QuantileFunction::step(Breakpoints{{0.0, 0.1}, {0.2, 0.4}, {0.5, 0.9}}));
    REQUIRE(three.size() == 3);
    CHECK(three.atoms()[0].location == 0.1);
    CHECK(three.atoms()[0].mass == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(three.atoms()[1].location == 0.4);
    CHECK(three.atoms()[1].mass == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(three.atoms()[2].location == 0.9);
    CHECK(three.atoms()[2].mass == doctest::Approx(0.5).epsilon(1e-15));

    CHECK_THROWS_AS(pushforward_leb(QuantileFunction::identity()), DomainError);
}

TEST_CASE("inverse_distribution examples") {
    CHECK(inverse_distribution(DiscreteMeasure::dirac(0.7)) == QuantileFunction::constant(0.7));
    CHECK(inverse_distribution(DiscreteMeasure({{0.0, 0.5}, {1.0, 0.5}})) ==
          QuantileFunction::step(Breakpoints{{0.0, 0.0}, {0.5, 1.0}}));
    const QuantileFunction g = inverse_distribution(DiscreteMeasure({{0.1, 0.2}, {0.4, 0.3}, {0.9, 0.5}}));
    const auto bp = g.breakpoints();
    REQUIRE(bp.size() == 3);
    CHECK(bp[1].first == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(bp[2].first == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(bp[1].second == 0.4);
}

TEST_CASE("inverse_distribution follows inf{r : mu[0,r] > s} with inf of the empty set = 1") {
    const DiscreteMeasure m({{0.2, 0.25}, {0.6, 0.75}});
    CHECK(m.quantile(0.0) == 0.2);
    CHECK(m.quantile(0.25) == 0.6);
    CHECK(m.quantile(1.0) == 1.0);
    const QuantileFunction g = inverse_distribution(m);
    for (double s = 0.0; s < 1.0; s += 1.0 / 64) CHECK(g(s) == m.quantile(s));
}

TEST_CASE("DiscreteMeasure invariants and atom merging") {
    CHECK_THROWS_AS(DiscreteMeasure({{0.5, 0.6}}), DomainError);
    CHECK_THROWS_AS(DiscreteMeasure({{1.5, 1.0}}), DomainError);
    CHECK_THROWS_AS(DiscreteMeasure({{0.5, 1.5}, {0.2, -0.5}}), DomainError);
    const DiscreteMeasure merged({{0.5, 0.5}, {0.5 + 1e-15, 0.25}, {0.1, 0.25}});
    REQUIRE(merged.size() == 2);
    CHECK(merged.atoms()[1].mass == 0.75);
}

TEST_CASE("round trip is exact on dyadic masses") {
    std::mt19937_64 gen(7);
    for (int trial = 0; trial < 500; ++trial) {
        const DiscreteMeasure m = random_dyadic_measure(gen, 100);
        CHECK(pushforward_leb(inverse_distribution(m)) == m);
        const QuantileFunction g = inverse_distribution(m);
        CHECK(inverse_distribution(pushforward_leb(g)) == g);
    }
}

TEST_CASE("round trip on general masses is exact up to rounding of the cumulative sums") {
    std::mt19937_64 gen(8);
    for (int trial = 0; trial < 500; ++trial) {
        const DiscreteMeasure m = random_measure(gen, 100);
        const DiscreteMeasure back = pushforward_leb(inverse_distribution(m));
        REQUIRE(back.size() == m.size());
        for (std::size_t i = 0; i < m.size(); ++i) {
            CHECK(back.atoms()[i].location == m.atoms()[i].location);
            // the last width also absorbs the rounding deficit of the mass sum
            CHECK(std::abs(back.atoms()[i].mass - m.atoms()[i].mass) <=
                  static_cast<double>(m.size()) * std::numeric_limits<double>::epsilon());
        }
    }
}

TEST_CASE("w2_distance examples") {
    CHECK(w2_distance(QuantileFunction::constant(0.2), QuantileFunction::constant(0.7)) ==
          doctest::Approx(0.5).epsilon(1e-15));
    CHECK(w2_distance(QuantileFunction::identity(), QuantileFunction::constant(0.0)) ==
          doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-15));
    const auto g = QuantileFunction::step(Breakpoints{{0.0, 0.1}, {0.2, 0.4}, {0.5, 0.9}});
    CHECK(w2_distance(g, g) == 0.0);
}

TEST_CASE("brute_force_w2 examples") {
    const DiscreteMeasure m({{0.1, 0.3}, {0.8, 0.7}});
    CHECK(brute_force_w2(m, m) == 0.0);
    CHECK(brute_force_w2(DiscreteMeasure::dirac(0.0), DiscreteMeasure::dirac(1.0)) == 1.0);
}

TEST_CASE("isometry: quantile-space distance equals the optimal coupling cost") {
    std::mt19937_64 gen(11);
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const DiscreteMeasure a = random_measure(gen, 100);
        const DiscreteMeasure b = random_measure(gen, 100);
        const double d = w2_distance(inverse_distribution(a), inverse_distribution(b));
        const double brute = brute_force_w2(a, b);
        worst = std::max(worst, std::abs(d - brute));
        CHECK(std::abs(d - brute) <= 1e-10);
        CHECK(d <= 1.0);
    }
    MESSAGE("worst |w2 - brute force| = " << worst);
}

TEST_CASE("w2_distance is a metric on mixed step and linear inputs") {
    std::mt19937_64 gen(12);
    for (int trial = 0; trial < 300; ++trial) {
        const QuantileFunction f = trial % 2 ? random_step(gen, 30) : random_linear(gen, 30);
        const QuantileFunction g = random_linear(gen, 30);
        const QuantileFunction h = random_step(gen, 30);
        const double fg = w2_distance(f, g);
        CHECK(fg == w2_distance(g, f));
        CHECK(fg <= w2_distance(f, h) + w2_distance(h, g) + 1e-15);
        CHECK(fg <= 1.0);
    }
}

TEST_CASE("w2_distance of linear pieces matches fine midpoint sums") {
    std::mt19937_64 gen(13);
    for (int trial = 0; trial < 20; ++trial) {
        const QuantileFunction f = random_linear(gen, 8);
        const QuantileFunction g = random_step(gen, 8);
        constexpr int n = 200000;
        double sum = 0.0;
        for (int i = 0; i < n; ++i) {
            const double s = (i + 0.5) / n;
            const double d = f(s) - g(s);
            sum += d * d / n;
        }
        CHECK(w2_distance(f, g) == doctest::Approx(std::sqrt(sum)).epsilon(1e-3));
    }
}

TEST_CASE("geodesic examples") {
    const auto f = QuantileFunction::step(Breakpoints{{0.0, 0.1}, {0.5, 0.6}});
    const auto g = QuantileFunction::identity();
    CHECK(geodesic(f, g, 0.0) == f);
    CHECK(geodesic(f, g, 1.0) == g);
    const QuantileFunction mid = geodesic(QuantileFunction::constant(0.0), QuantileFunction::constant(1.0), 0.5);
    CHECK(mid == QuantileFunction::constant(0.5));
    CHECK_THROWS_AS(geodesic(f, g, 1.5), DomainError);
}

TEST_CASE("geodesics are constant speed, monotone and split distances") {
    std::mt19937_64 gen(14);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 1000; ++trial) {
        const QuantileFunction f = trial % 3 == 0 ? random_linear(gen, 20) : random_step(gen, 50);
        const QuantileFunction g = random_step(gen, 50);
        const double d = w2_distance(f, g);
        const double t1 = unit(gen);
        const double t2 = unit(gen);
        const QuantileFunction g1 = geodesic(f, g, t1);
        const QuantileFunction g2 = geodesic(f, g, t2);
        CHECK(monotone(g1));
        CHECK(std::abs(w2_distance(g1, g2) - std::abs(t1 - t2) * d) <= 1e-12);
        CHECK(std::abs(w2_distance(f, g1) - t1 * d) <= 1e-12);
        CHECK(std::abs(w2_distance(f, g1) + w2_distance(g1, g) - d) <= 1e-12);
        CHECK(d <= 1.0);
    }
}

TEST_CASE("entropy examples") {
    CHECK(entropy(PiecewiseDensity{{0.25, 0.75}, {1.0, 1.0}}) == 0.0);
    const RestrictedMeasure quarter("Q", ThresholdEvent{0.5, 0.5}, 0.25);
    CHECK(entropy(quarter) == -std::log(0.25));
    CHECK(entropy(quarter) == doctest::Approx(1.3862944).epsilon(1e-7));
    CHECK(entropy(PiecewiseDensity{{0.5, 0.5}, {2.0, 0.0}}) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
    CHECK(std::isinf(entropy(PiecewiseDensity{{1.0}, {1.0}, false})));
    CHECK_THROWS_AS(entropy(PiecewiseDensity{{0.5, 0.5}, {1.0, 1.1}}), DomainError);
    CHECK_THROWS_AS(RestrictedMeasure("Q", ThresholdEvent{0.5, 0.5}, 0.0), DomainError);
    CHECK_THROWS_AS(RestrictedMeasure("Q", ThresholdEvent{0.5, 0.5}, 1.5), DomainError);
}

TEST_CASE("RestrictedMeasure entropy is -log(mass) exactly") {
    std::mt19937_64 gen(15);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 1000; ++trial) {
        const double mass = std::max(1e-300, unit(gen));
        CHECK(entropy(RestrictedMeasure("Q", ThresholdEvent{0.3, 0.5}, mass)) == -std::log(mass));
    }
}

TEST_CASE("entropy tensorizes over product grids") {
    std::mt19937_64 gen(16);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto random_density = [&](std::size_t n) {
        PiecewiseDensity rho;
        double ref_total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            rho.reference_mass.push_back(0.05 + unit(gen));
            ref_total += rho.reference_mass.back();
        }
        double mass = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            rho.reference_mass[i] /= ref_total;
            rho.density.push_back(i % 5 == 4 ? 0.0 : unit(gen) * 3.0);
            mass += rho.density.back() * rho.reference_mass[i];
        }
        for (double& r : rho.density) r /= mass;
        return rho;
    };
    for (int trial = 0; trial < 200; ++trial) {
        const PiecewiseDensity a = random_density(1 + trial % 17);
        const PiecewiseDensity b = random_density(1 + trial % 23);
        CHECK(std::abs(entropy(tensor_product(a, b)) - entropy(a) - entropy(b)) <= 1e-12);
    }
}

TEST_CASE("k_convexity_check examples") {
    std::vector<PathValue> line;
    std::vector<PathValue> bump;
    for (int j = 1; j < 8; ++j) {
        const double t = j / 8.0;
        line.push_back({t, 0.3 * (1 - t) + 0.9 * t});
        bump.push_back({t, t * (1.0 - t)});
    }
    const KConvexityVerdict straight = k_convexity_check(line, 0.3, 0.9, 1.0, 0.0);
    CHECK(straight.holds);
    CHECK(std::abs(straight.worst_margin) <= 1e-15);

    const KConvexityVerdict equality = k_convexity_check(bump, 0.0, 0.0, 1.0, -2.0);
    CHECK(equality.holds);
    CHECK(equality.worst_margin == 0.0);

    const KConvexityVerdict fails = k_convexity_check(bump, 0.0, 0.0, 1.0, 0.0);
    CHECK_FALSE(fails.holds);
    CHECK(fails.worst_margin == 0.25);
    CHECK(bump[fails.worst_index].t == 0.5);

    CHECK_THROWS_AS(k_convexity_check(bump, 0.0, 0.0, -1.0, 0.0), DomainError);
    const std::vector<PathValue> endpoint{{1.0, 0.0}};
    CHECK_THROWS_AS(k_convexity_check(endpoint, 0.0, 0.0, 1.0, 0.0), DomainError);
}
