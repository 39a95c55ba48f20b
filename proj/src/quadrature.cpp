#include "entropic/quadrature.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "entropic/errors.hpp"

namespace entropic::special {

namespace {

// Bisection budget per integration piece.
constexpr std::size_t kMaxSegments = 4000;

// Largest y for which mid * exp(-y) stays a normal double for mid >= 1e-300.
constexpr double kExpCutoff = 700.0;

struct Partial {
    double value = 0.0;
    double error = 0.0;

    Partial& operator+=(const Partial& o) {
        value += o.value;
        error += o.error;
        return *this;
    }
};

struct Segment {
    double lo;
    double hi;
    double value;
    double error;
};

template <class F>
Segment kronrod_segment(F& f, double lo, double hi) {
    using Rule = boost::math::quadrature::gauss_kronrod<double, 15>;
    double err = 0.0;
    const double v = Rule::integrate(f, lo, hi, 0, 0.0, &err);
    // The rule reports its error on the reference interval [-1, 1].
    return {lo, hi, v, err * (hi - lo) / 2};
}

// Globally adaptive Gauss-Kronrod (15 points): bisect the segment with the
// largest error until the total meets tol * max(1, |value|).
template <class F>
Partial gauss_kronrod(F&& f, double lo, double hi, double tol) {
    auto by_error = [](const Segment& l, const Segment& r) { return l.error < r.error; };
    std::vector<Segment> heap{kronrod_segment(f, lo, hi)};
    double value = heap.front().value;
    double error = heap.front().error;
    while (error > tol * std::max(1.0, std::abs(value)) && heap.size() < kMaxSegments) {
        std::pop_heap(heap.begin(), heap.end(), by_error);
        const Segment worst = heap.back();
        const double mid = 0.5 * (worst.lo + worst.hi);
        if (!(mid > worst.lo && mid < worst.hi)) {
            std::push_heap(heap.begin(), heap.end(), by_error);
            break;
        }
        const Segment left = kronrod_segment(f, worst.lo, mid);
        const Segment right = kronrod_segment(f, mid, worst.hi);
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.back() = left;
        std::push_heap(heap.begin(), heap.end(), by_error);
        heap.push_back(right);
        std::push_heap(heap.begin(), heap.end(), by_error);
    }
    Partial total;
    for (const Segment& seg : heap) total += Partial{seg.value, seg.error};
    return total;
}

// Integral of x^(a-1) (1-x)^(b-1) w(x) over [lo, hi] with hi <= 1/2 so that
// only the left endpoint can be singular.
Partial integrate_left(double a, double b, const std::function<double(double)>& w, double lo, double hi,
                       double tol) {
    auto regular = [&](double x) { return std::pow(1.0 - x, b - 1.0) * w(x); };
    // Integer a >= 1 is a polynomial factor; any other a is nonsmooth at 0.
    const bool smooth_at_zero = a >= 1.0 && a == std::floor(a);
    if (smooth_at_zero || (lo > 0.0 && a >= 1.0)) {
        return gauss_kronrod([&](double x) { return std::pow(x, a - 1.0) * regular(x); }, lo, hi, tol);
    }
    if (lo > 0.0) {
        // x = e^u removes the x^(a-1) growth: x^(a-1) dx = x^a du
        return gauss_kronrod(
            [&](double u) {
                const double x = std::exp(u);
                return std::pow(x, a) * regular(x);
            },
            std::log(lo), std::log(hi), tol);
    }
    // x = hi e^{-y}: int_0^hi x^(a-1) h(x) dx
    //   = hi^a [ h(0)/a + int_0^inf e^{-a y} (h(hi e^{-y}) - h(0)) dy ]
    const double h0 = regular(0.0);
    const double scale = std::pow(hi, a);
    auto remainder = [&](double y) {
        const double x = hi * std::exp(-y);
        return std::exp(-a * y) * (regular(x) - h0);
    };
    Partial p = gauss_kronrod(remainder, 0.0, 40.0, tol);
    p += gauss_kronrod(remainder, 40.0, kExpCutoff, tol);
    return {scale * (h0 / a + p.value), scale * p.error};
}

}  // namespace

double quadrature_oracle(const BetaWeightedIntegrand& f, double lo, double hi, double tol) {
    if (!(lo >= 0.0 && lo < hi && hi <= 1.0)) {
        detail::domain_fail("quadrature_oracle",
                            "need 0 <= lo < hi <= 1, got [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    }
    // a = 0 (b = 0) is integrable only away from the left (right) endpoint.
    const bool a_ok = std::isfinite(f.a) && (f.a > 0.0 || (f.a == 0.0 && lo > 0.0));
    const bool b_ok = std::isfinite(f.b) && (f.b > 0.0 || (f.b == 0.0 && hi < 1.0));
    if (!a_ok || !b_ok) {
        detail::domain_fail("quadrature_oracle", "exponent shapes must be positive and finite");
    }
    if (!(tol > 0.0)) detail::domain_fail("quadrature_oracle", "tolerance must be positive");

    const std::function<double(double)> w = f.weight ? f.weight : [](double) { return 1.0; };
    const std::function<double(double)> w_reflected = [&w](double z) { return w(1.0 - z); };

    // Split at 1/2 (clamped into [lo, hi]); the right part is integrated in
    // the reflected coordinate z = 1 - x.
    const double split = std::clamp(0.5, lo, hi);
    Partial total;
    // Up to four adaptive pieces (two per side); each gets a quarter of tol.
    const double piece_tol = tol / 4.0;
    if (split > lo) total += integrate_left(f.a, f.b, w, lo, split, piece_tol);
    if (hi > split) total += integrate_left(f.b, f.a, w_reflected, 1.0 - hi, 1.0 - split, piece_tol);

    if (!std::isfinite(total.value) || total.error > tol * std::max(1.0, std::abs(total.value))) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "quadrature_oracle: error estimate %.3g exceeds tolerance %.3g (value %.17g)",
                      total.error, tol, total.value);
        throw ConvergenceError(buf);
    }
    return total.value;
}

}  // namespace entropic::special
