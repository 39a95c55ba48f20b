#include "entropic/specialfn.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "entropic/errors.hpp"

namespace entropic::special {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kEps = std::numeric_limits<double>::epsilon();

// Below this shape the incomplete Beta switches from the continued fraction
// to the endpoint series, where the mass piles up against x = 0.
constexpr double kSmallShape = 1e-3;

constexpr int kMaxContinuedFractionTerms = 20000;
constexpr int kMaxSeriesTerms = 2000000;

//--------------------------------------------------------------------------
// log-Gamma
//--------------------------------------------------------------------------

// zeta(k) for k = 2..kZetaTerms+1, by a short direct sum plus the
// Euler-Maclaurin tail.
constexpr int kZetaTerms = 40;

std::array<double, kZetaTerms + 2> make_zeta_table() {
    std::array<double, kZetaTerms + 2> z{};
    constexpr int n_direct = 20;
    // B_2j / (2j)!
    constexpr std::array<double, 6> bern = {
        1.0 / 12.0,        -1.0 / 720.0,          1.0 / 30240.0,
        -1.0 / 1209600.0,  1.0 / 47900160.0,      -691.0 / 1307674368000.0,
    };
    for (int k = 2; k < kZetaTerms + 2; ++k) {
        const double kd = k;
        double sum = 0.0;
        for (int n = n_direct - 1; n >= 1; --n) {
            sum += std::pow(static_cast<double>(n), -kd);
        }
        const double N = n_direct;
        double tail = std::pow(N, 1.0 - kd) / (kd - 1.0) + 0.5 * std::pow(N, -kd);
        // rising factor k (k+1) ... (k+2j-2)
        double rising = kd;
        for (std::size_t j = 0; j < bern.size(); ++j) {
            const double p = kd + 2.0 * static_cast<double>(j) + 1.0;
            tail += bern[j] * rising * std::pow(N, -p);
            rising *= (kd + 2.0 * static_cast<double>(j) + 1.0) * (kd + 2.0 * static_cast<double>(j) + 2.0);
        }
        z[static_cast<std::size_t>(k)] = sum + tail;
    }
    return z;
}

const std::array<double, kZetaTerms + 2>& zeta_table() {
    static const auto table = make_zeta_table();
    return table;
}

// ln Gamma(1 + z) for |z| <= 0.2: -gamma z + sum_k (-1)^k zeta(k) z^k / k.
double log_gamma_1p_small(double z) {
    const auto& zeta = zeta_table();
    double sum = 0.0;
    double zk = -z;
    for (int k = 2; k < kZetaTerms + 2; ++k) {
        zk *= -z;
        const double term = zeta[static_cast<std::size_t>(k)] * zk / k;
        sum += term;
        if (std::abs(term) < 1e-20 * std::abs(z)) break;
    }
    return -std::numbers::egamma * z + sum;
}

double log_gamma_stirling(double x) {
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    // B_2j / (2j (2j - 1)) for j = 1..7, Horner in 1/x^2
    const double series =
        inv * (1.0 / 12.0 +
               inv2 * (-1.0 / 360.0 +
                       inv2 * (1.0 / 1260.0 +
                               inv2 * (-1.0 / 1680.0 +
                                       inv2 * (1.0 / 1188.0 +
                                               inv2 * (-691.0 / 360360.0 + inv2 * (1.0 / 156.0)))))));
    return (x - 0.5) * std::log(x) - x + 0.5 * std::log(2.0 * std::numbers::pi) + series;
}

//--------------------------------------------------------------------------
// incomplete Beta
//--------------------------------------------------------------------------

double log_add(double la, double lb) {
    if (la == -kInf) return lb;
    if (lb == -kInf) return la;
    const double hi = std::max(la, lb);
    return hi + std::log1p(std::exp(std::min(la, lb) - hi));
}

// log(1 - e^l) for l <= 0
double log1m_exp(double l) {
    if (l == -kInf) return 0.0;
    if (l >= 0.0) return -kInf;
    return l > -std::numbers::ln2 ? std::log(-std::expm1(l)) : std::log1p(-std::exp(l));
}

// Lentz evaluation of the standard continued fraction for I_x(a, b);
// converges quickly for x < (a + 1) / (a + b + 2).
double beta_continued_fraction(double x, double a, double b) {
    constexpr double tiny = 1e-300;
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxContinuedFractionTerms; ++m) {
        const double md = m;
        const double m2 = 2.0 * md;
        double aa = md * (b - md) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + md) * (qab + md) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 0.5 * kEps) return h;
    }
    throw ConvergenceError("reg_inc_beta: continued fraction did not converge for a=" +
                           std::to_string(a) + " b=" + std::to_string(b) + " x=" + std::to_string(x));
}

// sum_n (1 - q)_n z^n / (n! (p + n)), so that B_z(p, q) = z^p * series.
// For q <= 1 every term is positive; for q > 1 the caller keeps z <= 1/q.
double beta_power_series(double z, double p, double q) {
    double coeff = 1.0;  // (1 - q)_n / n!
    double zn = 1.0;
    double sum = 1.0 / p;
    // geometric bound on the remaining tail
    const double tail_factor = z / (1.0 - z);
    for (int n = 1; n <= kMaxSeriesTerms; ++n) {
        const double nd = n;
        coeff *= (nd - q) / nd;
        zn *= z;
        const double term = coeff * zn / (p + nd);
        sum += term;
        if (std::abs(term) * tail_factor <= 0.25 * kEps * std::abs(sum) || coeff == 0.0) return sum;
    }
    throw ConvergenceError("reg_inc_beta: power series did not converge");
}

// sum_n (1 - q)_n (h^{p+n} - x^{p+n}) / (n! (p + n)) = B_h(p, q) - B_x(p, q), x < h.
double beta_power_series_difference(double x, double h, double p, double q) {
    const double lx = std::log(x);
    const double lh = std::log(h);
    // (h^p - x^p) / p without cancellation.
    double sum = (x > 0.0) ? std::exp(p * lx) * std::expm1(p * (lh - lx)) / p : std::exp(p * lh) / p;
    double coeff = 1.0;
    double xn = std::exp(p * lx);
    double hn = std::exp(p * lh);
    for (int n = 1; n <= kMaxSeriesTerms; ++n) {
        const double nd = n;
        coeff *= (nd - q) / nd;
        xn *= x;
        hn *= h;
        const double term = coeff * (hn - xn) / (p + nd);
        sum += term;
        if (std::abs(term) * h / (1.0 - h) <= 0.25 * kEps * std::abs(sum) || coeff == 0.0) return sum;
    }
    throw ConvergenceError("reg_inc_beta: power series did not converge");
}

// Tails for a < kSmallShape. x + y == 1 with both supplied so that the
// caller's exact complement is preserved.
BetaTails small_shape_tails(double x, double y, double a, double b) {
    const double lbeta = log_beta(BetaPair(a, b));
    const double h = std::min(0.5, 1.0 / (b + 1.0));
    const double hy = 1.0 - h;

    if (x >= h) {
        // upper integral is B_y(b, a); all series terms positive since a < 1
        const double log_upper_int = b * std::log(y) + std::log(beta_power_series(y, b, a));
        const double log_upper = log_upper_int - lbeta;
        return {log1m_exp(log_upper), log_upper};
    }

    const double log_lower = a * std::log(x) + std::log(beta_power_series(x, a, b)) - lbeta;
    const double middle = beta_power_series_difference(x, h, a, b);
    const double log_right = b * std::log(hy) + std::log(beta_power_series(hy, b, a));
    const double log_upper = log_add(std::log(middle), log_right) - lbeta;
    return {log_lower, log_upper};
}

BetaTails continued_fraction_tails(double x, double y, double a, double b, bool allow_swap = true) {
    if (allow_swap && x * (a + b + 2.0) >= a + 1.0) {
        const BetaTails r = continued_fraction_tails(y, x, b, a, false);
        return {r.log_upper, r.log_lower};
    }
    const double front = a * std::log(x) + b * std::log(y) - log_beta(BetaPair(a, b)) - std::log(a);
    const double log_lower = front + std::log(beta_continued_fraction(x, a, b));
    return {log_lower, log1m_exp(log_lower)};
}

BetaTails tails(double x, double y, double a, double b) {
    if (x == 0.0) return {-kInf, 0.0};
    if (y == 0.0) return {0.0, -kInf};
    if (std::min(a, b) < kSmallShape) {
        if (a <= b) return small_shape_tails(x, y, a, b);
        const BetaTails r = small_shape_tails(y, x, b, a);
        return {r.log_upper, r.log_lower};
    }
    return continued_fraction_tails(x, y, a, b);
}

}  // namespace

BetaPair::BetaPair(double a, double b) : a_(a), b_(b) {
    if (!(std::isfinite(a) && a > 0.0) || !(std::isfinite(b) && b > 0.0)) {
        detail::domain_fail("BetaPair", "shapes must be positive and finite, got a=" + std::to_string(a) +
                                            " b=" + std::to_string(b));
    }
}

double log_gamma(double x) {
    if (!(std::isfinite(x) && x > 0.0)) {
        detail::domain_fail("log_gamma", "argument must be positive and finite, got " + std::to_string(x));
    }
    if (x < 0.2) return log_gamma_1p_small(x) - std::log(x);
    if (x >= 0.8 && x <= 1.2) return log_gamma_1p_small(x - 1.0);
    if (x >= 1.8 && x <= 2.2) {
        const double z = x - 2.0;
        return std::log1p(z) + log_gamma_1p_small(z);
    }
    if (x >= 10.0) return log_gamma_stirling(x);

    // shift up into the Stirling range
    double shifted = x;
    double product = 1.0;
    while (shifted < 10.0) {
        product *= shifted;
        shifted += 1.0;
    }
    return log_gamma_stirling(shifted) - std::log(product);
}

double log_beta(BetaPair p) {
    return log_gamma(p.a()) + log_gamma(p.b()) - log_gamma(p.a() + p.b());
}

BetaTails log_inc_beta_tails(double x, BetaPair p) {
    if (!(x >= 0.0 && x <= 1.0)) {
        detail::domain_fail("reg_inc_beta", "x must lie in [0, 1], got " + std::to_string(x));
    }
    return tails(x, 1.0 - x, p.a(), p.b());
}

double reg_inc_beta(double x, BetaPair p) {
    return std::exp(log_inc_beta_tails(x, p).log_lower);
}

double reg_inc_beta_upper(double x, BetaPair p) {
    return std::exp(log_inc_beta_tails(x, p).log_upper);
}

}  // namespace entropic::special
