#pragma once

// Special functions behind every exact probability in the library:
// log-Gamma, log-Beta and the regularized incomplete Beta function,
// including the regime of shape parameters down to ~1e-9.

namespace entropic::special {

/// Validated pair of Beta shape parameters.
class BetaPair {
public:
    BetaPair(double a, double b);

    double a() const noexcept { return a_; }
    double b() const noexcept { return b_; }

    /// Swapped pair (b, a); the law of 1 - X for X ~ Beta(a, b).
    BetaPair reflected() const noexcept { return BetaPair(b_, a_, Unchecked{}); }

private:
    struct Unchecked {};
    BetaPair(double a, double b, Unchecked) noexcept : a_(a), b_(b) {}

    double a_;
    double b_;
};

/// ln Gamma(x) for finite x > 0. Throws DomainError otherwise.
double log_gamma(double x);

/// ln B(a, b) = ln Gamma(a) + ln Gamma(b) - ln Gamma(a + b).
double log_beta(BetaPair p);

/// Both tails of the Beta(a, b) law at x, each in log space and each
/// computed directly (never as 1 - the other tail when that would cancel).
struct BetaTails {
    double log_lower;  ///< ln I_x(a, b)
    double log_upper;  ///< ln (1 - I_x(a, b))
};

BetaTails log_inc_beta_tails(double x, BetaPair p);

/// I_x(a, b), the Beta(a, b) CDF at x in [0, 1].
double reg_inc_beta(double x, BetaPair p);

/// 1 - I_x(a, b), accurate in relative terms when it is small.
double reg_inc_beta_upper(double x, BetaPair p);

}  // namespace entropic::special
