#pragma once

#include <functional>

namespace entropic::special {

/// Integrand of the form x^(a-1) (1-x)^(b-1) w(x) on a subinterval of [0, 1],
/// with w bounded and continuous. The power factors are kept symbolic so the
/// endpoint singularities can be removed analytically.
struct BetaWeightedIntegrand {
    double a = 1.0;
    double b = 1.0;
    std::function<double(double)> weight;  ///< empty means w == 1
};

/// Adaptive Gauss-Kronrod quadrature of `f` over [lo, hi], 0 <= lo < hi <= 1.
/// a = 0 is accepted when lo > 0 (and b = 0 when hi < 1).
///
/// Near x = 0 (resp. 1) with a < 1 (resp. b < 1) the singular factor is handled
/// by substitution: the exact singular part w(0) x^(a-1) is integrated in
/// closed form and the regular remainder is integrated over a logarithmic
/// coordinate. This keeps the result accurate for shapes down to 1e-9.
///
/// The error target is tol * max(1, |result|). Throws ConvergenceError if the
/// target is not met within the subdivision budget, and DomainError for
/// invalid bounds or shapes.
double quadrature_oracle(const BetaWeightedIntegrand& f, double lo, double hi, double tol = 1e-10);

}  // namespace entropic::special
