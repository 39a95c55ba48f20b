#pragma once

// The entropic measure Q^beta on quantile functions through its
// finite-dimensional marginals: over a partition 0 = t_0 < ... < t_{N+1} = 1
// the increments g(t_{i+1}) - g(t_i) are Dirichlet(beta (t_{i+1} - t_i)).

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "entropic/quantile_space.hpp"
#include "entropic/random.hpp"

namespace entropic {

/// Knots 0 = t_0 < t_1 < ... < t_{N+1} = 1 with gaps above 1e-12.
class Partition {
public:
    explicit Partition(std::vector<double> knots);

    /// 2^level equal cells, i.e. N = 2^level - 1 interior knots.
    static Partition dyadic(int level);

    /// The single interior knot {s}.
    static Partition single(double s);

    std::span<const double> knots() const noexcept { return knots_; }
    std::span<const double> interior() const noexcept { return {knots_.data() + 1, knots_.size() - 2}; }
    std::size_t interior_count() const noexcept { return knots_.size() - 2; }
    std::size_t cell_count() const noexcept { return knots_.size() - 1; }
    double gap(std::size_t i) const noexcept { return knots_[i + 1] - knots_[i]; }

    /// Keeps every other interior knot (t_2, t_4, ...); exact Kolmogorov
    /// marginalization of a refined partition.
    Partition coarsened() const;

    friend bool operator==(const Partition&, const Partition&) = default;

private:
    std::vector<double> knots_;
};

class EntropicParams {
public:
    explicit EntropicParams(double beta);
    double beta() const noexcept { return beta_; }

private:
    double beta_;
};

/// One draw of (g(t_1), ..., g(t_N)).
///
/// `log_increments[i]` = log(g(t_{i+1}) - g(t_i)) for i = 0..N are the exact
/// draw and are always finite, so the path is strictly increasing. `values`
/// are their cumulative sums rounded to double; increments below the
/// rounding unit can make neighbouring values compare equal.
struct EntropicSample {
    Partition partition;
    std::vector<double> values;
    std::vector<double> log_increments;

    /// Step quantile function equal to values[i-1] on [t_i, t_{i+1}) and 0 on [0, t_1).
    QuantileFunction as_quantile() const;
};

/// log of the Dirichlet density of x = (x_1..x_N) on the open simplex
/// 0 < x_1 < ... < x_N < 1. Throws DomainError for boundary or unordered x.
double marginal_log_density(const Partition& p, EntropicParams params, std::span<const double> x);

/// Exact draw: N+1 independent log-Gamma(beta * gap_i) variates,
/// normalized by a log-sum-exp and accumulated.
EntropicSample sample(const Partition& p, EntropicParams params, Rng& rng);

/// Cov(g(s), g(t)) = min(s,t) (1 - max(s,t)) / (beta + 1).
double bridge_covariance(double s, double t, EntropicParams params);

/// Q({g : g(s) > c}) = 1 - I_c(beta s, beta (1 - s)) for s in (0,1), c in [0,1).
double prob_above(double s, double c, EntropicParams params);

/// log of prob_above, computed directly in log space.
double log_prob_above(double s, double c, EntropicParams params);

}  // namespace entropic
