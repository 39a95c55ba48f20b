#include "entropic/entropic_measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "entropic/errors.hpp"
#include "entropic/specialfn.hpp"

namespace entropic {

namespace {

constexpr double kMinGap = 1e-12;

void require_open_unit(const char* where, const char* name, double v) {
    if (!(v > 0.0 && v < 1.0)) {
        detail::domain_fail(where, std::string(name) + " must lie in (0, 1), got " + std::to_string(v));
    }
}

}  // namespace

Partition::Partition(std::vector<double> knots) : knots_(std::move(knots)) {
    if (knots_.size() < 2 || knots_.front() != 0.0 || knots_.back() != 1.0) {
        detail::domain_fail("Partition", "knots must start at 0 and end at 1");
    }
    for (std::size_t i = 0; i + 1 < knots_.size(); ++i) {
        if (!(knots_[i + 1] - knots_[i] > kMinGap)) {
            detail::domain_fail("Partition", "knots must be strictly increasing with gaps above 1e-12");
        }
    }
}

Partition Partition::dyadic(int level) {
    if (level < 0 || level > 30) detail::domain_fail("Partition::dyadic", "level must lie in [0, 30]");
    const std::size_t cells = std::size_t{1} << level;
    std::vector<double> knots(cells + 1);
    for (std::size_t i = 0; i <= cells; ++i) knots[i] = std::ldexp(static_cast<double>(i), -level);
    return Partition(std::move(knots));
}

Partition Partition::single(double s) {
    require_open_unit("Partition::single", "s", s);
    return Partition({0.0, s, 1.0});
}

Partition Partition::coarsened() const {
    std::vector<double> knots;
    knots.reserve(knots_.size() / 2 + 2);
    for (std::size_t i = 0; i + 1 < knots_.size(); i += 2) knots.push_back(knots_[i]);
    knots.push_back(1.0);
    return Partition(std::move(knots));
}

EntropicParams::EntropicParams(double beta) : beta_(beta) {
    if (!(beta > 0.0) || !std::isfinite(beta)) {
        detail::domain_fail("EntropicParams", "beta must be positive and finite, got " + std::to_string(beta));
    }
}

QuantileFunction EntropicSample::as_quantile() const {
    std::vector<std::pair<double, double>> breakpoints;
    breakpoints.reserve(values.size() + 1);
    breakpoints.emplace_back(0.0, 0.0);
    const auto inner = partition.interior();
    for (std::size_t i = 0; i < values.size(); ++i) breakpoints.emplace_back(inner[i], values[i]);
    return QuantileFunction::step(breakpoints);
}

double marginal_log_density(const Partition& p, EntropicParams params, std::span<const double> x) {
    if (x.size() != p.interior_count()) {
        detail::domain_fail("marginal_log_density", "point dimension does not match the partition");
    }
    const double beta = params.beta();
    double log_density = special::log_gamma(beta);
    double previous = 0.0;
    for (std::size_t i = 0; i <= x.size(); ++i) {
        const double next = i < x.size() ? x[i] : 1.0;
        const double increment = next - previous;
        if (!(increment > 0.0)) {
            detail::domain_fail("marginal_log_density", "x must be strictly increasing inside (0, 1)");
        }
        const double shape = beta * p.gap(i);
        log_density += (shape - 1.0) * std::log(increment) - special::log_gamma(shape);
        previous = next;
    }
    return log_density;
}

EntropicSample sample(const Partition& p, EntropicParams params, Rng& rng) {
    const std::size_t cells = p.cell_count();
    std::vector<double> log_g(cells);
    double log_max = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < cells; ++i) {
        log_g[i] = rng.log_gamma_variate(params.beta() * p.gap(i));
        log_max = std::max(log_max, log_g[i]);
    }
    double scaled_sum = 0.0;
    for (double l : log_g) scaled_sum += std::exp(l - log_max);
    const double log_total = log_max + std::log(scaled_sum);
    for (double& l : log_g) l -= log_total;

    // Prefix sums from the left while below 1/2, suffix sums from the right
    // afterwards; each value is then accurate relative to its distance from
    // the nearer endpoint.
    std::vector<double> prefix(cells);
    std::vector<double> suffix(cells);
    double acc = 0.0;
    for (std::size_t i = 0; i < cells; ++i) {
        acc += std::exp(log_g[i]);
        prefix[i] = acc;
    }
    acc = 0.0;
    for (std::size_t i = cells; i-- > 0;) {
        acc += std::exp(log_g[i]);
        suffix[i] = acc;
    }
    std::vector<double> values(cells - 1);
    for (std::size_t k = 0; k + 1 < cells; ++k) {
        // value k is the sum of increments 0..k
        const double v = prefix[k] <= 0.5 ? prefix[k] : 1.0 - suffix[k + 1];
        values[k] = std::clamp(v, k > 0 ? values[k - 1] : 0.0, 1.0);
    }
    return EntropicSample{p, std::move(values), std::move(log_g)};
}

double bridge_covariance(double s, double t, EntropicParams params) {
    require_open_unit("bridge_covariance", "s", s);
    require_open_unit("bridge_covariance", "t", t);
    return std::min(s, t) * (1.0 - std::max(s, t)) / (params.beta() + 1.0);
}

double log_prob_above(double s, double c, EntropicParams params) {
    require_open_unit("prob_above", "s", s);
    if (!(c >= 0.0 && c < 1.0)) {
        detail::domain_fail("prob_above", "threshold must lie in [0, 1), got " + std::to_string(c));
    }
    const special::BetaPair shapes(params.beta() * s, params.beta() * (1.0 - s));
    return special::log_inc_beta_tails(c, shapes).log_upper;
}

double prob_above(double s, double c, EntropicParams params) { return std::exp(log_prob_above(s, c, params)); }

}  // namespace entropic
