#include "entropic/convexity_audit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "entropic/errors.hpp"

namespace entropic {

namespace {

void require_open_unit(const char* where, const char* name, double v) {
    if (!(v > 0.0 && v < 1.0)) {
        detail::domain_fail(where, std::string(name) + " must lie in (0, 1), got " + std::to_string(v));
    }
}

}  // namespace

double c_set_threshold(double t) {
    if (!(t >= 0.0 && t <= 1.0)) detail::domain_fail("c_set_threshold", "t must lie in [0, 1]");
    return (1.0 - t) / 2.0;
}

double entropy_lower_bound(double s, double t, EntropicParams params) {
    require_open_unit("entropy_lower_bound", "t", t);
    return -log_prob_above(s, c_set_threshold(t), params);
}

ConvexityAuditRow audit_row(double s, double t, EntropicParams params) {
    require_open_unit("audit_row", "s", s);
    require_open_unit("audit_row", "t", t);
    ConvexityAuditRow row{};
    row.beta = params.beta();
    row.s = s;
    row.t = t;
    row.log_QA = log_prob_above(s, c_set_threshold(0.0), params);
    row.log_QC = log_prob_above(s, c_set_threshold(t), params);
    row.log_ratio = row.log_QC - (1.0 - t) * row.log_QA;
    row.implied_K = 2.0 * row.log_ratio / (t * (1.0 - t));
    return row;
}

bool ScanResult::refutes(double K) const {
    if (rows.empty()) return false;
    return K <= 0.0 ? K > min_implied_K : 0.0 > min_implied_K;
}

ScanResult scan(double t, EntropicParams params, std::span<const double> s_grid) {
    require_open_unit("scan", "t", t);
    if (s_grid.empty()) detail::domain_fail("scan", "s grid is empty");
    for (std::size_t i = 0; i < s_grid.size(); ++i) {
        const double s = s_grid[i];
        if (s < kScanFloor) {
            throw NumericalFloorError("scan: s = " + std::to_string(s) + " is below the floor 1e-12");
        }
        require_open_unit("scan", "s", s);
        if (i > 0 && !(s < s_grid[i - 1])) detail::domain_fail("scan", "s grid must be strictly decreasing");
    }

    ScanResult result;
    result.rows.reserve(s_grid.size());
    result.min_implied_K = std::numeric_limits<double>::infinity();
    for (double s : s_grid) {
        result.rows.push_back(audit_row(s, t, params));
        result.min_implied_K = std::min(result.min_implied_K, result.rows.back().implied_K);
    }
    std::size_t start = result.rows.size() - 1;
    while (start > 0 && result.rows[start].implied_K < result.rows[start - 1].implied_K) --start;
    if (start + 1 < result.rows.size()) result.decreasing_from = start;
    return result;
}

std::vector<double> decade_grid(int decades) {
    if (decades < 1) detail::domain_fail("decade_grid", "need at least one decade");
    std::vector<double> grid;
    grid.reserve(static_cast<std::size_t>(decades));
    for (int k = 1; k <= decades; ++k) grid.push_back(std::pow(10.0, -k));
    return grid;
}

MonteCarloCrossCheck monte_carlo_cross_check(double s, double t, EntropicParams params, std::size_t n_samples,
                                             std::uint64_t seed) {
    require_open_unit("monte_carlo_cross_check", "s", s);
    require_open_unit("monte_carlo_cross_check", "t", t);
    if (n_samples < 1000) detail::domain_fail("monte_carlo_cross_check", "need at least 1000 samples");

    const Partition partition = Partition::single(s);
    const double log_a = std::log(c_set_threshold(0.0));
    const double log_c = std::log(c_set_threshold(t));
    Rng rng(seed);
    std::size_t hits_a = 0;
    std::size_t hits_c = 0;
    for (std::size_t i = 0; i < n_samples; ++i) {
        // g(s) is the first increment; compare in log space so that draws
        // far below the double range still count as positive.
        const double log_g = sample(partition, params, rng).log_increments[0];
        hits_a += log_g > log_a;
        hits_c += log_g > log_c;
    }

    MonteCarloCrossCheck out{};
    out.n_samples = n_samples;
    out.seed = seed;
    out.exact_q_a = prob_above(s, c_set_threshold(0.0), params);
    out.exact_q_c = prob_above(s, c_set_threshold(t), params);
    const double n = static_cast<double>(n_samples);
    auto proportion = [n](std::size_t hits, double exact) {
        return Proportion{static_cast<double>(hits) / n, std::sqrt(exact * (1.0 - exact) / n)};
    };
    out.q_a = proportion(hits_a, out.exact_q_a);
    out.q_c = proportion(hits_c, out.exact_q_c);
    auto within = [](const Proportion& p, double exact) {
        return std::abs(p.estimate - exact) <= 4.0 * p.std_error;
    };
    out.pass = within(out.q_a, out.exact_q_a) && within(out.q_c, out.exact_q_c);
    return out;
}

}  // namespace entropic
