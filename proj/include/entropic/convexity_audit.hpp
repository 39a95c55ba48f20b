#pragma once

// Ratio test for K-displacement convexity of the entropy against Q^beta.
//
// With A_s = {g(s) > 1/2}, B_s = {g(s) > 0} and C_s(t) = {g(s) > (1-t)/2},
// any bound Ric >= K (K <= 0) forces
//
//     log Q(C_s(t)) - (1 - t) log Q(A_s) >= (K/2) t (1 - t)
//
// for every s, t in (0, 1). The audit evaluates the left side exactly and
// reports the largest K it still admits; as s -> 0 that K diverges to -inf.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "entropic/entropic_measure.hpp"

namespace entropic {

struct ConvexityAuditRow {
    double beta;
    double s;
    double t;
    double log_QA;     ///< log Q(A_s)
    double log_QC;     ///< log Q(C_s(t))
    double log_ratio;  ///< log_QC - (1 - t) log_QA
    double implied_K;  ///< 2 log_ratio / (t (1 - t))
};

/// Smallest s accepted by the scan.
inline constexpr double kScanFloor = 1e-12;

/// C_s(t) = {g(s) > (1 - t)/2}.
double c_set_threshold(double t);

/// -log Q(C_s(t)), a lower bound for the entropy at time t of any geodesic
/// from the conditioned measure on A_s to Q^beta.
double entropy_lower_bound(double s, double t, EntropicParams params);

ConvexityAuditRow audit_row(double s, double t, EntropicParams params);

struct ScanResult {
    std::vector<ConvexityAuditRow> rows;
    /// First row index from which implied_K is strictly decreasing to the end.
    std::optional<std::size_t> decreasing_from;
    double min_implied_K;

    /// Whether the scanned rows contradict Ric >= K. Positive K is refuted
    /// exactly when K = 0 is (a bound Ric >= K > 0 implies Ric >= 0).
    bool refutes(double K) const;
};

/// Audits every s in `s_grid` (strictly decreasing, each >= kScanFloor) at
/// fixed t in (0, 1). Throws DomainError for invalid t or grid and
/// NumericalFloorError for s below the floor.
ScanResult scan(double t, EntropicParams params, std::span<const double> s_grid);

/// s = 10^-1, ..., 10^-decades.
std::vector<double> decade_grid(int decades);

struct Proportion {
    double estimate;
    double std_error;
};

struct MonteCarloCrossCheck {
    Proportion q_a;
    Proportion q_c;
    double exact_q_a;
    double exact_q_c;
    std::size_t n_samples;
    std::uint64_t seed;
    /// Both estimates within 4 standard errors of the closed forms.
    bool pass;
};

/// Empirical frequencies of A_s and C_s(t) from samples on the single-knot
/// partition {s}. Requires n_samples >= 1000.
MonteCarloCrossCheck monte_carlo_cross_check(double s, double t, EntropicParams params, std::size_t n_samples,
                                             std::uint64_t seed);

}  // namespace entropic
