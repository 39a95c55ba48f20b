#pragma once

// Probability measures on [0, 1] represented through their quantile
// functions. The map g -> g_* Leb is an isometry between nondecreasing
// right-continuous maps [0,1] -> [0,1] under the L2 metric and measures
// under the 2-Wasserstein metric, so distances and geodesics are computed
// on quantile functions exactly.

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace entropic {

/// Locations closer than this are treated as the same atom.
inline constexpr double kAtomMergeTolerance = 1e-14;

struct Atom {
    double location;
    double mass;
};

/// Finitely supported probability measure on [0, 1]. Atoms are kept sorted
/// by location with coincident locations merged.
class DiscreteMeasure {
public:
    explicit DiscreteMeasure(std::vector<Atom> atoms);

    static DiscreteMeasure dirac(double location);

    std::span<const Atom> atoms() const noexcept { return atoms_; }
    std::size_t size() const noexcept { return atoms_.size(); }

    /// g(s) = inf{ r in [0,1] : mu([0, r]) > s }, with inf of the empty set = 1.
    double quantile(double s) const;

    friend bool operator==(const DiscreteMeasure&, const DiscreteMeasure&);

private:
    std::vector<Atom> atoms_;
};

/// One piece of a quantile function: on [start, next start) the function
/// runs linearly from `left` to the limit `right`. Step pieces have left == right.
struct QuantilePiece {
    double start;
    double left;
    double right;

    bool flat() const noexcept { return left == right; }
    friend bool operator==(const QuantilePiece&, const QuantilePiece&) = default;
};

/// Nondecreasing right-continuous map [0,1] -> [0,1], piecewise linear with
/// possible jumps between pieces. Step functions (every piece flat) are the
/// canonical form; adjacent flat pieces with equal value are merged.
class QuantileFunction {
public:
    /// Right-continuous step function taking value v_i on [s_i, s_{i+1}).
    /// Requires s_0 = 0 and strictly increasing s_i < 1.
    static QuantileFunction step(std::span<const std::pair<double, double>> breakpoints);

    /// Continuous piecewise-linear interpolant of knots (s_i, v_i) with
    /// s_0 = 0 and s_last = 1.
    static QuantileFunction linear(std::span<const std::pair<double, double>> knots);

    static QuantileFunction from_pieces(std::vector<QuantilePiece> pieces);

    static QuantileFunction constant(double value);

    /// g(s) = s, the quantile function of Lebesgue measure on [0, 1].
    static QuantileFunction identity();

    /// Right-continuous value at s in [0, 1]; at s = 1 the left limit.
    double operator()(double s) const;

    bool is_step() const noexcept;

    std::span<const QuantilePiece> pieces() const noexcept { return pieces_; }

    /// Right end of piece i (1 for the last piece).
    double piece_end(std::size_t i) const noexcept {
        return i + 1 < pieces_.size() ? pieces_[i + 1].start : 1.0;
    }

    /// (s_i, v_i) list; only valid for step functions.
    std::vector<std::pair<double, double>> breakpoints() const;

    friend bool operator==(const QuantileFunction&, const QuantileFunction&) = default;

private:
    explicit QuantileFunction(std::vector<QuantilePiece> pieces);

    std::vector<QuantilePiece> pieces_;
};

/// Psi(g) = g_* Leb for a step quantile function: one atom per piece.
DiscreteMeasure pushforward_leb(const QuantileFunction& g);

/// Psi^{-1}(mu) = g_mu, as a step function with jumps at the cumulative masses.
QuantileFunction inverse_distribution(const DiscreteMeasure& m);

/// ||f - g||_{L2[0,1]}, computed exactly on the merged breakpoint grid.
double w2_distance(const QuantileFunction& f, const QuantileFunction& g);

/// W2 between two discrete measures via the explicit monotone coupling.
double brute_force_w2(const DiscreteMeasure& m1, const DiscreteMeasure& m2);

/// gamma(t) = (1 - t) f + t g, the unique geodesic in the L2 geometry.
QuantileFunction geodesic(const QuantileFunction& f, const QuantileFunction& g, double t);

//--------------------------------------------------------------------------
// Relative entropy
//--------------------------------------------------------------------------

/// Density rho_i on the cells of a partition with reference masses m_i.
/// Set `absolutely_continuous` to false to declare a singular measure.
struct PiecewiseDensity {
    std::vector<double> reference_mass;
    std::vector<double> density;
    bool absolutely_continuous = true;
};

/// Event {g : g(s) > threshold} under a reference law on quantile functions.
struct ThresholdEvent {
    double s;
    double threshold;
};

/// The reference measure conditioned on an event: (1 / mass) 1_event ref.
class RestrictedMeasure {
public:
    RestrictedMeasure(std::string base, ThresholdEvent event, double mass);

    const std::string& base() const noexcept { return base_; }
    const ThresholdEvent& event() const noexcept { return event_; }
    double mass() const noexcept { return mass_; }

private:
    std::string base_;
    ThresholdEvent event_;
    double mass_;
};

/// Ent(mu | m) = sum_i rho_i log(rho_i) m_i; +inf for declared singular input.
/// Throws DomainError if |sum_i rho_i m_i - 1| > 1e-9.
double entropy(const PiecewiseDensity& rho);

/// Ent = -log(mass) for a normalized restriction.
double entropy(const RestrictedMeasure& mu);

/// rho (x) rho' on the product partition.
PiecewiseDensity tensor_product(const PiecewiseDensity& lhs, const PiecewiseDensity& rhs);

//--------------------------------------------------------------------------
// K-convexity along a sampled path
//--------------------------------------------------------------------------

struct PathValue {
    double t;
    double value;
};

struct KConvexityVerdict {
    bool holds;
    double worst_margin;      ///< max_j (e_j - bound_j); <= 0 when the inequality holds
    std::size_t worst_index;
};

/// Checks e_j <= t_j e1 + (1 - t_j) e0 - (K/2) t_j (1 - t_j) dist^2 for all j.
KConvexityVerdict k_convexity_check(std::span<const PathValue> values, double e0, double e1, double dist,
                                    double K);

}  // namespace entropic
