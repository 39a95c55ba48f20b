#include "entropic/quantile_space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "entropic/errors.hpp"

namespace entropic {

namespace {

constexpr double kMassTolerance = 1e-12;
constexpr double kDensityTolerance = 1e-9;

bool in_unit(double x) { return x >= 0.0 && x <= 1.0; }

// Value of piece i of f over the subcell [u, v) it contains: (value at u,
// limit at v), by linear interpolation within the piece.
std::pair<double, double> piece_values(const QuantileFunction& f, std::size_t i, double u, double v) {
    const QuantilePiece& p = f.pieces()[i];
    if (p.flat()) return {p.left, p.left};
    const double start = p.start;
    const double width = f.piece_end(i) - start;
    const double slope = (p.right - p.left) / width;
    const double at_u = u == start ? p.left : p.left + slope * (u - start);
    const double at_v = v == f.piece_end(i) ? p.right : p.left + slope * (v - start);
    return {at_u, at_v};
}

// Calls visit(u, v, f_u, f_v, g_u, g_v) for every cell of the merged grid.
template <class Visit>
void for_each_merged_cell(const QuantileFunction& f, const QuantileFunction& g, Visit&& visit) {
    std::size_t i = 0;
    std::size_t j = 0;
    double u = 0.0;
    while (i < f.pieces().size() && j < g.pieces().size()) {
        const double fe = f.piece_end(i);
        const double ge = g.piece_end(j);
        const double v = std::min(fe, ge);
        if (v > u) {
            const auto [fu, fv] = piece_values(f, i, u, v);
            const auto [gu, gv] = piece_values(g, j, u, v);
            visit(u, v, fu, fv, gu, gv);
        }
        u = v;
        if (fe == v) ++i;
        if (ge == v) ++j;
    }
}

void validate_pieces(const std::vector<QuantilePiece>& pieces) {
    if (pieces.empty()) detail::domain_fail("QuantileFunction", "needs at least one piece");
    if (pieces.front().start != 0.0) detail::domain_fail("QuantileFunction", "first breakpoint must be s = 0");
    double previous = 0.0;
    for (std::size_t i = 0; i < pieces.size(); ++i) {
        const QuantilePiece& p = pieces[i];
        if (i > 0 && !(p.start > pieces[i - 1].start)) {
            detail::domain_fail("QuantileFunction", "breakpoints must be strictly increasing");
        }
        if (!(p.start < 1.0)) detail::domain_fail("QuantileFunction", "breakpoints must lie in [0, 1)");
        if (!in_unit(p.left) || !in_unit(p.right)) {
            detail::domain_fail("QuantileFunction", "values must lie in [0, 1]");
        }
        if (p.left > p.right || p.left < previous) {
            detail::domain_fail("QuantileFunction", "values must be nondecreasing");
        }
        previous = p.right;
    }
}

std::vector<QuantilePiece> merge_flat_runs(std::vector<QuantilePiece> pieces) {
    std::vector<QuantilePiece> out;
    out.reserve(pieces.size());
    for (const QuantilePiece& p : pieces) {
        if (!out.empty() && out.back().flat() && p.flat() && out.back().left == p.left) continue;
        out.push_back(p);
    }
    return out;
}

}  // namespace

//--------------------------------------------------------------------------
// DiscreteMeasure
//--------------------------------------------------------------------------

DiscreteMeasure::DiscreteMeasure(std::vector<Atom> atoms) {
    if (atoms.empty()) detail::domain_fail("DiscreteMeasure", "needs at least one atom");
    double total = 0.0;
    for (const Atom& a : atoms) {
        if (!in_unit(a.location)) detail::domain_fail("DiscreteMeasure", "atom locations must lie in [0, 1]");
        if (!(a.mass > 0.0) || !std::isfinite(a.mass)) {
            detail::domain_fail("DiscreteMeasure", "atom masses must be positive");
        }
        total += a.mass;
    }
    if (std::abs(total - 1.0) > kMassTolerance) {
        detail::domain_fail("DiscreteMeasure", "masses must sum to 1, got " + std::to_string(total));
    }
    std::stable_sort(atoms.begin(), atoms.end(),
                     [](const Atom& l, const Atom& r) { return l.location < r.location; });
    atoms_.reserve(atoms.size());
    for (const Atom& a : atoms) {
        if (!atoms_.empty() && a.location - atoms_.back().location <= kAtomMergeTolerance) {
            atoms_.back().mass += a.mass;
        } else {
            atoms_.push_back(a);
        }
    }
}

DiscreteMeasure DiscreteMeasure::dirac(double location) { return DiscreteMeasure({{location, 1.0}}); }

double DiscreteMeasure::quantile(double s) const {
    if (!in_unit(s)) detail::domain_fail("DiscreteMeasure::quantile", "s must lie in [0, 1]");
    double cdf = 0.0;
    for (const Atom& a : atoms_) {
        cdf += a.mass;
        if (cdf > s) return a.location;
    }
    return 1.0;
}

bool operator==(const DiscreteMeasure& l, const DiscreteMeasure& r) {
    return std::equal(l.atoms_.begin(), l.atoms_.end(), r.atoms_.begin(), r.atoms_.end(),
                      [](const Atom& a, const Atom& b) { return a.location == b.location && a.mass == b.mass; });
}

//--------------------------------------------------------------------------
// QuantileFunction
//--------------------------------------------------------------------------

QuantileFunction::QuantileFunction(std::vector<QuantilePiece> pieces) : pieces_(std::move(pieces)) {}

QuantileFunction QuantileFunction::from_pieces(std::vector<QuantilePiece> pieces) {
    validate_pieces(pieces);
    return QuantileFunction(merge_flat_runs(std::move(pieces)));
}

QuantileFunction QuantileFunction::step(std::span<const std::pair<double, double>> breakpoints) {
    std::vector<QuantilePiece> pieces;
    pieces.reserve(breakpoints.size());
    for (const auto& [s, v] : breakpoints) pieces.push_back({s, v, v});
    return from_pieces(std::move(pieces));
}

QuantileFunction QuantileFunction::linear(std::span<const std::pair<double, double>> knots) {
    if (knots.size() < 2 || knots.back().first != 1.0) {
        detail::domain_fail("QuantileFunction::linear", "knots must start at s = 0 and end at s = 1");
    }
    std::vector<QuantilePiece> pieces;
    pieces.reserve(knots.size() - 1);
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
        pieces.push_back({knots[i].first, knots[i].second, knots[i + 1].second});
    }
    return from_pieces(std::move(pieces));
}

QuantileFunction QuantileFunction::constant(double value) {
    return from_pieces({QuantilePiece{0.0, value, value}});
}

QuantileFunction QuantileFunction::identity() { return from_pieces({QuantilePiece{0.0, 0.0, 1.0}}); }

double QuantileFunction::operator()(double s) const {
    if (!in_unit(s)) detail::domain_fail("QuantileFunction", "argument must lie in [0, 1]");
    if (s == 1.0) return pieces_.back().right;
    const auto it = std::upper_bound(pieces_.begin(), pieces_.end(), s,
                                     [](double x, const QuantilePiece& p) { return x < p.start; });
    const std::size_t i = static_cast<std::size_t>(it - pieces_.begin()) - 1;
    return piece_values(*this, i, s, piece_end(i)).first;
}

bool QuantileFunction::is_step() const noexcept {
    return std::all_of(pieces_.begin(), pieces_.end(), [](const QuantilePiece& p) { return p.flat(); });
}

std::vector<std::pair<double, double>> QuantileFunction::breakpoints() const {
    if (!is_step()) detail::domain_fail("QuantileFunction::breakpoints", "not a step function");
    std::vector<std::pair<double, double>> out;
    out.reserve(pieces_.size());
    for (const QuantilePiece& p : pieces_) out.emplace_back(p.start, p.left);
    return out;
}

//--------------------------------------------------------------------------
// Isometry, distances and geodesics
//--------------------------------------------------------------------------

DiscreteMeasure pushforward_leb(const QuantileFunction& g) {
    if (!g.is_step()) {
        detail::domain_fail("pushforward_leb", "only step quantile functions push forward to discrete measures");
    }
    std::vector<Atom> atoms;
    atoms.reserve(g.pieces().size());
    for (std::size_t i = 0; i < g.pieces().size(); ++i) {
        atoms.push_back({g.pieces()[i].left, g.piece_end(i) - g.pieces()[i].start});
    }
    return DiscreteMeasure(std::move(atoms));
}

QuantileFunction inverse_distribution(const DiscreteMeasure& m) {
    std::vector<std::pair<double, double>> breakpoints;
    breakpoints.reserve(m.size());
    double cdf = 0.0;
    for (const Atom& a : m.atoms()) {
        // Mass left over from rounding beyond s = 1 carries no width.
        if (cdf >= 1.0) break;
        breakpoints.emplace_back(cdf, a.location);
        cdf += a.mass;
    }
    return QuantileFunction::step(breakpoints);
}

double w2_distance(const QuantileFunction& f, const QuantileFunction& g) {
    double sum = 0.0;
    for_each_merged_cell(f, g, [&](double u, double v, double fu, double fv, double gu, double gv) {
        const double d0 = fu - gu;
        const double d1 = fv - gv;
        sum += (v - u) * (d0 * d0 + d0 * d1 + d1 * d1) / 3.0;
    });
    return std::sqrt(sum);
}

double brute_force_w2(const DiscreteMeasure& m1, const DiscreteMeasure& m2) {
    const auto a = m1.atoms();
    const auto b = m2.atoms();
    std::size_t i = 0;
    std::size_t j = 0;
    double ra = a[0].mass;
    double rb = b[0].mass;
    double cost = 0.0;
    while (i < a.size() && j < b.size()) {
        const double moved = std::min(ra, rb);
        const double d = a[i].location - b[j].location;
        cost += moved * d * d;
        ra -= moved;
        rb -= moved;
        if (ra <= 0.0 && ++i < a.size()) ra = a[i].mass;
        if (rb <= 0.0 && ++j < b.size()) rb = b[j].mass;
    }
    return std::sqrt(cost);
}

QuantileFunction geodesic(const QuantileFunction& f, const QuantileFunction& g, double t) {
    if (!in_unit(t)) detail::domain_fail("geodesic", "t must lie in [0, 1]");
    if (t == 0.0) return f;
    if (t == 1.0) return g;
    std::vector<QuantilePiece> pieces;
    pieces.reserve(f.pieces().size() + g.pieces().size());
    for_each_merged_cell(f, g, [&](double u, double, double fu, double fv, double gu, double gv) {
        const double left = (1.0 - t) * fu + t * gu;
        const double right = (fu == fv && gu == gv) ? left : (1.0 - t) * fv + t * gv;
        pieces.push_back({u, left, right});
    });
    return QuantileFunction::from_pieces(std::move(pieces));
}

//--------------------------------------------------------------------------
// Entropy
//--------------------------------------------------------------------------

RestrictedMeasure::RestrictedMeasure(std::string base, ThresholdEvent event, double mass)
    : base_(std::move(base)), event_(event), mass_(mass) {
    if (!(mass > 0.0 && mass <= 1.0)) {
        detail::domain_fail("RestrictedMeasure", "event mass must lie in (0, 1], got " + std::to_string(mass));
    }
}

double entropy(const PiecewiseDensity& rho) {
    if (rho.reference_mass.size() != rho.density.size()) {
        detail::domain_fail("entropy", "density and reference partition sizes differ");
    }
    if (!rho.absolutely_continuous) return std::numeric_limits<double>::infinity();
    double total = 0.0;
    double ent = 0.0;
    for (std::size_t i = 0; i < rho.density.size(); ++i) {
        const double r = rho.density[i];
        const double m = rho.reference_mass[i];
        if (!(r >= 0.0) || !(m >= 0.0)) detail::domain_fail("entropy", "density and masses must be nonnegative");
        total += r * m;
        if (r > 0.0) ent += r * std::log(r) * m;
    }
    if (std::abs(total - 1.0) > kDensityTolerance) {
        detail::domain_fail("entropy", "density is not normalized: integral = " + std::to_string(total));
    }
    return ent;
}

double entropy(const RestrictedMeasure& mu) { return -std::log(mu.mass()); }

PiecewiseDensity tensor_product(const PiecewiseDensity& lhs, const PiecewiseDensity& rhs) {
    PiecewiseDensity out;
    out.absolutely_continuous = lhs.absolutely_continuous && rhs.absolutely_continuous;
    out.reference_mass.reserve(lhs.density.size() * rhs.density.size());
    out.density.reserve(lhs.density.size() * rhs.density.size());
    for (std::size_t i = 0; i < lhs.density.size(); ++i) {
        for (std::size_t j = 0; j < rhs.density.size(); ++j) {
            out.reference_mass.push_back(lhs.reference_mass[i] * rhs.reference_mass[j]);
            out.density.push_back(lhs.density[i] * rhs.density[j]);
        }
    }
    return out;
}

//--------------------------------------------------------------------------
// K-convexity
//--------------------------------------------------------------------------

KConvexityVerdict k_convexity_check(std::span<const PathValue> values, double e0, double e1, double dist,
                                    double K) {
    if (!(dist >= 0.0)) detail::domain_fail("k_convexity_check", "distance must be nonnegative");
    KConvexityVerdict verdict{true, -std::numeric_limits<double>::infinity(), 0};
    for (std::size_t j = 0; j < values.size(); ++j) {
        const double t = values[j].t;
        if (!(t > 0.0 && t < 1.0)) detail::domain_fail("k_convexity_check", "t_j must lie in (0, 1)");
        const double bound = t * e1 + (1.0 - t) * e0 - (K / 2.0) * t * (1.0 - t) * dist * dist;
        const double margin = values[j].value - bound;
        if (margin > verdict.worst_margin) {
            verdict.worst_margin = margin;
            verdict.worst_index = j;
        }
    }
    verdict.holds = verdict.worst_margin <= 0.0;
    return verdict;
}

}  // namespace entropic
