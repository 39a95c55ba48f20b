#include "entropic/dirichlet_probe.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "entropic/errors.hpp"

namespace entropic {

namespace {

// int_u^v sum_k c_k x^k dx
double integrate_polynomial(const std::vector<double>& c, double u, double v) {
    double sum = 0.0;
    double up = u;
    double vp = v;
    for (std::size_t k = 0; k < c.size(); ++k) {
        sum += c[k] * (vp - up) / static_cast<double>(k + 1);
        up *= u;
        vp *= v;
    }
    return sum;
}

std::vector<double> multiply(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.empty() || b.empty()) return {};
    std::vector<double> out(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    }
    return out;
}

void require_dimension(std::size_t got, std::size_t want, const char* what) {
    if (got != want) detail::domain_fail("CylinderFunction", std::string(what) + " has the wrong dimension");
}

std::size_t outer_dimension(const OuterMap& phi) {
    return std::visit(
        [](const auto& m) -> std::size_t {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, LinearMap>) return m.coeffs.size();
            if constexpr (std::is_same_v<T, QuadraticMap>) return m.linear.size();
            if constexpr (std::is_same_v<T, BumpMap>) return m.center.size();
        },
        phi);
}

}  // namespace

//--------------------------------------------------------------------------
// PiecewisePolynomial
//--------------------------------------------------------------------------

PiecewisePolynomial::PiecewisePolynomial(std::vector<double> knots, std::vector<std::vector<double>> coeffs)
    : knots_(std::move(knots)), coeffs_(std::move(coeffs)) {
    if (knots_.size() < 2 || knots_.front() != 0.0 || knots_.back() != 1.0) {
        detail::domain_fail("PiecewisePolynomial", "knots must start at 0 and end at 1");
    }
    if (coeffs_.size() + 1 != knots_.size()) {
        detail::domain_fail("PiecewisePolynomial", "need one coefficient list per piece");
    }
    for (std::size_t i = 0; i + 1 < knots_.size(); ++i) {
        if (!(knots_[i + 1] > knots_[i])) detail::domain_fail("PiecewisePolynomial", "knots must increase");
    }
}

PiecewisePolynomial PiecewisePolynomial::polynomial(std::vector<double> coeffs) {
    return PiecewisePolynomial({0.0, 1.0}, {std::move(coeffs)});
}

PiecewisePolynomial PiecewisePolynomial::step(std::vector<double> knots, std::span<const double> values) {
    std::vector<std::vector<double>> coeffs;
    coeffs.reserve(values.size());
    for (double v : values) coeffs.push_back({v});
    return PiecewisePolynomial(std::move(knots), std::move(coeffs));
}

PiecewisePolynomial PiecewisePolynomial::from_quantile(const QuantileFunction& g) {
    const auto pieces = g.pieces();
    std::vector<double> knots;
    std::vector<std::vector<double>> coeffs;
    knots.reserve(pieces.size() + 1);
    coeffs.reserve(pieces.size());
    for (std::size_t i = 0; i < pieces.size(); ++i) {
        const QuantilePiece& p = pieces[i];
        knots.push_back(p.start);
        if (p.flat()) {
            coeffs.push_back({p.left});
        } else {
            const double slope = (p.right - p.left) / (g.piece_end(i) - p.start);
            coeffs.push_back({p.left - slope * p.start, slope});
        }
    }
    knots.push_back(1.0);
    return PiecewisePolynomial(std::move(knots), std::move(coeffs));
}

double PiecewisePolynomial::operator()(double x) const {
    if (!(x >= 0.0 && x <= 1.0)) detail::domain_fail("PiecewisePolynomial", "argument must lie in [0, 1]");
    auto it = std::upper_bound(knots_.begin(), knots_.end() - 1, x);
    const std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(it - knots_.begin()) - 1, coeffs_.size() - 1);
    double value = 0.0;
    for (std::size_t k = coeffs_[i].size(); k-- > 0;) value = value * x + coeffs_[i][k];
    return value;
}

double inner_product(const PiecewisePolynomial& f, const PiecewisePolynomial& g) {
    const auto fk = f.knots();
    const auto gk = g.knots();
    std::size_t i = 0;
    std::size_t j = 0;
    double u = 0.0;
    double sum = 0.0;
    while (i < f.piece_count() && j < g.piece_count()) {
        const double fe = fk[i + 1];
        const double ge = gk[j + 1];
        const double v = std::min(fe, ge);
        if (v > u) sum += integrate_polynomial(multiply(f.coeffs(i), g.coeffs(j)), u, v);
        u = v;
        if (fe == v) ++i;
        if (ge == v) ++j;
    }
    return sum;
}

//--------------------------------------------------------------------------
// Outer maps and cylinder functions
//--------------------------------------------------------------------------

double outer_value(const OuterMap& phi, std::span<const double> u) {
    return std::visit(
        [u](const auto& m) -> double {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, LinearMap>) {
                double v = m.offset;
                for (std::size_t i = 0; i < u.size(); ++i) v += m.coeffs[i] * u[i];
                return v;
            } else if constexpr (std::is_same_v<T, QuadraticMap>) {
                const std::size_t n = u.size();
                double v = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    v += m.linear[i] * u[i];
                    for (std::size_t j = 0; j < n; ++j) v += m.matrix[i * n + j] * u[i] * u[j];
                }
                return v;
            } else {
                double r2 = 0.0;
                for (std::size_t i = 0; i < u.size(); ++i) r2 += (u[i] - m.center[i]) * (u[i] - m.center[i]);
                return std::exp(-r2 / (m.width * m.width));
            }
        },
        phi);
}

std::vector<double> outer_gradient(const OuterMap& phi, std::span<const double> u) {
    return std::visit(
        [u](const auto& m) -> std::vector<double> {
            using T = std::decay_t<decltype(m)>;
            const std::size_t n = u.size();
            std::vector<double> grad(n, 0.0);
            if constexpr (std::is_same_v<T, LinearMap>) {
                grad = m.coeffs;
            } else if constexpr (std::is_same_v<T, QuadraticMap>) {
                for (std::size_t i = 0; i < n; ++i) {
                    grad[i] = m.linear[i];
                    for (std::size_t j = 0; j < n; ++j) grad[i] += (m.matrix[i * n + j] + m.matrix[j * n + i]) * u[j];
                }
            } else {
                double r2 = 0.0;
                for (std::size_t i = 0; i < n; ++i) r2 += (u[i] - m.center[i]) * (u[i] - m.center[i]);
                const double w2 = m.width * m.width;
                const double value = std::exp(-r2 / w2);
                for (std::size_t i = 0; i < n; ++i) grad[i] = -2.0 * (u[i] - m.center[i]) / w2 * value;
            }
            return grad;
        },
        phi);
}

CylinderFunction::CylinderFunction(std::vector<PiecewisePolynomial> directions, OuterMap outer)
    : directions_(std::move(directions)), outer_(std::move(outer)) {
    const std::size_t m = directions_.size();
    if (m == 0) detail::domain_fail("CylinderFunction", "needs at least one direction");
    require_dimension(outer_dimension(outer_), m, "outer map");
    if (const auto* q = std::get_if<QuadraticMap>(&outer_)) require_dimension(q->matrix.size(), m * m, "matrix");
    if (const auto* b = std::get_if<BumpMap>(&outer_); b && !(b->width > 0.0)) {
        detail::domain_fail("CylinderFunction", "bump width must be positive");
    }
    gram_.resize(m * m);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i; j < m; ++j) {
            gram_[i * m + j] = gram_[j * m + i] = inner_product(directions_[i], directions_[j]);
        }
    }
}

std::vector<double> CylinderFunction::coordinates(const QuantileFunction& g) const {
    const PiecewisePolynomial gp = PiecewisePolynomial::from_quantile(g);
    std::vector<double> u;
    u.reserve(directions_.size());
    for (const PiecewisePolynomial& f : directions_) u.push_back(inner_product(f, gp));
    return u;
}

double CylinderFunction::operator()(const QuantileFunction& g) const { return outer_value(outer_, coordinates(g)); }

double CylinderFunction::gradient_norm_sq(const QuantileFunction& g) const {
    const std::vector<double> grad = outer_gradient(outer_, coordinates(g));
    const std::size_t m = grad.size();
    double sum = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) sum += grad[i] * grad[j] * gram_[i * m + j];
    }
    return std::max(sum, 0.0);
}

double frechet_gradient_norm_sq(const CylinderFunction& F, const QuantileFunction& g) {
    return F.gradient_norm_sq(g);
}

std::vector<NamedCylinder> builtin_cylinder_family() {
    const auto one = PiecewisePolynomial::polynomial({1.0});
    const std::vector<double> half_values = {2.0, -1.0};
    const auto weighted_step = PiecewisePolynomial::step({0.0, 0.5, 1.0}, half_values);
    const std::vector<double> indicator_values = {1.0, 0.0};
    const auto left_half = PiecewisePolynomial::step({0.0, 0.5, 1.0}, indicator_values);
    const auto ramp = PiecewisePolynomial::polynomial({0.0, 1.0});

    std::vector<NamedCylinder> family;
    family.push_back({"integral", CylinderFunction({one}, LinearMap{{1.0}, 0.0})});
    family.push_back({"weighted_step", CylinderFunction({weighted_step}, LinearMap{{1.0}, 0.0})});
    family.push_back({"square", CylinderFunction({one}, QuadraticMap{{1.0}, {0.0}})});
    family.push_back({"bump", CylinderFunction({one}, BumpMap{{0.5}, 0.1})});
    family.push_back({"two_direction_bump", CylinderFunction({left_half, ramp}, BumpMap{{0.125, 1.0 / 3.0}, 0.3})});
    return family;
}

CylinderFunction builtin_cylinder(const std::string& name) {
    for (NamedCylinder& c : builtin_cylinder_family()) {
        if (c.name == name) return std::move(c.function);
    }
    detail::domain_fail("builtin_cylinder", "unknown cylinder function '" + name + "'");
}

//--------------------------------------------------------------------------
// Probes
//--------------------------------------------------------------------------

namespace {

struct LevelDraws {
    std::vector<double> value;   // F(g)
    std::vector<double> energy;  // |DF(g)|^2
};

struct LevelStats {
    double variance;
    double energy;
    double margin;
    double logsob_lhs;
    double logsob_ratio;
    double second_moment;
};

LevelStats level_stats(std::span<const double> value, std::span<const double> energy, double beta) {
    const double n = static_cast<double>(value.size());
    double mean = 0.0;
    double mean_sq = 0.0;
    double mean_energy = 0.0;
    for (std::size_t i = 0; i < value.size(); ++i) {
        mean += value[i];
        mean_sq += value[i] * value[i];
        mean_energy += energy[i];
    }
    mean /= n;
    mean_sq /= n;
    mean_energy /= n;
    double ss = 0.0;
    for (double v : value) ss += (v - mean) * (v - mean);
    double lhs = 0.0;
    if (mean_sq > 0.0) {
        for (double v : value) {
            const double f2 = v * v;
            if (f2 > 0.0) lhs += f2 * std::log(f2 / mean_sq);
        }
        lhs /= n;
    }
    LevelStats s{};
    s.variance = ss / (n - 1.0);
    s.energy = mean_energy;
    s.margin = mean_energy / beta - s.variance;
    s.logsob_lhs = lhs;
    s.logsob_ratio = mean_energy > 0.0 ? lhs / (mean_energy / beta) : 0.0;
    s.second_moment = mean_sq;
    return s;
}

Estimate batch_estimate(double overall, const std::vector<double>& per_batch) {
    const double b = static_cast<double>(per_batch.size());
    double mean = 0.0;
    for (double v : per_batch) mean += v;
    mean /= b;
    double ss = 0.0;
    for (double v : per_batch) ss += (v - mean) * (v - mean);
    return {overall, std::sqrt(ss / (b - 1.0) / b)};
}

ProbeReport run_probe(ProbeKind kind, const CylinderFunction& F, EntropicParams params, const Partition& partition,
                      std::size_t n, std::uint64_t seed) {
    if (n < kMinProbeSamples) detail::domain_fail("probe", "need at least 10^4 samples");
    const Partition coarse = partition.coarsened();
    const bool two_levels = coarse.cell_count() < partition.cell_count();
    const std::size_t n_levels = two_levels ? 2 : 1;

    std::vector<std::size_t> offsets(kProbeBatches + 1, 0);
    for (std::size_t b = 0; b < kProbeBatches; ++b) {
        offsets[b + 1] = offsets[b] + n / kProbeBatches + (b < n % kProbeBatches ? 1 : 0);
    }
    std::vector<LevelDraws> draws(n_levels);
    for (LevelDraws& d : draws) {
        d.value.resize(n);
        d.energy.resize(n);
    }

    auto run_batch = [&](std::size_t b) {
        Rng rng = Rng::derived(seed, b);
        for (std::size_t i = offsets[b]; i < offsets[b + 1]; ++i) {
            const EntropicSample fine = sample(partition, params, rng);
            const QuantileFunction g = fine.as_quantile();
            draws[0].value[i] = F(g);
            draws[0].energy[i] = F.gradient_norm_sq(g);
            if (two_levels) {
                // coarse interior knots are the fine knots t_2, t_4, ...
                EntropicSample c{coarse, {}, {}};
                c.values.reserve(coarse.interior_count());
                for (std::size_t k = 1; k < fine.values.size(); k += 2) c.values.push_back(fine.values[k]);
                const QuantileFunction gc = c.as_quantile();
                draws[1].value[i] = F(gc);
                draws[1].energy[i] = F.gradient_norm_sq(gc);
            }
        }
    };

    const std::size_t workers =
        std::max<std::size_t>(1, std::min<std::size_t>(kProbeBatches, std::thread::hardware_concurrency()));
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t b = next++; b < kProbeBatches; b = next++) run_batch(b);
        });
    }
    for (std::thread& t : pool) t.join();

    ProbeReport report{};
    report.kind = kind;
    report.beta = params.beta();
    report.seed = seed;
    report.n_samples = n;
    report.batches = kProbeBatches;
    for (const LevelDraws& d : draws) {
        const LevelStats all = level_stats(d.value, d.energy, params.beta());
        if (kind == ProbeKind::logsob && all.second_moment < 1e-12) {
            detail::domain_fail("logsob_probe", "E[F^2] is below 1e-12");
        }
        std::vector<double> variance, energy, margin, lhs, ratio;
        for (std::size_t b = 0; b < kProbeBatches; ++b) {
            const std::size_t lo = offsets[b];
            const std::size_t len = offsets[b + 1] - lo;
            const LevelStats s = level_stats(std::span(d.value).subspan(lo, len),
                                             std::span(d.energy).subspan(lo, len), params.beta());
            variance.push_back(s.variance);
            energy.push_back(s.energy);
            margin.push_back(s.margin);
            lhs.push_back(s.logsob_lhs);
            ratio.push_back(s.logsob_ratio);
        }
        ProbeLevel level{};
        level.cells = report.levels.empty() ? partition.cell_count() : coarse.cell_count();
        level.variance = batch_estimate(all.variance, variance);
        level.energy = batch_estimate(all.energy, energy);
        level.poincare_margin = batch_estimate(all.margin, margin);
        level.logsob_lhs = batch_estimate(all.logsob_lhs, lhs);
        level.logsob_ratio = batch_estimate(all.logsob_ratio, ratio);
        report.levels.push_back(level);
    }
    const ProbeLevel& finest = report.levels.front();
    report.pass = kind == ProbeKind::logsob ||
                  finest.poincare_margin.value >= -4.0 * finest.poincare_margin.std_error;
    return report;
}

}  // namespace

ProbeReport poincare_probe(const CylinderFunction& F, EntropicParams params, const Partition& partition,
                           std::size_t n, std::uint64_t seed) {
    return run_probe(ProbeKind::poincare, F, params, partition, n, seed);
}

ProbeReport logsob_probe(const CylinderFunction& F, EntropicParams params, const Partition& partition,
                         std::size_t n, std::uint64_t seed) {
    return run_probe(ProbeKind::logsob, F, params, partition, n, seed);
}

}  // namespace entropic
