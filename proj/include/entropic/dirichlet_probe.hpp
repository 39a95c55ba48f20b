#pragma once

// Monte Carlo probes of the Dirichlet form E(F) = E_Q |DF(g)|^2 on cylinder
// functions F(g) = phi(<f_1, g>, ..., <f_m, g>): the Poincare inequality
// Var(F) <= E(F) / beta and the empirical log-Sobolev ratio.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "entropic/entropic_measure.hpp"
#include "entropic/quantile_space.hpp"

namespace entropic {

/// Piecewise polynomial on [0, 1]: on [knots[i], knots[i+1]) the function is
/// sum_k coeffs[i][k] x^k (absolute x, not local). Used for the directions f_k.
class PiecewisePolynomial {
public:
    PiecewisePolynomial(std::vector<double> knots, std::vector<std::vector<double>> coeffs);

    /// Single polynomial on all of [0, 1].
    static PiecewisePolynomial polynomial(std::vector<double> coeffs);

    /// Piecewise-constant: values[i] on [knots[i], knots[i+1]).
    static PiecewisePolynomial step(std::vector<double> knots, std::span<const double> values);

    static PiecewisePolynomial from_quantile(const QuantileFunction& g);

    double operator()(double x) const;

    std::span<const double> knots() const noexcept { return knots_; }
    const std::vector<double>& coeffs(std::size_t piece) const noexcept { return coeffs_[piece]; }
    std::size_t piece_count() const noexcept { return coeffs_.size(); }

private:
    std::vector<double> knots_;
    std::vector<std::vector<double>> coeffs_;
};

/// <f, g>_{L2[0,1]}, exact on the merged knot grid.
double inner_product(const PiecewisePolynomial& f, const PiecewisePolynomial& g);

/// Outer maps phi : R^m -> R with closed-form gradients.
struct LinearMap {
    std::vector<double> coeffs;  ///< phi(u) = sum c_i u_i + offset
    double offset = 0.0;
};

struct QuadraticMap {
    std::vector<double> matrix;  ///< row-major m x m, phi(u) = u^T A u + b . u
    std::vector<double> linear;
};

struct BumpMap {
    std::vector<double> center;  ///< phi(u) = exp(-|u - c|^2 / width^2)
    double width = 1.0;
};

using OuterMap = std::variant<LinearMap, QuadraticMap, BumpMap>;

class CylinderFunction {
public:
    CylinderFunction(std::vector<PiecewisePolynomial> directions, OuterMap outer);

    std::size_t dimension() const noexcept { return directions_.size(); }
    const OuterMap& outer() const noexcept { return outer_; }

    /// (<f_1, g>, ..., <f_m, g>)
    std::vector<double> coordinates(const QuantileFunction& g) const;

    double operator()(const QuantileFunction& g) const;

    /// |DF(g)|^2 = sum_ij d_i phi d_j phi <f_i, f_j>.
    double gradient_norm_sq(const QuantileFunction& g) const;

private:
    std::vector<PiecewisePolynomial> directions_;
    OuterMap outer_;
    std::vector<double> gram_;  ///< m x m, <f_i, f_j>
};

double outer_value(const OuterMap& phi, std::span<const double> u);
std::vector<double> outer_gradient(const OuterMap& phi, std::span<const double> u);

double frechet_gradient_norm_sq(const CylinderFunction& F, const QuantileFunction& g);

/// Named members of the built-in cylinder family.
struct NamedCylinder {
    std::string name;
    CylinderFunction function;
};

/// integral (F = int g), weighted_step, square (F = (int g)^2),
/// bump (smooth bump of int g), two_direction_bump.
std::vector<NamedCylinder> builtin_cylinder_family();

/// Looks up a built-in cylinder by name; throws DomainError if unknown.
CylinderFunction builtin_cylinder(const std::string& name);

struct Estimate {
    double value;
    double std_error;
};

/// Estimates at one refinement of the sampling partition.
struct ProbeLevel {
    std::size_t cells;
    Estimate variance;
    Estimate energy;          ///< E |DF|^2
    Estimate poincare_margin; ///< energy / beta - variance
    Estimate logsob_lhs;      ///< E[F^2 log(F^2 / E F^2)]
    Estimate logsob_ratio;    ///< logsob_lhs / (energy / beta)
};

enum class ProbeKind { poincare, logsob };

struct ProbeReport {
    ProbeKind kind;
    double beta;
    std::uint64_t seed;
    std::size_t n_samples;
    std::size_t batches;
    /// levels[0] is the requested partition, levels[1] its coarsening.
    std::vector<ProbeLevel> levels;
    /// Poincare: margin >= -4 stderr at the finest level. Log-Sobolev: always
    /// true (no reference constant exists to test against).
    bool pass;
};

inline constexpr std::size_t kProbeBatches = 32;
inline constexpr std::size_t kMinProbeSamples = 10000;

/// Poincare probe. Batch b draws from Rng::derived(seed, b); batches run in
/// parallel and results do not depend on scheduling.
ProbeReport poincare_probe(const CylinderFunction& F, EntropicParams params, const Partition& partition,
                           std::size_t n, std::uint64_t seed);

/// Log-Sobolev probe; throws DomainError when the estimated E F^2 < 1e-12.
ProbeReport logsob_probe(const CylinderFunction& F, EntropicParams params, const Partition& partition,
                         std::size_t n, std::uint64_t seed);

}  // namespace entropic
