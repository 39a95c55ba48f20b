#pragma once

#include <cstdint>
#include <random>

namespace entropic {

/// Seeded random source. Only the engine (mt19937_64, fully specified by the
/// standard) is taken from the library; every distribution is implemented
/// here so streams are identical across standard-library vendors.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Independent stream for task `index` of a run with `master_seed`:
    /// engine seed = splitmix64(master_seed ^ splitmix64(index + 1)).
    static Rng derived(std::uint64_t master_seed, std::uint64_t index);

    /// Uniform on the open interval (0, 1), 53-bit resolution.
    double uniform();

    /// Standard normal (Marsaglia polar method).
    double normal();

    /// log of a Gamma(shape, 1) variate. For shape < 1 uses
    /// Gamma(shape) = Gamma(shape + 1) * U^(1/shape), evaluated in log space,
    /// so the result stays finite for shapes far below 1e-6.
    double log_gamma_variate(double shape);

    std::mt19937_64& engine() noexcept { return engine_; }

private:
    std::mt19937_64 engine_;
    double spare_normal_ = 0.0;
    bool has_spare_ = false;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

}  // namespace entropic
