#pragma once

// Command-line front end: parses a RunConfig, runs one module operation and
// writes a reproducible CSV/JSON artifact with the full config embedded.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "entropic/quantile_space.hpp"
#include "entropic/serialization.hpp"

namespace entropic::cli {

enum class Command { sample, w2, geodesic, marginal, audit, scan, probe };

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumericalFloor = 3;
inline constexpr int kExitCrossCheck = 4;

/// Environment variable naming the directory for relative --output paths.
inline constexpr const char* kOutputDirEnv = "ENTROPIC_OUTPUT_DIR";

struct RunConfig {
    Command command = Command::scan;
    double beta = 1.0;
    std::optional<std::uint64_t> seed;

    // partition: either dyadic level or explicit interior knots
    std::optional<int> dyadic;
    std::vector<double> knots;

    double s = 0.5;
    double t = 0.5;
    std::vector<double> s_grid;
    int s_decades = 10;
    std::vector<double> x;

    std::size_t n = 1;
    std::size_t mc_samples = 0;

    std::string measure_a;
    std::string measure_b;

    std::string function = "integral";
    std::string probe_kind = "poincare";

    std::string output;
    std::string format;  ///< csv | json; empty picks the command default
};

class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, const std::string& message)
        : std::runtime_error("--" + field + ": " + message), field_(std::move(field)) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

std::string command_name(Command c);

/// Parses argv-style arguments (without the program name). Throws
/// ConfigError on malformed input.
RunConfig parse_args(const std::vector<std::string>& args);

/// Checks every field against the preconditions of the selected command.
/// Throws ConfigError (or NumericalFloorError for s below 1e-12).
void validate(const RunConfig& config);

io::json config_to_json(const RunConfig& config);

/// uniform | dirac:<x> | atoms:<loc:mass,...> | steps:<file>
QuantileFunction parse_measure_literal(const std::string& literal);

/// Runs a validated config. The artifact goes to config.output (resolved
/// against $ENTROPIC_OUTPUT_DIR when relative) or to `artifact` when no
/// output path is set; the one-line summary goes to `summary`.
int run(const RunConfig& config, std::ostream& artifact, std::ostream& summary);

/// Full CLI entry point: parse, validate, run, map errors to exit codes.
int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace entropic::cli
