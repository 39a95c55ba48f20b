#pragma once

// JSON and CSV interchange formats; see docs/formats.md.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>

#include <json.hpp>

#include "entropic/convexity_audit.hpp"
#include "entropic/dirichlet_probe.hpp"
#include "entropic/entropic_measure.hpp"
#include "entropic/quantile_space.hpp"

namespace entropic::io {

using json = nlohmann::ordered_json;

/// printf-style %.17g: round-trip exact for doubles.
std::string format_double(double v);

json to_json(const QuantileFunction& g);
QuantileFunction quantile_from_json(const json& j);

json to_json(const DiscreteMeasure& m);
DiscreteMeasure measure_from_json(const json& j);

/// Quantile-function schema plus "log_increments" and a "metadata" block.
json to_json(const EntropicSample& sample, double beta, std::uint64_t seed, std::size_t index);

json to_json(const ProbeReport& report);
json to_json(const MonteCarloCrossCheck& check);

inline constexpr const char* kAuditCsvHeader = "beta,s,t,log_QA,log_QC,log_ratio,implied_K";

void write_audit_csv(std::ostream& out, std::span<const ConvexityAuditRow> rows);

/// Pretty-printed json; doubles use the shortest representation that
/// round-trips exactly.
std::string dump(const json& j);

}  // namespace entropic::io
