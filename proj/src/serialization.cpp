#include "entropic/serialization.hpp"

#include <cstdio>
#include <ostream>

#include "entropic/errors.hpp"

namespace entropic::io {

namespace {

const char* kind_name(ProbeKind k) { return k == ProbeKind::poincare ? "poincare" : "logsob"; }

json estimate_json(const Estimate& e) { return json{{"value", e.value}, {"stderr", e.std_error}}; }

bool continuous(const QuantileFunction& g) {
    const auto p = g.pieces();
    for (std::size_t i = 0; i + 1 < p.size(); ++i) {
        if (p[i].right != p[i + 1].left) return false;
    }
    return true;
}

std::vector<std::pair<double, double>> pairs_from_json(const json& arr, const char* field) {
    if (!arr.is_array()) detail::domain_fail("quantile_from_json", std::string(field) + " must be an array");
    std::vector<std::pair<double, double>> out;
    out.reserve(arr.size());
    for (const json& e : arr) {
        if (!e.is_array() || e.size() != 2) {
            detail::domain_fail("quantile_from_json", std::string(field) + " entries must be [s, value] pairs");
        }
        out.emplace_back(e[0].get<double>(), e[1].get<double>());
    }
    return out;
}

}  // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

json to_json(const QuantileFunction& g) {
    json arr = json::array();
    if (g.is_step()) {
        for (const auto& [s, v] : g.breakpoints()) arr.push_back({s, v});
        return json{{"mode", "step"}, {"breakpoints", std::move(arr)}};
    }
    if (continuous(g)) {
        for (const QuantilePiece& p : g.pieces()) arr.push_back({p.start, p.left});
        arr.push_back({1.0, g.pieces().back().right});
        return json{{"mode", "linear"}, {"knots", std::move(arr)}};
    }
    for (const QuantilePiece& p : g.pieces()) arr.push_back({p.start, p.left, p.right});
    return json{{"mode", "piecewise"}, {"pieces", std::move(arr)}};
}

QuantileFunction quantile_from_json(const json& j) {
    if (!j.is_object() || !j.contains("mode")) detail::domain_fail("quantile_from_json", "missing \"mode\"");
    const std::string mode = j.at("mode").get<std::string>();
    if (mode == "step") return QuantileFunction::step(pairs_from_json(j.at("breakpoints"), "breakpoints"));
    if (mode == "linear") return QuantileFunction::linear(pairs_from_json(j.at("knots"), "knots"));
    if (mode == "piecewise") {
        std::vector<QuantilePiece> pieces;
        for (const json& e : j.at("pieces")) {
            if (!e.is_array() || e.size() != 3) {
                detail::domain_fail("quantile_from_json", "pieces entries must be [start, left, right]");
            }
            pieces.push_back({e[0].get<double>(), e[1].get<double>(), e[2].get<double>()});
        }
        return QuantileFunction::from_pieces(std::move(pieces));
    }
    detail::domain_fail("quantile_from_json", "unknown mode '" + mode + "'");
}

json to_json(const DiscreteMeasure& m) {
    json arr = json::array();
    for (const Atom& a : m.atoms()) arr.push_back({a.location, a.mass});
    return json{{"atoms", std::move(arr)}};
}

DiscreteMeasure measure_from_json(const json& j) {
    if (!j.is_object() || !j.contains("atoms") || !j.at("atoms").is_array()) {
        detail::domain_fail("measure_from_json", "missing \"atoms\" array");
    }
    std::vector<Atom> atoms;
    for (const json& e : j.at("atoms")) {
        if (!e.is_array() || e.size() != 2) detail::domain_fail("measure_from_json", "atoms must be [location, mass]");
        atoms.push_back({e[0].get<double>(), e[1].get<double>()});
    }
    return DiscreteMeasure(std::move(atoms));
}

json to_json(const EntropicSample& sample, double beta, std::uint64_t seed, std::size_t index) {
    json out = to_json(sample.as_quantile());
    out["values"] = sample.values;
    out["log_increments"] = sample.log_increments;
    const auto knots = sample.partition.knots();
    out["metadata"] = json{{"beta", beta},
                           {"seed", seed},
                           {"index", index},
                           {"partition", std::vector<double>(knots.begin(), knots.end())}};
    return out;
}

json to_json(const ProbeReport& report) {
    json levels = json::array();
    for (const ProbeLevel& l : report.levels) {
        levels.push_back(json{{"cells", l.cells},
                              {"variance", estimate_json(l.variance)},
                              {"energy", estimate_json(l.energy)},
                              {"poincare_margin", estimate_json(l.poincare_margin)},
                              {"logsob_lhs", estimate_json(l.logsob_lhs)},
                              {"logsob_ratio", estimate_json(l.logsob_ratio)}});
    }
    return json{{"kind", kind_name(report.kind)}, {"beta", report.beta},       {"seed", report.seed},
                {"n_samples", report.n_samples},  {"batches", report.batches}, {"levels", std::move(levels)},
                {"pass", report.pass}};
}

json to_json(const MonteCarloCrossCheck& c) {
    return json{{"n_samples", c.n_samples},
                {"seed", c.seed},
                {"q_a", {{"estimate", c.q_a.estimate}, {"stderr", c.q_a.std_error}, {"exact", c.exact_q_a}}},
                {"q_c", {{"estimate", c.q_c.estimate}, {"stderr", c.q_c.std_error}, {"exact", c.exact_q_c}}},
                {"pass", c.pass}};
}

void write_audit_csv(std::ostream& out, std::span<const ConvexityAuditRow> rows) {
    out << kAuditCsvHeader << '\n';
    for (const ConvexityAuditRow& r : rows) {
        out << format_double(r.beta) << ',' << format_double(r.s) << ',' << format_double(r.t) << ','
            << format_double(r.log_QA) << ',' << format_double(r.log_QC) << ',' << format_double(r.log_ratio) << ','
            << format_double(r.implied_K) << '\n';
    }
}

std::string dump(const json& j) { return j.dump(2); }

}  // namespace entropic::io
