#include "entropic/cli_report.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <variant>

#include "entropic/convexity_audit.hpp"
#include "entropic/dirichlet_probe.hpp"
#include "entropic/entropic_measure.hpp"
#include "entropic/errors.hpp"

namespace entropic::cli {

namespace {

constexpr int kMaxDyadicLevel = 16;

struct HelpText {
    std::string text;
};

std::variant<RunConfig, HelpText> parse_impl(const std::vector<std::string>& args) {
    RunConfig c;
    CLI::App app{"Quantile-space Wasserstein geometry and entropic-measure audits", "entropic"};
    app.require_subcommand(1, 1);
    app.set_help_all_flag("--help-all");

    auto add_output = [&c](CLI::App* sub) {
        sub->add_option("--output,-o", c.output, "artifact path (default: stdout)");
        sub->add_option("--format", c.format, "csv or json");
    };
    auto add_partition = [&c](CLI::App* sub) {
        sub->add_option("--dyadic", c.dyadic, "dyadic partition level k (2^k cells)");
        sub->add_option("--knots", c.knots, "interior knots, comma separated")->delimiter(',');
    };

    CLI::App* sample = app.add_subcommand("sample", "draw paths from the entropic measure");
    sample->add_option("--beta", c.beta);
    sample->add_option("--seed", c.seed);
    sample->add_option("--n", c.n, "number of draws");
    add_partition(sample);
    add_output(sample);

    CLI::App* w2 = app.add_subcommand("w2", "2-Wasserstein distance between two measures");
    w2->add_option("--a", c.measure_a)->required();
    w2->add_option("--b", c.measure_b)->required();
    add_output(w2);

    CLI::App* geo = app.add_subcommand("geodesic", "point on the geodesic between two measures");
    geo->add_option("--a", c.measure_a)->required();
    geo->add_option("--b", c.measure_b)->required();
    geo->add_option("--t", c.t);
    add_output(geo);

    CLI::App* marginal = app.add_subcommand("marginal", "log-density of a finite-dimensional marginal");
    marginal->add_option("--beta", c.beta);
    marginal->add_option("--x", c.x, "simplex point, comma separated")->delimiter(',')->required();
    add_partition(marginal);
    add_output(marginal);

    CLI::App* audit = app.add_subcommand("audit", "single convexity audit row");
    audit->add_option("--beta", c.beta);
    audit->add_option("--s", c.s);
    audit->add_option("--t", c.t);
    audit->add_option("--mc-samples", c.mc_samples, "Monte Carlo cross-check sample count (0 = off)");
    audit->add_option("--seed", c.seed);
    add_output(audit);

    CLI::App* scan = app.add_subcommand("scan", "convexity audit over a decreasing s grid");
    scan->add_option("--beta", c.beta);
    scan->add_option("--t", c.t);
    auto* decades = scan->add_option("--s-decades", c.s_decades, "s = 10^-1 .. 10^-K");
    scan->add_option("--s-grid", c.s_grid, "explicit s grid, comma separated")->delimiter(',')->excludes(decades);
    add_output(scan);

    CLI::App* probe = app.add_subcommand("probe", "Monte Carlo Poincare / log-Sobolev probe");
    probe->add_option("--beta", c.beta);
    probe->add_option("--seed", c.seed);
    probe->add_option("--n", c.n);
    probe->add_option("--function", c.function, "built-in cylinder function");
    probe->add_option("--kind", c.probe_kind, "poincare or logsob");
    add_partition(probe);
    add_output(probe);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        return HelpText{app.help()};
    } catch (const CLI::CallForAllHelp&) {
        return HelpText{app.help("", CLI::AppFormatMode::All)};
    } catch (const CLI::ParseError& e) {
        throw ConfigError("args", e.what());
    }

    const std::string name = app.get_subcommands().front()->get_name();
    static const std::vector<std::pair<std::string, Command>> commands = {
        {"sample", Command::sample}, {"w2", Command::w2},     {"geodesic", Command::geodesic},
        {"marginal", Command::marginal}, {"audit", Command::audit}, {"scan", Command::scan},
        {"probe", Command::probe}};
    for (const auto& [n, cmd] : commands) {
        if (n == name) c.command = cmd;
    }
    if (c.command == Command::probe && !c.dyadic && c.knots.empty()) c.dyadic = 8;
    if (c.command == Command::probe && c.n == 1) c.n = 100000;
    return c;
}

bool open_unit(double v) { return v > 0.0 && v < 1.0; }

void require(bool ok, const char* field, const std::string& message) {
    if (!ok) throw ConfigError(field, message);
}

void validate_partition(const RunConfig& c) {
    require(c.dyadic.has_value() != !c.knots.empty(), "dyadic", "give exactly one of --dyadic or --knots");
    if (c.dyadic) {
        require(*c.dyadic >= 1 && *c.dyadic <= kMaxDyadicLevel, "dyadic", "level must lie in [1, 16]");
    } else {
        for (std::size_t i = 0; i < c.knots.size(); ++i) {
            require(open_unit(c.knots[i]), "knots", "knots must lie in (0, 1)");
            require(i == 0 || c.knots[i] - c.knots[i - 1] > 1e-12, "knots", "knots must be strictly increasing");
        }
    }
}

Partition partition_of(const RunConfig& c) {
    if (c.dyadic) return Partition::dyadic(*c.dyadic);
    std::vector<double> knots{0.0};
    knots.insert(knots.end(), c.knots.begin(), c.knots.end());
    knots.push_back(1.0);
    return Partition(std::move(knots));
}

std::vector<double> s_grid_of(const RunConfig& c) {
    return c.s_grid.empty() ? decade_grid(c.s_decades) : c.s_grid;
}

std::string default_format(Command c) { return c == Command::scan || c == Command::audit ? "csv" : "json"; }

std::filesystem::path resolve_output(const std::string& output) {
    std::filesystem::path p(output);
    if (p.is_relative()) {
        if (const char* dir = std::getenv(kOutputDirEnv); dir && *dir) p = std::filesystem::path(dir) / p;
    }
    return p;
}

void write_csv_provenance(std::ostream& out, const RunConfig& c) {
    out << "# entropic " << command_name(c.command) << '\n';
    out << "# config: " << config_to_json(c).dump() << '\n';
}

io::json wrap(const RunConfig& c, io::json result) {
    return io::json{{"config", config_to_json(c)}, {"result", std::move(result)}};
}

double parse_number(const std::string& text, const std::string& literal) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("a", "malformed number '" + text + "' in measure literal '" + literal + "'");
    }
}

}  // namespace

std::string command_name(Command c) {
    switch (c) {
        case Command::sample: return "sample";
        case Command::w2: return "w2";
        case Command::geodesic: return "geodesic";
        case Command::marginal: return "marginal";
        case Command::audit: return "audit";
        case Command::scan: return "scan";
        case Command::probe: return "probe";
    }
    return "unknown";
}

RunConfig parse_args(const std::vector<std::string>& args) {
    auto parsed = parse_impl(args);
    if (std::holds_alternative<HelpText>(parsed)) throw ConfigError("help", "help requested");
    return std::get<RunConfig>(std::move(parsed));
}

void validate(const RunConfig& c) {
    if (!c.format.empty()) require(c.format == "csv" || c.format == "json", "format", "must be csv or json");
    // Paths, quantile functions and probe reports are nested; they only have a JSON form.
    const bool json_only = c.command == Command::sample || c.command == Command::geodesic || c.command == Command::probe;
    if (json_only) require(c.format != "csv", "format", command_name(c.command) + " writes JSON only");
    const bool uses_beta = c.command != Command::w2 && c.command != Command::geodesic;
    if (uses_beta) require(std::isfinite(c.beta) && c.beta > 0.0, "beta", "must be positive and finite");

    switch (c.command) {
        case Command::sample:
            require(c.seed.has_value(), "seed", "sample is stochastic and requires an explicit seed");
            require(c.n >= 1, "n", "must be at least 1");
            validate_partition(c);
            break;
        case Command::w2:
            parse_measure_literal(c.measure_a);
            parse_measure_literal(c.measure_b);
            break;
        case Command::geodesic:
            require(c.t >= 0.0 && c.t <= 1.0, "t", "must lie in [0, 1]");
            parse_measure_literal(c.measure_a);
            parse_measure_literal(c.measure_b);
            break;
        case Command::marginal: {
            validate_partition(c);
            const std::size_t dim = c.dyadic ? (std::size_t{1} << *c.dyadic) - 1 : c.knots.size();
            require(c.x.size() == dim, "x", "needs one coordinate per interior knot (" + std::to_string(dim) + ")");
            for (std::size_t i = 0; i < c.x.size(); ++i) {
                require(open_unit(c.x[i]) && (i == 0 || c.x[i] > c.x[i - 1]), "x",
                        "must be strictly increasing inside (0, 1)");
            }
            break;
        }
        case Command::audit:
            require(open_unit(c.t), "t", "must lie in (0, 1)");
            require(c.s < 1.0 && c.s > 0.0, "s", "must lie in (0, 1)");
            if (c.s < kScanFloor) throw NumericalFloorError("--s: below the numerical floor 1e-12");
            if (c.mc_samples > 0) {
                require(c.mc_samples >= 1000, "mc-samples", "must be at least 1000");
                require(c.seed.has_value(), "seed", "the Monte Carlo cross-check requires an explicit seed");
            }
            break;
        case Command::scan: {
            require(open_unit(c.t), "t", "must lie in (0, 1)");
            if (c.s_grid.empty()) require(c.s_decades >= 1, "s-decades", "must be at least 1");
            const std::vector<double> grid = s_grid_of(c);
            for (std::size_t i = 0; i < grid.size(); ++i) {
                require(grid[i] < 1.0 && grid[i] > 0.0, "s-grid", "values must lie in (0, 1)");
                require(i == 0 || grid[i] < grid[i - 1], "s-grid", "must be strictly decreasing");
                if (grid[i] < kScanFloor) throw NumericalFloorError("--s-grid: s below the numerical floor 1e-12");
            }
            break;
        }
        case Command::probe:
            require(c.seed.has_value(), "seed", "probe is stochastic and requires an explicit seed");
            require(c.n >= kMinProbeSamples, "n", "probes need at least 10^4 samples");
            require(c.probe_kind == "poincare" || c.probe_kind == "logsob", "kind", "must be poincare or logsob");
            {
                bool known = false;
                for (const NamedCylinder& f : builtin_cylinder_family()) known = known || f.name == c.function;
                require(known, "function", "unknown built-in cylinder function '" + c.function + "'");
            }
            validate_partition(c);
            break;
    }
}

io::json config_to_json(const RunConfig& c) {
    io::json j{{"command", command_name(c.command)}};
    const std::string format = c.format.empty() ? default_format(c.command) : c.format;
    switch (c.command) {
        case Command::sample:
            j["beta"] = c.beta;
            j["seed"] = *c.seed;
            j["n"] = c.n;
            break;
        case Command::w2:
            j["a"] = c.measure_a;
            j["b"] = c.measure_b;
            break;
        case Command::geodesic:
            j["a"] = c.measure_a;
            j["b"] = c.measure_b;
            j["t"] = c.t;
            break;
        case Command::marginal:
            j["beta"] = c.beta;
            j["x"] = c.x;
            break;
        case Command::audit:
            j["beta"] = c.beta;
            j["s"] = c.s;
            j["t"] = c.t;
            if (c.mc_samples > 0) {
                j["mc_samples"] = c.mc_samples;
                j["seed"] = *c.seed;
            }
            break;
        case Command::scan:
            j["beta"] = c.beta;
            j["t"] = c.t;
            j["s_grid"] = s_grid_of(c);
            break;
        case Command::probe:
            j["beta"] = c.beta;
            j["seed"] = *c.seed;
            j["n"] = c.n;
            j["function"] = c.function;
            j["kind"] = c.probe_kind;
            break;
    }
    if (c.command == Command::sample || c.command == Command::marginal || c.command == Command::probe) {
        if (c.dyadic) {
            j["partition"] = io::json{{"dyadic", *c.dyadic}};
        } else {
            j["partition"] = io::json{{"knots", c.knots}};
        }
    }
    j["format"] = format;
    return j;
}

QuantileFunction parse_measure_literal(const std::string& literal) {
    if (literal == "uniform") return QuantileFunction::identity();
    const auto colon = literal.find(':');
    if (colon == std::string::npos) throw ConfigError("a", "unknown measure literal '" + literal + "'");
    const std::string kind = literal.substr(0, colon);
    const std::string body = literal.substr(colon + 1);
    try {
        if (kind == "dirac") return QuantileFunction::constant(parse_number(body, literal));
        if (kind == "atoms") {
            std::vector<Atom> atoms;
            std::stringstream ss(body);
            std::string item;
            while (std::getline(ss, item, ',')) {
                const auto sep = item.find(':');
                if (sep == std::string::npos) throw ConfigError("a", "atoms entries must be loc:mass");
                atoms.push_back({parse_number(item.substr(0, sep), literal), parse_number(item.substr(sep + 1), literal)});
            }
            return inverse_distribution(DiscreteMeasure(std::move(atoms)));
        }
        if (kind == "steps") {
            std::ifstream in(body);
            if (!in) throw ConfigError("a", "cannot read steps file '" + body + "'");
            return io::quantile_from_json(io::json::parse(in));
        }
    } catch (const DomainError& e) {
        throw ConfigError("a", std::string("invalid measure '") + literal + "': " + e.what());
    } catch (const io::json::exception& e) {
        throw ConfigError("a", std::string("invalid JSON in '") + body + "': " + e.what());
    }
    throw ConfigError("a", "unknown measure literal '" + literal + "'");
}

int run(const RunConfig& c, std::ostream& artifact, std::ostream& summary) {
    std::ofstream file;
    std::ostream* out = &artifact;
    if (!c.output.empty()) {
        const auto path = resolve_output(c.output);
        file.open(path, std::ios::binary);
        if (!file) throw ConfigError("output", "cannot open '" + path.string() + "' for writing");
        out = &file;
    }
    const std::string format = c.format.empty() ? default_format(c.command) : c.format;
    const bool csv = format == "csv";
    int status = kExitOk;

    switch (c.command) {
        case Command::sample: {
            const Partition p = partition_of(c);
            const EntropicParams params(c.beta);
            io::json draws = io::json::array();
            for (std::size_t i = 0; i < c.n; ++i) {
                Rng rng = Rng::derived(*c.seed, i);
                draws.push_back(io::to_json(sample(p, params, rng), c.beta, *c.seed, i));
            }
            *out << io::dump(wrap(c, std::move(draws))) << '\n';
            summary << "sample: " << c.n << " draws on " << p.cell_count() << " cells (beta=" << c.beta
                    << ", seed=" << *c.seed << ")\n";
            break;
        }
        case Command::w2: {
            const double d = w2_distance(parse_measure_literal(c.measure_a), parse_measure_literal(c.measure_b));
            if (csv) {
                write_csv_provenance(*out, c);
                *out << "distance\n" << io::format_double(d) << '\n';
            } else {
                *out << io::dump(wrap(c, io::json{{"distance", d}})) << '\n';
            }
            summary << io::format_double(d) << '\n';
            break;
        }
        case Command::geodesic: {
            const QuantileFunction g =
                geodesic(parse_measure_literal(c.measure_a), parse_measure_literal(c.measure_b), c.t);
            *out << io::dump(wrap(c, io::to_json(g))) << '\n';
            summary << "geodesic: t=" << c.t << ", " << g.pieces().size() << " pieces\n";
            break;
        }
        case Command::marginal: {
            const double ld = marginal_log_density(partition_of(c), EntropicParams(c.beta), c.x);
            if (csv) {
                write_csv_provenance(*out, c);
                *out << "log_density\n" << io::format_double(ld) << '\n';
            } else {
                *out << io::dump(wrap(c, io::json{{"log_density", ld}})) << '\n';
            }
            summary << "log density " << io::format_double(ld) << '\n';
            break;
        }
        case Command::audit: {
            const ConvexityAuditRow row = audit_row(c.s, c.t, EntropicParams(c.beta));
            std::optional<MonteCarloCrossCheck> check;
            if (c.mc_samples > 0) {
                check = monte_carlo_cross_check(c.s, c.t, EntropicParams(c.beta), c.mc_samples, *c.seed);
                if (!check->pass) status = kExitCrossCheck;
            }
            if (csv) {
                write_csv_provenance(*out, c);
                if (check) *out << "# mc_cross_check: " << io::to_json(*check).dump() << '\n';
                io::write_audit_csv(*out, std::span(&row, 1));
            } else {
                io::json r{{"beta", row.beta},       {"s", row.s},
                           {"t", row.t},             {"log_QA", row.log_QA},
                           {"log_QC", row.log_QC},   {"log_ratio", row.log_ratio},
                           {"implied_K", row.implied_K}};
                if (check) r["mc_cross_check"] = io::to_json(*check);
                *out << io::dump(wrap(c, std::move(r))) << '\n';
            }
            summary << "audit: implied_K=" << io::format_double(row.implied_K)
                    << (check ? (check->pass ? " (MC cross-check pass)" : " (MC cross-check FAIL)") : "") << '\n';
            break;
        }
        case Command::scan: {
            const std::vector<double> grid = s_grid_of(c);
            const ScanResult r = scan(c.t, EntropicParams(c.beta), grid);
            if (csv) {
                write_csv_provenance(*out, c);
                io::write_audit_csv(*out, r.rows);
            } else {
                io::json rows = io::json::array();
                for (const ConvexityAuditRow& row : r.rows) {
                    rows.push_back({{"beta", row.beta},         {"s", row.s},
                                    {"t", row.t},               {"log_QA", row.log_QA},
                                    {"log_QC", row.log_QC},     {"log_ratio", row.log_ratio},
                                    {"implied_K", row.implied_K}});
                }
                io::json result{{"rows", std::move(rows)}, {"min_implied_K", r.min_implied_K}};
                if (r.decreasing_from) result["decreasing_from"] = *r.decreasing_from;
                *out << io::dump(wrap(c, std::move(result))) << '\n';
            }
            summary << "scan: " << r.rows.size() << " rows, min implied_K=" << io::format_double(r.min_implied_K)
                    << "; REFUTED(K) for every K > " << io::format_double(std::min(r.min_implied_K, 0.0)) << '\n';
            break;
        }
        case Command::probe: {
            const CylinderFunction F = builtin_cylinder(c.function);
            const EntropicParams params(c.beta);
            const ProbeReport report = c.probe_kind == "poincare"
                                           ? poincare_probe(F, params, partition_of(c), c.n, *c.seed)
                                           : logsob_probe(F, params, partition_of(c), c.n, *c.seed);
            *out << io::dump(wrap(c, io::to_json(report))) << '\n';
            const ProbeLevel& l = report.levels.front();
            if (report.kind == ProbeKind::poincare) {
                summary << "probe: poincare margin " << io::format_double(l.poincare_margin.value) << " +- "
                        << io::format_double(l.poincare_margin.std_error) << (report.pass ? " (pass)" : " (FAIL)")
                        << '\n';
            } else {
                summary << "probe: log-Sobolev ratio " << io::format_double(l.logsob_ratio.value) << " +- "
                        << io::format_double(l.logsob_ratio.std_error) << '\n';
            }
            break;
        }
    }
    return status;
}

int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    try {
        auto parsed = parse_impl(args);
        if (auto* help = std::get_if<HelpText>(&parsed)) {
            out << help->text;
            return kExitOk;
        }
        const RunConfig& config = std::get<RunConfig>(parsed);
        validate(config);
        // Artifact on stdout means the summary moves to stderr.
        return run(config, out, config.output.empty() ? err : out);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const NumericalFloorError& e) {
        err << "numerical floor: " << e.what() << '\n';
        return kExitNumericalFloor;
    } catch (const DomainError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    }
}

}  // namespace entropic::cli
