#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "entropic/cli_report.hpp"
#include "entropic/convexity_audit.hpp"
#include "entropic/dirichlet_probe.hpp"
#include "entropic/entropic_measure.hpp"
#include "entropic/errors.hpp"
#include "entropic/quadrature.hpp"
#include "entropic/quantile_space.hpp"
#include "entropic/random.hpp"
#include "entropic/serialization.hpp"
#include "entropic/specialfn.hpp"

namespace py = pybind11;
using namespace entropic;

namespace {

// Structured results cross the boundary as the same JSON the CLI writes.
py::object to_python(const io::json& j) {
    return py::module_::import("json").attr("loads")(j.dump());
}

io::json row_json(const ConvexityAuditRow& r) {
    return {{"beta", r.beta},     {"s", r.s},   {"t", r.t},
            {"log_QA", r.log_QA}, {"log_QC", r.log_QC}, {"log_ratio", r.log_ratio},
            {"implied_K", r.implied_K}};
}

Partition make_partition(std::optional<int> dyadic, std::optional<std::vector<double>> knots) {
    if (dyadic && knots) throw DomainError("partition: give either dyadic or knots, not both");
    if (knots) {
        std::vector<double> all{0.0};
        all.insert(all.end(), knots->begin(), knots->end());
        all.push_back(1.0);
        return Partition(std::move(all));
    }
    return Partition::dyadic(dyadic.value_or(8));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Quantile-space Wasserstein geometry, the entropic measure and convexity audits";

    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<NumericalFloorError>(m, "NumericalFloorError", PyExc_ValueError);
    py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_RuntimeError);

    // special functions
    m.def("log_gamma", &special::log_gamma, py::arg("x"));
    m.def("log_beta", [](double a, double b) { return special::log_beta({a, b}); }, py::arg("a"), py::arg("b"));
    m.def("reg_inc_beta", [](double x, double a, double b) { return special::reg_inc_beta(x, {a, b}); },
          py::arg("x"), py::arg("a"), py::arg("b"));
    m.def("reg_inc_beta_upper",
          [](double x, double a, double b) { return special::reg_inc_beta_upper(x, {a, b}); }, py::arg("x"),
          py::arg("a"), py::arg("b"));
    m.def(
        "log_inc_beta_tails",
        [](double x, double a, double b) {
            const special::BetaTails t = special::log_inc_beta_tails(x, {a, b});
            return py::make_tuple(t.log_lower, t.log_upper);
        },
        py::arg("x"), py::arg("a"), py::arg("b"), "(log I_x(a, b), log(1 - I_x(a, b)))");
    m.def(
        "quadrature_oracle",
        [](double a, double b, std::function<double(double)> weight, double lo, double hi, double tol) {
            return special::quadrature_oracle({a, b, std::move(weight)}, lo, hi, tol);
        },
        py::arg("a"), py::arg("b"), py::arg("weight") = nullptr, py::arg("lo") = 0.0, py::arg("hi") = 1.0,
        py::arg("tol") = 1e-10, "int_lo^hi x^(a-1) (1-x)^(b-1) weight(x) dx");

    // quantile space
    py::class_<DiscreteMeasure>(m, "DiscreteMeasure")
        .def(py::init([](const std::vector<std::pair<double, double>>& atoms) {
                 std::vector<Atom> a;
                 for (const auto& [loc, mass] : atoms) a.push_back({loc, mass});
                 return DiscreteMeasure(std::move(a));
             }),
             py::arg("atoms"), "atoms as (location, mass) pairs")
        .def_static("dirac", &DiscreteMeasure::dirac)
        .def_property_readonly("atoms",
                               [](const DiscreteMeasure& d) {
                                   std::vector<std::pair<double, double>> out;
                                   for (const Atom& a : d.atoms()) out.emplace_back(a.location, a.mass);
                                   return out;
                               })
        .def("quantile", &DiscreteMeasure::quantile)
        .def("__len__", &DiscreteMeasure::size)
        .def("__eq__", [](const DiscreteMeasure& a, const DiscreteMeasure& b) { return a == b; })
        .def("to_json", [](const DiscreteMeasure& d) { return io::dump(io::to_json(d)); });

    py::class_<QuantileFunction>(m, "QuantileFunction")
        .def_static("step", [](const std::vector<std::pair<double, double>>& bp) { return QuantileFunction::step(bp); })
        .def_static("linear",
                    [](const std::vector<std::pair<double, double>>& k) { return QuantileFunction::linear(k); })
        .def_static("constant", &QuantileFunction::constant)
        .def_static("identity", &QuantileFunction::identity)
        .def_static("from_json", [](const std::string& text) { return io::quantile_from_json(io::json::parse(text)); })
        .def("__call__", &QuantileFunction::operator(), py::arg("s"))
        .def("is_step", &QuantileFunction::is_step)
        .def_property_readonly("pieces",
                               [](const QuantileFunction& g) {
                                   std::vector<std::tuple<double, double, double>> out;
                                   for (const QuantilePiece& p : g.pieces()) out.emplace_back(p.start, p.left, p.right);
                                   return out;
                               })
        .def("breakpoints", &QuantileFunction::breakpoints)
        .def("__eq__", [](const QuantileFunction& a, const QuantileFunction& b) { return a == b; })
        .def("to_json", [](const QuantileFunction& g) { return io::dump(io::to_json(g)); });

    m.def("pushforward_leb", &pushforward_leb, py::arg("g"));
    m.def("inverse_distribution", &inverse_distribution, py::arg("mu"));
    m.def("w2_distance", &w2_distance, py::arg("f"), py::arg("g"));
    m.def("brute_force_w2", &brute_force_w2, py::arg("mu"), py::arg("nu"));
    m.def("geodesic", &geodesic, py::arg("f"), py::arg("g"), py::arg("t"));
    m.def(
        "entropy",
        [](std::vector<double> reference_mass, std::vector<double> density, bool absolutely_continuous) {
            return entropy(PiecewiseDensity{std::move(reference_mass), std::move(density), absolutely_continuous});
        },
        py::arg("reference_mass"), py::arg("density"), py::arg("absolutely_continuous") = true);
    m.def(
        "restricted_entropy",
        [](double mass, double s, double threshold) {
            return entropy(RestrictedMeasure("reference", ThresholdEvent{s, threshold}, mass));
        },
        py::arg("mass"), py::arg("s") = 0.5, py::arg("threshold") = 0.5, "-log(mass)");
    m.def(
        "k_convexity_check",
        [](const std::vector<std::pair<double, double>>& path, double e0, double e1, double dist, double K) {
            std::vector<PathValue> values;
            for (const auto& [t, v] : path) values.push_back({t, v});
            const KConvexityVerdict r = k_convexity_check(values, e0, e1, dist, K);
            return py::dict(py::arg("holds") = r.holds, py::arg("worst_margin") = r.worst_margin,
                            py::arg("worst_index") = r.worst_index);
        },
        py::arg("path"), py::arg("e0"), py::arg("e1"), py::arg("dist"), py::arg("K"));

    // entropic measure
    m.def(
        "partition_knots",
        [](std::optional<int> dyadic, std::optional<std::vector<double>> knots) {
            const Partition p = make_partition(dyadic, knots);
            return std::vector<double>(p.knots().begin(), p.knots().end());
        },
        py::arg("dyadic") = py::none(), py::arg("knots") = py::none());
    m.def(
        "sample",
        [](double beta, std::uint64_t seed, std::size_t index, std::optional<int> dyadic,
           std::optional<std::vector<double>> knots) {
            Rng rng = Rng::derived(seed, index);
            return to_python(io::to_json(sample(make_partition(dyadic, knots), EntropicParams(beta), rng), beta, seed,
                                         index));
        },
        py::arg("beta"), py::arg("seed"), py::arg("index") = 0, py::arg("dyadic") = py::none(),
        py::arg("knots") = py::none(), "one draw from Rng.derived(seed, index)");
    m.def(
        "marginal_log_density",
        [](const std::vector<double>& knots, double beta, const std::vector<double>& x) {
            return marginal_log_density(make_partition(std::nullopt, knots), EntropicParams(beta), x);
        },
        py::arg("knots"), py::arg("beta"), py::arg("x"));
    m.def("bridge_covariance", [](double s, double t, double beta) { return bridge_covariance(s, t, EntropicParams(beta)); },
          py::arg("s"), py::arg("t"), py::arg("beta"));
    m.def("prob_above", [](double s, double c, double beta) { return prob_above(s, c, EntropicParams(beta)); },
          py::arg("s"), py::arg("c"), py::arg("beta"));
    m.def("log_prob_above", [](double s, double c, double beta) { return log_prob_above(s, c, EntropicParams(beta)); },
          py::arg("s"), py::arg("c"), py::arg("beta"));

    // convexity audit
    m.def("c_set_threshold", &c_set_threshold, py::arg("t"));
    m.def(
        "entropy_lower_bound", [](double s, double t, double beta) { return entropy_lower_bound(s, t, EntropicParams(beta)); },
        py::arg("s"), py::arg("t"), py::arg("beta"));
    m.def(
        "audit_row", [](double s, double t, double beta) { return to_python(row_json(audit_row(s, t, EntropicParams(beta)))); },
        py::arg("s"), py::arg("t"), py::arg("beta"));
    m.def("decade_grid", &decade_grid, py::arg("decades"));
    m.def(
        "scan",
        [](double t, double beta, const std::vector<double>& s_grid) {
            const ScanResult r = scan(t, EntropicParams(beta), s_grid);
            io::json rows = io::json::array();
            for (const ConvexityAuditRow& row : r.rows) rows.push_back(row_json(row));
            io::json out{{"rows", rows}, {"min_implied_K", r.min_implied_K}};
            out["decreasing_from"] = r.decreasing_from ? io::json(*r.decreasing_from) : io::json(nullptr);
            return to_python(out);
        },
        py::arg("t"), py::arg("beta"), py::arg("s_grid"));
    m.def(
        "monte_carlo_cross_check",
        [](double s, double t, double beta, std::size_t n, std::uint64_t seed) {
            return to_python(io::to_json(monte_carlo_cross_check(s, t, EntropicParams(beta), n, seed)));
        },
        py::arg("s"), py::arg("t"), py::arg("beta"), py::arg("n_samples"), py::arg("seed"));

    // probes
    m.def("cylinder_names", [] {
        std::vector<std::string> names;
        for (const NamedCylinder& c : builtin_cylinder_family()) names.push_back(c.name);
        return names;
    });
    m.def(
        "probe",
        [](const std::string& function, const std::string& kind, double beta, std::size_t n, std::uint64_t seed,
           std::optional<int> dyadic, std::optional<std::vector<double>> knots) {
            const CylinderFunction F = builtin_cylinder(function);
            const Partition p = make_partition(dyadic, knots);
            ProbeReport r;
            {
                py::gil_scoped_release release;
                if (kind == "poincare") {
                    r = poincare_probe(F, EntropicParams(beta), p, n, seed);
                } else if (kind == "logsob") {
                    r = logsob_probe(F, EntropicParams(beta), p, n, seed);
                } else {
                    throw DomainError("probe: kind must be poincare or logsob");
                }
            }
            return to_python(io::to_json(r));
        },
        py::arg("function") = "integral", py::arg("kind") = "poincare", py::arg("beta") = 1.0,
        py::arg("n") = kMinProbeSamples, py::arg("seed") = 0, py::arg("dyadic") = py::none(),
        py::arg("knots") = py::none());

    // CLI
    m.def(
        "run_cli",
        [](const std::vector<std::string>& args) {
            std::ostringstream out;
            std::ostringstream err;
            const int code = cli::main_entry(args, out, err);
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "(exit code, stdout, stderr) of the command line front end");
}
