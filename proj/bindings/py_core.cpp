#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "holoweight/bergman.hpp"
#include "holoweight/catalog.hpp"
#include "holoweight/geometry.hpp"
#include "holoweight/selftest.hpp"
#include "holoweight/verification.hpp"
#include "holoweight/weights.hpp"

namespace py = pybind11;

namespace {

hw::DomainModel domain_from_id(const std::string& id) { return hw::make_domain(id); }

std::vector<double> checked_point(const hw::DomainModel& dom, const std::vector<double>& pt) {
    if (int(pt.size()) != dom.ambient_dim)
        throw std::invalid_argument("point has wrong dimension for domain '" + dom.id + "'");
    return pt;
}

py::dict report_to_dict(const hw::IdentityReport& r) {
    py::dict d;
    d["domain"] = r.domain_id;
    d["k"] = r.k;
    d["g"] = r.g_id;
    d["eta"] = r.eta_id;
    d["variant"] = r.variant;
    d["lhs"] = r.lhs;
    d["lhs_source"] = hw::lhs_source_name(r.lhs_source);
    d["rhs"] = r.rhs;
    d["rhs_error_estimate"] = r.rhs_error_estimate;
    d["abs_err"] = r.abs_err;
    d["rel_err"] = r.rel_err;
    d["quad_converged"] = r.quad_converged;
    d["pass"] = r.pass;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "weighted boundary-integral identity harness (native core)";

    m.def("domain_ids", [] { return std::vector<std::string>{"disc", "ball"}; });

    m.def(
        "catalog_ids",
        [](const std::string& domain) { return hw::catalog_ids(domain_from_id(domain)); },
        py::arg("domain") = "disc");

    m.def(
        "multiplier_ids",
        [](const std::string& domain) { return hw::multiplier_ids(domain_from_id(domain)); },
        py::arg("domain") = "disc");

    m.def(
        "delta",
        [](const std::string& domain, const std::vector<double>& point) {
            hw::DomainModel dom = domain_from_id(domain);
            auto pt = checked_point(dom, point);
            return dom.delta.eval(hw::Point(pt.data(), pt.size())).real();
        },
        py::arg("domain"), py::arg("point"), "smoothed distance to the boundary");

    m.def(
        "weight_value",
        [](const std::string& domain, int k, const std::string& g, const std::string& variant,
           const std::vector<double>& point) {
            hw::DomainModel dom = domain_from_id(domain);
            auto pt = checked_point(dom, point);
            hw::CutoffProfile cutoff = hw::make_cutoff(dom);
            hw::Multiplier mult = hw::make_multiplier(dom, g);
            hw::WeightProgram w =
                hw::inductive_weight(k, mult.expr, g, dom, cutoff, hw::parse_variant(variant));
            return w.omega.eval(hw::Point(pt.data(), pt.size()));
        },
        py::arg("domain"), py::arg("k"), py::arg("g"), py::arg("variant"), py::arg("point"),
        "evaluate the order-k weight at a point");

    m.def(
        "verify",
        [](const std::string& domain, int k, const std::string& g, const std::string& eta,
           const std::string& variant, double tol_rel, double tol_abs, double quad_rel)
            -> py::dict {
            hw::DomainModel dom = domain_from_id(domain);
            hw::IdentityOptions opts;
            opts.tol_rel = tol_rel;
            opts.tol_abs = tol_abs;
            opts.quad.rel_tol = quad_rel;
            return report_to_dict(
                hw::verify_identity(dom, k, g, eta, hw::parse_variant(variant), opts));
        },
        py::arg("domain"), py::arg("k"), py::arg("g"), py::arg("eta"),
        py::arg("variant") = "corrected", py::arg("tol_rel") = 1e-8, py::arg("tol_abs") = 1e-12,
        py::arg("quad_rel") = 1e-10,
        "check the weighted integral identity for one configuration");

    m.def(
        "bergman_coefficients",
        [](int j, int q, int modes) {
            if (j < 0 || q < 0) throw std::invalid_argument("powers must be nonnegative");
            auto f = [j, q](hw::Point p) {
                hw::Complex z(p[0], p[1]);
                return std::pow(std::conj(z), j) * std::pow(z, q);
            };
            return hw::project(f, modes);
        },
        py::arg("j"), py::arg("q"), py::arg("modes") = 8,
        "holomorphic projection coefficients of conj(z)^j * z^q");

    m.def(
        "smoothing_ratios",
        [](const std::string& g, int k, int k2, int jmax) {
            hw::DomainModel disc = hw::make_disc_domain();
            hw::QuadratureConfig qcfg;
            qcfg.rel_tol = 1e-8;
            hw::SmoothingReport rep = hw::smoothing_check(g, k, k2, jmax, disc, qcfg);
            std::vector<double> ratios;
            for (const auto& row : rep.rows) ratios.push_back(row.ratio);
            return py::make_tuple(ratios, rep.bounded);
        },
        py::arg("g") = "pow:2", py::arg("k") = 1, py::arg("k2") = 0, py::arg("jmax") = 12,
        "projection-to-weighted-norm ratio table and the boundedness verdict");

    m.def(
        "self_test",
        [](bool inject_delta_fault) {
            hw::SelfTestResult res = hw::run_self_tests(inject_delta_fault);
            std::vector<std::string> failures;
            for (const auto& c : res.checks)
                if (!c.pass) failures.push_back(c.name + ": " + c.detail);
            return py::make_tuple(res.all_pass, failures);
        },
        py::arg("inject_delta_fault") = false, "run the fast invariant battery");
}
