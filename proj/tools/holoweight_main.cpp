#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "holoweight/bergman.hpp"
#include "holoweight/catalog.hpp"
#include "holoweight/config.hpp"
#include "holoweight/report.hpp"
#include "holoweight/selftest.hpp"
#include "holoweight/verification.hpp"
#include "holoweight/weights.hpp"

namespace {

std::string default_out_dir() {
    if (const char* env = std::getenv("HOLOWEIGHT_OUT")) return env;
    return "out";
}

std::string sanitize(const std::string& id) {
    std::string s = id;
    for (char& c : s)
        if (c == ':' || c == ',') c = '-';
    return s;
}

int cmd_verify(const std::string& domain_id, int k, const std::string& g_id,
               const std::string& eta_id, const std::string& variant, double tol_rel,
               double tol_abs, double quad_rel, double quad_abs, int max_subdiv, int base_rule,
               const std::string& report_path) {
    hw::DomainModel dom = hw::make_domain(domain_id);
    hw::IdentityOptions opts;
    opts.tol_rel = tol_rel;
    opts.tol_abs = tol_abs;
    opts.quad.rel_tol = quad_rel;
    opts.quad.abs_tol = quad_abs;
    opts.quad.max_subdivisions = max_subdiv;
    opts.quad.base_rule = base_rule;

    hw::IdentityReport r =
        hw::verify_identity(dom, k, g_id, eta_id, hw::parse_variant(variant), opts);

    std::cout << "domain=" << r.domain_id << " k=" << r.k << " g=" << r.g_id
              << " eta=" << r.eta_id << " variant=" << r.variant << "\n"
              << "lhs = " << hw::format_double(r.lhs.real()) << " + "
              << hw::format_double(r.lhs.imag()) << "i  (" << hw::lhs_source_name(r.lhs_source)
              << ")\n"
              << "rhs = " << hw::format_double(r.rhs.real()) << " + "
              << hw::format_double(r.rhs.imag())
              << "i  (err est " << hw::format_double(r.rhs_error_estimate) << ")\n"
              << "abs_err = " << hw::format_double(r.abs_err)
              << "  rel_err = " << hw::format_double(r.rel_err) << "\n"
              << (r.pass ? "PASS" : "FAIL") << "\n";

    if (!report_path.empty())
        hw::write_text_file(report_path, hw::report_to_json(r).dump(2) + "\n");
    return r.pass ? 0 : 1;
}

int cmd_suite(const std::string& config_path, const std::string& out_dir_flag, int threads_flag) {
    hw::RunConfig cfg =
        config_path.empty() ? hw::default_config() : hw::load_config_file(config_path);
    if (threads_flag > 0) cfg.threads = threads_flag;
    std::string out_dir = !out_dir_flag.empty() ? out_dir_flag
                          : !cfg.out_dir.empty() ? cfg.out_dir
                                                 : default_out_dir();

    hw::SuiteResult res = hw::run_suite(cfg);
    hw::emit_reports(cfg, res, out_dir);

    for (const auto& c : res.cells)
        std::cout << (c.pass ? "pass " : "FAIL ") << c.domain_id << " k=" << c.k << " g=" << c.g_id
                  << " eta=" << c.eta_id << " " << c.variant
                  << " rel_err=" << hw::format_double(c.rel_err) << "\n";
    std::cout << res.passed << "/" << res.cells.size() << " cells passed; reports in " << out_dir
              << "\n";
    return res.all_pass ? 0 : 1;
}

int cmd_weight_dump(const std::string& domain_id, int k, const std::string& g_id,
                    const std::string& variant, int nr, int ntheta, std::string out_path,
                    bool dump_expr) {
    hw::DomainModel dom = hw::make_domain(domain_id);
    hw::CutoffProfile cutoff = hw::make_cutoff(dom);
    hw::Multiplier g = hw::make_multiplier(dom, g_id);
    hw::WeightProgram w =
        hw::inductive_weight(k, g.expr, g_id, dom, cutoff, hw::parse_variant(variant));

    if (dump_expr) {
        std::cout << w.omega.dump() << "\n";
        return 0;
    }

    if (out_path.empty()) {
        out_path = (std::filesystem::path(default_out_dir()) / "weights" /
                    (sanitize(domain_id) + "_k" + std::to_string(k) + "_" + sanitize(g_id) + "_" +
                     variant + ".csv"))
                       .string();
    }

    hw::CompiledField f(w.omega);
    std::ostringstream csv;
    const double pi = 3.14159265358979323846;
    if (dom.ambient_dim == 2) {
        csv << "r,theta,x1,x2,re_omega,im_omega\n";
        for (int i = 0; i < nr; ++i) {
            double r = (double(i) + 0.5) / double(nr);
            for (int j = 0; j < ntheta; ++j) {
                double th = 2.0 * pi * double(j) / double(ntheta);
                double pt[2] = {r * std::cos(th), r * std::sin(th)};
                hw::Complex v = f.eval(hw::Point(pt, 2));
                csv << hw::format_double(r) << ',' << hw::format_double(th) << ','
                    << hw::format_double(pt[0]) << ',' << hw::format_double(pt[1]) << ','
                    << hw::format_double(v.real()) << ',' << hw::format_double(v.imag()) << "\n";
            }
        }
    } else {
        // radial fan in the (x1, x3) plane
        csv << "r,angle,x1,x2,x3,x4,re_omega,im_omega\n";
        for (int i = 0; i < nr; ++i) {
            double r = (double(i) + 0.5) / double(nr);
            for (int j = 0; j < ntheta; ++j) {
                double th = 2.0 * pi * double(j) / double(ntheta);
                double pt[4] = {r * std::cos(th), 0.0, r * std::sin(th), 0.0};
                hw::Complex v = f.eval(hw::Point(pt, 4));
                csv << hw::format_double(r) << ',' << hw::format_double(th) << ','
                    << hw::format_double(pt[0]) << ",0," << hw::format_double(pt[2]) << ",0,"
                    << hw::format_double(v.real()) << ',' << hw::format_double(v.imag()) << "\n";
            }
        }
    }
    hw::write_text_file(out_path, csv.str());
    std::cout << "wrote " << out_path << " (" << nr << "x" << ntheta << " grid, dag "
              << w.omega.dag_size() << " nodes)\n";
    return 0;
}

int cmd_bergman(const std::string& g_id, int k, int k2, int jmax, const std::string& report_path) {
    hw::DomainModel disc = hw::make_disc_domain();
    hw::QuadratureConfig qcfg;
    qcfg.rel_tol = 1e-9;
    hw::SmoothingReport rep = hw::smoothing_check(g_id, k, k2, jmax, disc, qcfg);

    for (const auto& row : rep.rows)
        std::cout << "j=" << row.j << "  projected=" << hw::format_double(row.projected_norm)
                  << "  weighted=" << hw::format_double(row.weighted_norm)
                  << "  ratio=" << hw::format_double(row.ratio) << "\n";
    std::cout << "max ratio j<=10: " << hw::format_double(rep.max_ratio_low)
              << "  j in [10," << jmax << "]: " << hw::format_double(rep.max_ratio_high) << "\n"
              << (rep.bounded ? "BOUNDED" : "UNBOUNDED") << "\n";

    std::string path = report_path.empty()
                           ? (std::filesystem::path(default_out_dir()) / "bergman.json").string()
                           : report_path;
    hw::write_text_file(path, hw::smoothing_to_json(rep).dump(2) + "\n");
    std::cout << "wrote " << path << "\n";
    return rep.bounded ? 0 : 1;
}

int cmd_self_test(bool inject_fault) {
    hw::SelfTestResult res = hw::run_self_tests(inject_fault);
    for (const auto& c : res.checks)
        std::cout << (c.pass ? "[ OK ] " : "[FAIL] ") << c.name << ": " << c.detail << "\n";
    std::cout << res.checks.size() << " checks in " << hw::format_double(res.seconds) << "s: "
              << (res.all_pass ? "all passed" : "FAILURES present") << "\n";
    return res.all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"weighted boundary-integral identity harness"};
    app.require_subcommand(1);

    std::string domain = "disc", g_id = "one", eta_id = "const", variant = "corrected";
    int k = 1;
    double tol_rel = 1e-8, tol_abs = 1e-12, quad_rel = 1e-10, quad_abs = 1e-13;
    int max_subdiv = 4000, base_rule = 16;
    std::string report_path, config_path, out_dir;
    int threads = 0;
    int nr = 24, ntheta = 32, k2 = 0, jmax = 40;
    bool dump_expr = false, inject_fault = false;

    auto* verify = app.add_subcommand("verify", "check the integral identity for one cell");
    verify->add_option("--domain", domain, "disc or ball");
    verify->add_option("--k", k, "weight order")->check(CLI::Range(1, 4));
    verify->add_option("--g", g_id, "multiplier id (one, conj_pow:p, exp_x1)");
    verify->add_option("--eta", eta_id, "test function id");
    verify->add_option("--variant", variant, "corrected or bare_laplacian");
    verify->add_option("--tol-rel", tol_rel, "relative pass tolerance");
    verify->add_option("--tol-abs", tol_abs, "absolute pass tolerance when lhs = 0");
    verify->add_option("--quad-rel", quad_rel, "quadrature relative tolerance");
    verify->add_option("--quad-abs", quad_abs, "quadrature absolute tolerance");
    verify->add_option("--max-subdiv", max_subdiv, "quadrature subdivision budget");
    verify->add_option("--base-rule", base_rule, "tensor rule order");
    verify->add_option("--report", report_path, "write a JSON report here");

    auto* suite = app.add_subcommand("suite", "run the configured verification matrix");
    suite->add_option("--config", config_path, "config file (defaults used when omitted)");
    suite->add_option("--out", out_dir, "output directory for suite.json / suite.csv");
    suite->add_option("--threads", threads, "worker threads (overrides config)");

    auto* wdump = app.add_subcommand("weight-dump", "tabulate a weight on a polar grid");
    wdump->add_option("--domain", domain, "disc or ball");
    wdump->add_option("--k", k, "weight order")->check(CLI::Range(1, 4));
    wdump->add_option("--g", g_id, "multiplier id");
    wdump->add_option("--variant", variant, "corrected or bare_laplacian");
    wdump->add_option("--nr", nr, "radial grid count")->check(CLI::PositiveNumber);
    wdump->add_option("--ntheta", ntheta, "angular grid count")->check(CLI::PositiveNumber);
    wdump->add_option("--out", report_path, "output CSV path");
    wdump->add_flag("--dump-expr", dump_expr, "print the expression instead of values");

    auto* bergman = app.add_subcommand("bergman-check", "projection smoothing ratio table");
    bergman->add_option("--g", g_id, "multiplier id (one, pow:q, exp_x1)");
    bergman->add_option("--k", k, "weight order in the denominator norm");
    bergman->add_option("--k2", k2, "Sobolev order of the projected norm")->check(CLI::Range(0, 2));
    bergman->add_option("--jmax", jmax, "largest conjugate power");
    bergman->add_option("--report", report_path, "output JSON path");

    auto* selftest = app.add_subcommand("self-test", "fast invariant battery");
    selftest->add_flag("--inject-delta-fault", inject_fault,
                       "scale the distance field to prove the detector trips");

    CLI11_PARSE(app, argc, argv);

    try {
        if (verify->parsed())
            return cmd_verify(domain, k, g_id, eta_id, variant, tol_rel, tol_abs, quad_rel,
                              quad_abs, max_subdiv, base_rule, report_path);
        if (suite->parsed()) return cmd_suite(config_path, out_dir, threads);
        if (wdump->parsed())
            return cmd_weight_dump(domain, k, g_id, variant, nr, ntheta, report_path, dump_expr);
        if (bergman->parsed()) return cmd_bergman(g_id, k, k2, jmax, report_path);
        if (selftest->parsed()) return cmd_self_test(inject_fault);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
