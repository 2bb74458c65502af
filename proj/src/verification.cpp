#include "holoweight/verification.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace hw {
namespace {

constexpr double kRelFloor = 1e-14;

double elapsed_seconds(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void finish_report(IdentityReport& r, const IdentityOptions& opts) {
    r.abs_err = std::abs(r.lhs - r.rhs);
    r.rel_err = r.abs_err / std::max(std::abs(r.lhs), kRelFloor);
    bool within = r.rel_err <= opts.tol_rel ||
                  (r.lhs == Complex(0.0, 0.0) && r.abs_err <= opts.tol_abs);
    r.pass = within && r.quad_converged;
}

QuadratureConfig with_hints(QuadratureConfig cfg, const HoloTestFunction& eta) {
    cfg.singular_points = eta.singularities;
    return cfg;
}

}  // namespace

std::string lhs_source_name(LhsSource s) {
    return s == LhsSource::ClosedForm ? "closed_form" : "oracle_quadrature";
}

PreparedWeight prepare_weight(const DomainModel& domain, const CutoffProfile& cutoff, int k,
                              const std::string& g_id, WeightVariant variant) {
    Multiplier g = make_multiplier(domain, g_id);
    PreparedWeight pw;
    pw.program = inductive_weight(k, g.expr, g_id, domain, cutoff, variant);
    Field core = (Field::power(domain.delta, k) * pw.program.omega).simplified();
    pw.weighted_core = CompiledField(core);
    pw.multiplier = CompiledField(g.expr);
    return pw;
}

IdentityReport verify_with(const PreparedWeight& w, const HoloTestFunction& eta,
                           const IdentityOptions& opts) {
    auto t0 = std::chrono::steady_clock::now();
    const DomainModel& dom = w.program.domain;

    IdentityReport r;
    r.domain_id = dom.id;
    r.k = w.program.k;
    r.g_id = w.program.g_id;
    r.eta_id = eta.id;
    r.variant = variant_name(w.program.variant);

    QuadratureConfig qcfg = with_hints(opts.quad, eta);

    if (auto closed = reference_integral(eta, w.program.g_id, dom)) {
        r.lhs = *closed;
        r.lhs_source = LhsSource::ClosedForm;
    } else {
        auto lhs_integrand = [&](Point p) { return eta.eval(p) * w.multiplier.eval(p); };
        IntegralResult li = integrate_domain(dom, lhs_integrand, qcfg);
        r.lhs = li.value;
        r.lhs_source = LhsSource::OracleQuadrature;
        r.quad_converged = r.quad_converged && li.converged;
    }

    auto rhs_integrand = [&](Point p) { return w.weighted_core.eval(p) * eta.eval(p); };
    IntegralResult ri = integrate_domain(dom, rhs_integrand, qcfg);
    r.rhs = ri.value;
    r.rhs_error_estimate = ri.error_estimate;
    r.quad_converged = r.quad_converged && ri.converged;

    finish_report(r, opts);
    r.runtime_seconds = elapsed_seconds(t0);
    return r;
}

IdentityReport verify_identity(const DomainModel& domain, int k, const std::string& g_id,
                               const std::string& eta_id, WeightVariant variant,
                               const IdentityOptions& opts) {
    CutoffProfile cutoff = make_cutoff(domain);
    PreparedWeight w = prepare_weight(domain, cutoff, k, g_id, variant);
    HoloTestFunction eta = find_eta(domain, eta_id);
    if (!eta.l1_member)
        throw std::invalid_argument("test function '" + eta_id + "' is not integrable");
    return verify_with(w, eta, opts);
}

LhsExhaustionCheck lhs_exhaustion_check(const DomainModel& domain, const HoloTestFunction& eta,
                                        const std::string& g_id, const std::vector<double>& eps_values,
                                        const QuadratureConfig& cfg) {
    LhsExhaustionCheck out;
    auto closed = reference_integral(eta, g_id, domain);
    out.closed_form_available = closed.has_value();
    if (closed) out.closed_form = *closed;

    int p = 0;
    if (g_id.rfind("conj_pow:", 0) == 0) p = std::stoi(g_id.substr(9));
    else if (g_id != "one")
        throw std::invalid_argument("exhaustion check supports g = one or conj_pow:p");
    if (domain.complex_dim != 1 && p != 0)
        throw std::invalid_argument("conjugate powers are disc-only");

    Multiplier g = make_multiplier(domain, g_id);
    CompiledField gf(g.expr);
    QuadratureConfig qcfg = cfg;
    qcfg.singular_points = eta.singularities;

    // On {|x| < rho} the integral of eta * conj(z)^p equals its full-domain
    // value scaled by rho^(2p + dim): each angular mode integrates exactly, so
    // dividing the shell value by that factor removes the truncation entirely.
    for (double eps : eps_values) {
        if (!(eps > 0.0 && eps < 0.5))
            throw std::invalid_argument("exhaustion radii must satisfy 0 < eps < 1/2");
        auto integrand = [&](Point pt) { return eta.eval(pt) * gf.eval(pt); };
        IntegralResult res = integrate_epsilon_shell(domain, integrand, eps, qcfg);
        double rho = 1.0 - eps;
        double factor = std::pow(rho, 2 * p + domain.ambient_dim);
        Complex est = res.value / factor;
        out.eps_values.push_back(eps);
        out.extrapolated.push_back(est);
        out.converged = out.converged && res.converged;
        if (closed) {
            double gap = std::abs(est - *closed) / std::max(std::abs(*closed), kRelFloor);
            out.max_rel_gap = std::max(out.max_rel_gap, gap);
        }
    }
    return out;
}

VariantComparison variant_discrimination(const DomainModel& domain, int k, const std::string& g_id,
                                         const std::string& eta_id, const IdentityOptions& opts) {
    if (k < 2) throw std::invalid_argument("variant discrimination needs k >= 2");
    VariantComparison cmp;
    cmp.corrected = verify_identity(domain, k, g_id, eta_id, WeightVariant::Corrected, opts);
    cmp.bare = verify_identity(domain, k, g_id, eta_id, WeightVariant::BareLaplacian, opts);
    cmp.gap = std::abs(cmp.corrected.rhs - cmp.bare.rhs);
    cmp.error_budget =
        10.0 * (cmp.corrected.rhs_error_estimate + cmp.bare.rhs_error_estimate);
    cmp.significant = cmp.gap > cmp.error_budget;
    return cmp;
}

std::vector<DecayRow> boundary_term_decay(const DomainModel& domain, const std::string& eta_id,
                                          const std::string& g_id, const std::vector<double>& eps_values,
                                          const QuadratureConfig& cfg) {
    if (domain.complex_dim != 1)
        throw std::invalid_argument("boundary-term decay is implemented on the disc only");
    HoloTestFunction eta = find_eta(domain, eta_id);
    if (!eta.has_deriv)
        throw std::invalid_argument("test function '" + eta_id + "' has no derivative evaluator");
    Multiplier g = make_multiplier(domain, g_id);
    CutoffProfile cutoff = make_cutoff(domain);

    Field zg = (cutoff.zeta * g.expr).simplified();
    CompiledField n_zg(apply_normal(zg, domain).simplified());
    CompiledField t_zg(apply_tangential(zg, domain).simplified());
    CompiledField zg_c(zg);
    CompiledField d1(domain.delta_grad[0]);
    CompiledField d2(domain.delta_grad[1]);

    QuadratureConfig qcfg = cfg;
    qcfg.singular_points = eta.singularities;
    const Complex I(0.0, 1.0);

    std::vector<DecayRow> rows;
    for (double eps : eps_values) {
        DecayRow row;
        row.eps = eps;

        auto i2_f = [&](Point p) { return n_zg.eval(p) * eta.eval(p); };
        IntegralResult i2 = integrate_epsilon_shell(domain, i2_f, eps, qcfg);
        row.i2 = i2.value;
        row.eps_i2_abs = eps * std::abs(i2.value);
        row.converged = i2.converged;

        auto t_eta = [&](Point p) {
            Complex dz = eta.deriv_z(Complex(p[0], p[1]));
            double g1 = d1.eval(p).real();
            double g2 = d2.eval(p).real();
            return (Complex(g2, 0.0) - Complex(0.0, g1)) * dz;
        };
        auto i3a_f = [&](Point p) { return zg_c.eval(p) * t_eta(p); };
        auto i3b_f = [&](Point p) { return t_zg.eval(p) * eta.eval(p); };
        IntegralResult i3a = integrate_epsilon_shell(domain, i3a_f, eps, qcfg);
        IntegralResult i3b = integrate_epsilon_shell(domain, i3b_f, eps, qcfg);
        row.i3_eta_part = I * i3a.value;
        row.i3_weight_part = -I * i3b.value;
        row.i3 = row.i3_eta_part + row.i3_weight_part;
        row.converged = row.converged && i3a.converged && i3b.converged;
        rows.push_back(row);
    }
    return rows;
}

SuiteResult run_suite(const RunConfig& cfg) {
    DomainModel dom = make_domain(cfg.domain_id, cfg.collar_inner, cfg.collar_outer);
    CutoffProfile cutoff = make_cutoff(dom);

    struct CellSpec {
        const PreparedWeight* weight;
        const HoloTestFunction* eta;
        IdentityOptions opts;
    };

    std::vector<HoloTestFunction> etas;
    for (const auto& id : cfg.eta_ids) {
        etas.push_back(find_eta(dom, id));
        if (!etas.back().l1_member)
            throw std::invalid_argument("test function '" + id + "' is not integrable");
    }

    // Weights are built serially before any cell runs; the parallel phase only
    // evaluates compiled programs.
    std::vector<PreparedWeight> weights;
    weights.reserve(cfg.variants.size() * cfg.ks.size() * cfg.g_ids.size());
    for (const auto& vname : cfg.variants) {
        WeightVariant v = parse_variant(vname);
        for (int k : cfg.ks)
            for (const auto& g : cfg.g_ids) weights.push_back(prepare_weight(dom, cutoff, k, g, v));
    }

    std::vector<CellSpec> specs;
    std::size_t wi = 0;
    for (std::size_t v = 0; v < cfg.variants.size(); ++v)
        for (std::size_t ki = 0; ki < cfg.ks.size(); ++ki)
            for (std::size_t gi = 0; gi < cfg.g_ids.size(); ++gi, ++wi)
                for (const auto& eta : etas) {
                    bool singular = !eta.singularities.empty();
                    IdentityOptions opts;
                    opts.tol_rel = singular ? cfg.tol_rel_singular : cfg.tol_rel;
                    opts.tol_abs = cfg.tol_abs;
                    opts.quad = quadrature_settings(cfg, singular);
                    specs.push_back({&weights[wi], &eta, opts});
                }

    SuiteResult result;
    result.cells.resize(specs.size());

    int threads = std::max(1, cfg.threads);
    if (threads == 1) {
        for (std::size_t i = 0; i < specs.size(); ++i)
            result.cells[i] = verify_with(*specs[i].weight, *specs[i].eta, specs[i].opts);
    } else {
        std::atomic<std::size_t> next{0};
        auto worker = [&]() {
            for (;;) {
                std::size_t i = next.fetch_add(1);
                if (i >= specs.size()) return;
                result.cells[i] = verify_with(*specs[i].weight, *specs[i].eta, specs[i].opts);
            }
        };
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    for (const auto& cell : result.cells) {
        if (cell.pass) ++result.passed;
        else ++result.failed;
    }
    result.all_pass = result.failed == 0;
    return result;
}

}  // namespace hw
