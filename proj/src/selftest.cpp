#include "holoweight/selftest.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <random>

#include "holoweight/bergman.hpp"
#include "holoweight/catalog.hpp"
#include "holoweight/expr.hpp"
#include "holoweight/geometry.hpp"
#include "holoweight/quadrature.hpp"
#include "holoweight/report.hpp"
#include "holoweight/weights.hpp"

namespace hw {
namespace {

constexpr double kPi = 3.14159265358979323846;

struct Recorder {
    SelfTestResult result;

    void add(const std::string& name, bool pass, const std::string& detail) {
        result.checks.push_back({name, pass, detail});
        result.all_pass = result.all_pass && pass;
    }

    void add_max(const std::string& name, double worst, double bound) {
        add(name, worst <= bound,
            "max " + format_double(worst) + " (bound " + format_double(bound) + ")");
    }
};

double uniform01(std::mt19937_64& rng) { return double(rng() >> 11) * 0x1.0p-53; }

void geometry_invariants(Recorder& rec, const DomainModel& dom, int samples) {
    auto pts = sample_collar(dom, samples, 20260825);
    std::vector<CompiledField> grads;
    for (const auto& g : dom.delta_grad) grads.emplace_back(g);
    CompiledField ndelta(apply_normal(dom.delta, dom).simplified());
    CompiledField tdelta(apply_tangential(dom.delta, dom).simplified());

    double worst_grad = 0, worst_n = 0, worst_t = 0;
    for (const auto& p : pts) {
        double norm2 = 0;
        for (auto& g : grads) {
            double v = g.eval(p).real();
            norm2 += v * v;
        }
        worst_grad = std::max(worst_grad, std::abs(std::sqrt(norm2) - 1.0));
        worst_n = std::max(worst_n, std::abs(ndelta.eval(p).real() - 1.0));
        worst_t = std::max(worst_t, std::abs(tdelta.eval(p)));
    }
    rec.add_max(dom.id + ": unit gradient of distance in collar", worst_grad, 1e-10);
    rec.add_max(dom.id + ": normal derivative of distance = 1", worst_n, 1e-10);
    rec.add_max(dom.id + ": tangential derivative of distance = 0", worst_t, 1e-12);
}

void cutoff_junctions(Recorder& rec, const DomainModel& dom) {
    // Treat zeta as a one-variable function of delta via a coordinate stand-in
    // and inspect its first four derivatives approaching both junctions.
    Field u = Field::coordinate(1);
    Field t = (1.0 / (dom.collar_outer - dom.collar_inner)) *
              (Field::constant(dom.collar_outer) - u);
    Field zeta_of_u = smooth_step01(t).simplified();

    bool ok = true;
    std::string detail;
    std::vector<Field> ders;
    Field d = zeta_of_u;
    for (int order = 1; order <= 4; ++order) {
        d = d.partial(1).simplified();
        ders.push_back(d);
    }
    const double offsets[] = {1e-2, 1e-3, 1e-4, 1e-5};
    for (double junction : {dom.collar_inner, dom.collar_outer}) {
        double sign = junction == dom.collar_inner ? 1.0 : -1.0;
        int order = 1;
        for (const auto& der : ders) {
            // Near the unit end of the step the symbolic derivative cancels
            // two order-one terms, so residuals bottom out at roundoff
            // amplified by the chain factor once per order.
            double dust_floor = 1e-12 * std::pow(100.0, order - 1);
            double prev = std::numeric_limits<double>::infinity();
            for (double off : offsets) {
                double x[1] = {junction + sign * off};
                double v = std::abs(der.eval(Point(x, 1)));
                if (v > std::max(prev, dust_floor)) {
                    ok = false;
                    detail = "derivative grew approaching delta = " + format_double(junction);
                }
                prev = v;
            }
            ++order;
        }
    }
    rec.add("cutoff derivatives flatten at both junctions", ok,
            ok ? "orders 1..4 decay into dust floor" : detail);
}

void blend_continuity(Recorder& rec, const DomainModel& disc) {
    CompiledField delta(disc.delta);
    double h = 1e-6;
    double inside[2] = {0.5 - h, 0.0};
    double outside[2] = {0.5 + h, 0.0};
    double din = delta.eval(Point(inside, 2)).real();
    double dout = delta.eval(Point(outside, 2)).real();
    double gap = std::abs(din - (1.0 - (0.5 - h)));
    double gap2 = std::abs(dout - (1.0 - (0.5 + h)));
    rec.add_max("distance matches 1-r on both sides of the blend radius", std::max(gap, gap2),
                1e-12);
}

Field fd_battery() {
    Field x = Field::coordinate(1);
    Field y = Field::coordinate(2);
    Field f = Field::power(x, 2) * y + Field::exp(Complex(0.3, 0.0) * (x * y)) +
              Field::recip(Field::constant(2.0) + x) +
              Field::sqrt(Field::constant(1.0) + Field::power(y, 2)) +
              Field::smoothstep_e(x + Field::constant(0.2)) +
              Field::scale(Complex(0.0, 0.5), Field::power(y, 3));
    return f;
}

void derivative_checks(Recorder& rec) {
    Field f = fd_battery();
    Field fx = f.partial(1);
    Field fy = f.partial(2);
    std::mt19937_64 rng(11);
    double worst = 0;
    const double h = 1e-5;
    for (int i = 0; i < 50; ++i) {
        double p[2] = {0.1 + 0.3 * uniform01(rng), 0.1 + 0.3 * uniform01(rng)};
        for (int axis = 0; axis < 2; ++axis) {
            double lo[2] = {p[0], p[1]};
            double hi[2] = {p[0], p[1]};
            lo[axis] -= h;
            hi[axis] += h;
            Complex fd = (f.eval(Point(hi, 2)) - f.eval(Point(lo, 2))) / (2 * h);
            Complex an = (axis == 0 ? fx : fy).eval(Point(p, 2));
            double rel = std::abs(an - fd) / std::max(1.0, std::abs(an));
            worst = std::max(worst, rel);
        }
    }
    rec.add_max("structural derivatives match finite differences", worst, 1e-7);

    Field fxy = fx.partial(2).simplified();
    Field fyx = fy.partial(1).simplified();
    double worst_sym = 0;
    for (int i = 0; i < 50; ++i) {
        double p[2] = {0.1 + 0.3 * uniform01(rng), 0.1 + 0.3 * uniform01(rng)};
        worst_sym = std::max(worst_sym, std::abs(fxy.eval(Point(p, 2)) - fyx.eval(Point(p, 2))));
    }
    rec.add_max("mixed partials commute", worst_sym, 1e-12);

    Field fs = f.simplified();
    CompiledField fc(f);
    double worst_simp = 0;
    for (int i = 0; i < 100; ++i) {
        double p[2] = {0.1 + 0.5 * uniform01(rng), 0.1 + 0.5 * uniform01(rng)};
        Complex a = f.eval(Point(p, 2));
        Complex b = fs.eval(Point(p, 2));
        Complex c = fc.eval(Point(p, 2));
        double scale = std::max(1.0, std::abs(a));
        worst_simp = std::max(worst_simp, std::abs(a - b) / scale);
        worst_simp = std::max(worst_simp, std::abs(a - c) / scale);
    }
    rec.add_max("rewrites and compilation preserve values", worst_simp, 1e-14);
}

void quadrature_checks(Recorder& rec) {
    QuadratureConfig cfg;
    cfg.rel_tol = 1e-10;

    auto one = [](Point) { return Complex(1.0, 0.0); };
    auto r2 = [](Point p) { return Complex(p[0] * p[0] + p[1] * p[1], 0.0); };
    IntegralResult area = integrate_disc(one, cfg);
    IntegralResult mom = integrate_disc(r2, cfg);
    rec.add_max("disc area", std::abs(area.value - Complex(kPi, 0.0)), 1e-10);
    rec.add_max("disc second moment", std::abs(mom.value - Complex(kPi / 2, 0.0)), 1e-10);

    double worst = 0;
    for (int m = 0; m <= 2; ++m)
        for (int p = 0; p <= 2; ++p) {
            auto f = [m, p](Point pt) {
                Complex z(pt[0], pt[1]);
                return std::pow(z, m) * std::pow(std::conj(z), p);
            };
            Complex got = integrate_disc(f, cfg).value;
            worst = std::max(worst, std::abs(got - oracle_monomial_moment(m, p, 0.0)));
        }
    rec.add_max("disc monomial moments match closed forms", worst, 1e-10);

    QuadratureConfig bcfg;
    bcfg.rel_tol = 1e-8;
    IntegralResult vol = integrate_ball(one, bcfg);
    rec.add_max("ball volume", std::abs(vol.value - Complex(kPi * kPi / 2, 0.0)), 1e-7);
}

void catalog_checks(Recorder& rec, const DomainModel& disc) {
    double worst = 0;
    for (const char* id : {"pow:3", "exp"}) {
        auto res = holomorphy_relation_check(find_eta(disc, id), disc, 1000, 7);
        worst = std::max(worst, res.max_residual);
    }
    rec.add_max("normal and rotated derivatives agree for holomorphic inputs", worst, 1e-10);

    HoloTestFunction sing = find_eta(disc, "sing:1.5");
    double t0 = std::abs(sing.taylor(0) - Complex(1.0, 0.0));
    double t1 = std::abs(sing.taylor(1) - Complex(1.5, 0.0));
    rec.add_max("series coefficients of the singular family", std::max(t0, t1), 1e-14);
}

void weight_checks(Recorder& rec, const DomainModel& disc) {
    CutoffProfile cutoff = make_cutoff(disc);
    Field w1 = base_weight(Field::constant(1.0), disc, cutoff);
    CompiledField w1c(w1);
    double origin[2] = {0.0, 0.0};
    double collar[2] = {0.97, 0.0};
    double v_origin = std::abs(w1c.eval(Point(origin, 2)) - Complex(4.0 / 3.0, 0.0));
    double v_collar = std::abs(w1c.eval(Point(collar, 2)) - Complex(1.0 / 0.97, 0.0));
    rec.add_max("first-order weight at the origin", v_origin, 1e-12);
    rec.add_max("first-order weight deep in the collar", v_collar, 1e-10);
}

void projection_checks(Recorder& rec) {
    auto coeffs = project([](Point) { return Complex(1.0, 0.0); }, 4);
    double worst = std::abs(coeffs[0] - Complex(1.0, 0.0));
    for (std::size_t m = 1; m < coeffs.size(); ++m) worst = std::max(worst, std::abs(coeffs[m]));
    rec.add_max("projection of the constant", worst, 1e-10);
}

}  // namespace

SelfTestResult run_self_tests(bool inject_delta_fault) {
    auto t0 = std::chrono::steady_clock::now();
    Recorder rec;

    double scale = inject_delta_fault ? 1.01 : 1.0;
    DomainModel disc = make_disc_domain(0.05, 0.15, scale);
    DomainModel ball = make_ball_domain(0.05, 0.15, scale);

    geometry_invariants(rec, disc, 1000);
    geometry_invariants(rec, ball, 300);
    cutoff_junctions(rec, disc);
    blend_continuity(rec, make_disc_domain());
    derivative_checks(rec);
    quadrature_checks(rec);
    catalog_checks(rec, make_disc_domain());
    weight_checks(rec, make_disc_domain());
    projection_checks(rec);

    rec.result.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rec.result;
}

}  // namespace hw
