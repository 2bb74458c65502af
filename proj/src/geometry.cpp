#include "holoweight/geometry.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace hw {

Field smooth_step01(Field t) {
    Field et = Field::smoothstep_e(t);
    Field e1t = Field::smoothstep_e(Field::constant(1.0) - t);
    return et * Field::recip(et + e1t);
}

namespace {

// delta = 1 - scale * m(s),  s = sum x_j^2,
// m = chi(s)*sqrt(s) + (1-chi(s))*(s + 1/4),
// chi a smooth step in s: 0 for s <= 1/16 (r <= 1/4), 1 for s >= 1/4 (r >= 1/2).
// The sqrt branch is only active where chi > 0, so its r = 0 cusp never
// contributes; chi's exact zero masks it.
Field blended_delta(int ambient_dim, double scale) {
    std::vector<Field> sq;
    for (int j = 1; j <= ambient_dim; ++j) sq.push_back(Field::power(Field::coordinate(j), 2));
    Field s = Field::sum(sq);
    Field chi = smooth_step01((16.0 / 3.0) * (s - Field::constant(1.0 / 16.0)));
    Field m = chi * Field::sqrt(s) +
              (Field::constant(1.0) - chi) * (s + Field::constant(0.25));
    return (Field::constant(1.0) - scale * m).simplified();
}

DomainModel build_domain(const std::string& id, int n, double eps1, double eps2, double scale,
                         double volume) {
    if (!(eps1 > 0.0) || !(eps1 < eps2) || !(eps2 < 0.5))
        throw std::invalid_argument("domain collar must satisfy 0 < eps1 < eps2 < 1 - blend_radius");
    DomainModel dom;
    dom.id = id;
    dom.complex_dim = n;
    dom.ambient_dim = 2 * n;
    dom.collar_inner = eps1;
    dom.collar_outer = eps2;
    dom.blend_radius = 0.5;
    dom.volume = volume;
    dom.delta = blended_delta(dom.ambient_dim, scale);
    for (int j = 1; j <= dom.ambient_dim; ++j)
        dom.delta_grad.push_back(dom.delta.partial(j).simplified());
    dom.delta_laplacian = laplacian(dom.delta, dom.ambient_dim).simplified();
    return dom;
}

}  // namespace

DomainModel make_disc_domain(double collar_inner, double collar_outer, double delta_scale) {
    const double pi = 3.14159265358979323846;
    return build_domain("disc", 1, collar_inner, collar_outer, delta_scale, pi);
}

DomainModel make_ball_domain(double collar_inner, double collar_outer, double delta_scale) {
    const double pi = 3.14159265358979323846;
    return build_domain("ball", 2, collar_inner, collar_outer, delta_scale, pi * pi / 2.0);
}

DomainModel make_domain(const std::string& id, double collar_inner, double collar_outer) {
    if (id == "disc") return make_disc_domain(collar_inner, collar_outer);
    if (id == "ball") return make_ball_domain(collar_inner, collar_outer);
    throw std::invalid_argument("unknown domain id: " + id);
}

CutoffProfile make_cutoff(const DomainModel& domain) {
    CutoffProfile cut;
    cut.inner = domain.collar_inner;
    cut.outer = domain.collar_outer;
    double w = domain.collar_outer - domain.collar_inner;
    Field t = (1.0 / w) * (Field::constant(domain.collar_outer) - domain.delta);
    cut.zeta = smooth_step01(t).simplified();
    return cut;
}

namespace {
inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}
}  // namespace

std::vector<std::vector<double>> sample_collar(const DomainModel& domain, int count,
                                               std::uint64_t seed) {
    if (count < 1) throw std::invalid_argument("sample_collar: count must be >= 1");
    std::mt19937_64 rng(seed);
    std::vector<std::vector<double>> pts;
    pts.reserve(static_cast<std::size_t>(count));
    const double lo = domain.collar_inner / 2.0, hi = domain.collar_outer;
    for (int i = 0; i < count; ++i) {
        double d = lo + (hi - lo) * uniform01(rng);
        double r = 1.0 - d;
        if (domain.ambient_dim == 2) {
            double th = 2.0 * 3.14159265358979323846 * uniform01(rng);
            pts.push_back({r * std::cos(th), r * std::sin(th)});
        } else {
            // direction via normalized Box-Muller gaussians (deterministic here,
            // unlike std::normal_distribution whose algorithm is unspecified)
            double g[4];
            for (int j = 0; j < 4; j += 2) {
                double u1 = uniform01(rng), u2 = uniform01(rng);
                while (u1 <= 0.0) u1 = uniform01(rng);
                double m = std::sqrt(-2.0 * std::log(u1));
                g[j] = m * std::cos(2.0 * 3.14159265358979323846 * u2);
                g[j + 1] = m * std::sin(2.0 * 3.14159265358979323846 * u2);
            }
            double norm = std::sqrt(g[0] * g[0] + g[1] * g[1] + g[2] * g[2] + g[3] * g[3]);
            if (norm == 0.0) {
                g[0] = 1.0;
                norm = 1.0;
            }
            pts.push_back({r * g[0] / norm, r * g[1] / norm, r * g[2] / norm, r * g[3] / norm});
        }
    }
    return pts;
}

Field apply_normal(Field f, const DomainModel& domain) {
    std::vector<Field> terms;
    for (int j = 1; j <= domain.ambient_dim; ++j)
        terms.push_back(domain.delta_grad[static_cast<std::size_t>(j - 1)] * f.partial(j));
    return Field::sum(terms);
}

Field apply_tangential(Field f, const DomainModel& domain) {
    std::vector<Field> terms;
    for (int j = 1; j <= domain.complex_dim; ++j) {
        Field dx_even = domain.delta_grad[static_cast<std::size_t>(2 * j - 1)];  // delta_{x_2j}
        Field dx_odd = domain.delta_grad[static_cast<std::size_t>(2 * j - 2)];   // delta_{x_2j-1}
        terms.push_back(dx_even * f.partial(2 * j - 1));
        terms.push_back(-(dx_odd * f.partial(2 * j)));
    }
    return Field::sum(terms);
}

}  // namespace hw
