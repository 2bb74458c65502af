#include "holoweight/weights.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <unordered_set>

namespace hw {
namespace {

Field one_minus(Field zeta) { return (Field::constant(1.0) - zeta).simplified(); }

Field collar_term(Field carrier, const DomainModel& dom, const CutoffProfile& cut) {
    Field q = Field::collar_quotient(one_minus(cut.zeta), dom.delta, dom.collar_inner);
    return q * carrier;
}

Field bracket_term(Field w, const DomainModel& dom, const CutoffProfile& cut, bool zeta_in_laplacian) {
    Field zw = (cut.zeta * w).simplified();
    Field lap_carrier = zeta_in_laplacian ? zw : w;
    Field br = apply_normal(zw, dom) + dom.delta_laplacian * lap_carrier -
               Complex(0.0, 1.0) * apply_tangential(zw, dom);
    return br;
}

double least_squares_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
    double n = double(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    double denom = n * sxx - sx * sx;
    return (n * sxy - sx * sy) / denom;
}

}  // namespace

std::string variant_name(WeightVariant v) {
    return v == WeightVariant::Corrected ? "corrected" : "bare_laplacian";
}

WeightVariant parse_variant(const std::string& name) {
    if (name == "corrected") return WeightVariant::Corrected;
    if (name == "bare_laplacian" || name == "bare-laplacian")
        return WeightVariant::BareLaplacian;
    throw std::invalid_argument("unknown weight variant '" + name +
                                "' (expected 'corrected' or 'bare_laplacian')");
}

Field base_weight(Field gamma, const DomainModel& domain, const CutoffProfile& cutoff) {
    Field br = bracket_term(gamma, domain, cutoff, /*zeta_in_laplacian=*/true);
    return (collar_term(gamma, domain, cutoff) - br).simplified();
}

Field induction_step(Field w, int m, const DomainModel& domain, const CutoffProfile& cutoff,
                     WeightVariant variant) {
    if (m < 1) throw std::invalid_argument("induction step index must be >= 1");
    bool zeta_in_lap = variant == WeightVariant::Corrected;
    Field br = bracket_term(w, domain, cutoff, zeta_in_lap);
    Field next = collar_term(w, domain, cutoff) - (1.0 / double(m + 1)) * br;
    return next.simplified();
}

WeightProgram inductive_weight(int k, Field g, const std::string& g_id, const DomainModel& domain,
                               const CutoffProfile& cutoff, WeightVariant variant) {
    if (k < 1) throw std::invalid_argument("weight order k must be >= 1");
    WeightProgram wp;
    wp.k = k;
    wp.g_id = g_id;
    wp.variant = variant;
    wp.domain = domain;
    wp.cutoff = cutoff;
    Field omega = base_weight(g, domain, cutoff);
    wp.steps.push_back(omega);
    wp.dag_sizes.push_back(omega.dag_size());
    for (int m = 1; m < k; ++m) {
        omega = induction_step(omega, m, domain, cutoff, variant);
        wp.steps.push_back(omega);
        wp.dag_sizes.push_back(omega.dag_size());
    }
    wp.omega = omega;
    return wp;
}

bool structural_recursion_holds(const WeightProgram& w) {
    for (std::size_t m = 1; m < w.steps.size(); ++m) {
        Field rebuilt = induction_step(w.steps[m - 1], int(m), w.domain, w.cutoff, w.variant);
        if (!(rebuilt == w.steps[m])) return false;
    }
    return true;
}

bool contains_bare_delta_reciprocal(Field f, const DomainModel& domain) {
    std::unordered_set<const ExprNode*> seen;
    std::vector<ExprRef> stack = {f.node()};
    ExprRef delta = domain.delta.node();
    while (!stack.empty()) {
        ExprRef n = stack.back();
        stack.pop_back();
        if (!seen.insert(n).second) continue;
        if (n->kind == ExprKind::Recip && !n->kids.empty() && n->kids[0] == delta) return true;
        for (ExprRef kid : n->kids) stack.push_back(kid);
    }
    return false;
}

VanishingProfile vanishing_profile(const WeightProgram& w, std::vector<double> scales,
                                   std::vector<std::vector<double>> directions) {
    if (scales.empty()) throw std::invalid_argument("vanishing profile needs at least one scale");
    for (double s : scales)
        if (!(s > 0.0 && s < w.domain.collar_inner))
            throw std::invalid_argument("profile scales must lie strictly inside (0, collar_inner)");
    std::sort(scales.begin(), scales.end(), std::greater<double>());

    int dim = w.domain.ambient_dim;
    if (directions.empty()) {
        if (dim == 2) {
            const double pi = 3.14159265358979323846;
            for (int i = 0; i < 8; ++i) {
                double t = pi * double(i) / 4.0;
                directions.push_back({std::cos(t), std::sin(t)});
            }
        } else {
            directions = {{1, 0, 0, 0},
                          {0, 0, 1, 0},
                          {0.5, 0.5, 0.5, 0.5},
                          {0.6, 0.0, 0.8, 0.0}};
        }
    }

    // delta^k * omega and its repeated normal derivatives
    Field h = (Field::power(w.domain.delta, w.k) * w.omega).simplified();
    std::vector<CompiledField> levels;
    levels.emplace_back(h);
    for (int d = 1; d < w.k; ++d) {
        h = apply_normal(h, w.domain).simplified();
        levels.emplace_back(h);
    }

    VanishingProfile out;
    out.k = w.k;
    for (const auto& dir : directions) {
        if (int(dir.size()) != dim) throw std::invalid_argument("profile direction has wrong dimension");
        double norm = 0;
        for (double c : dir) norm += c * c;
        norm = std::sqrt(norm);
        if (!(norm > 0)) throw std::invalid_argument("profile direction must be nonzero");

        RayProfile ray;
        for (std::size_t j = 0; j < dir.size(); ++j) ray.direction[j] = dir[j] / norm;
        ray.scales = scales;
        ray.magnitudes.assign(levels.size(), {});

        double peak = 0.0;
        for (double s : scales) {
            std::vector<double> pt(static_cast<std::size_t>(dim));
            for (int j = 0; j < dim; ++j) pt[std::size_t(j)] = (1.0 - s) * ray.direction[std::size_t(j)];
            for (std::size_t d = 0; d < levels.size(); ++d) {
                double mag = std::abs(levels[d].eval(pt));
                ray.magnitudes[d].push_back(mag);
                peak = std::max(peak, mag);
            }
        }

        // Slope fits are meaningless when the profile sits at roundoff dust
        // (the weight vanishes identically near the boundary for some inputs).
        ray.degenerate = peak < 1e-11;
        std::vector<double> logs;
        for (double s : scales) logs.push_back(std::log(s));
        for (std::size_t d = 0; d < levels.size(); ++d) {
            if (ray.degenerate) {
                ray.slopes.push_back(std::numeric_limits<double>::quiet_NaN());
                continue;
            }
            std::vector<double> logv;
            for (double m : ray.magnitudes[d]) logv.push_back(std::log(std::max(m, 1e-300)));
            ray.slopes.push_back(least_squares_slope(logs, logv));
        }
        out.rays.push_back(std::move(ray));
    }
    return out;
}

double collar_sup(const WeightProgram& w, int samples, std::uint64_t seed) {
    auto pts = sample_collar(w.domain, samples, seed);
    CompiledField f(w.omega);
    double sup = 0.0;
    for (const auto& p : pts) sup = std::max(sup, std::abs(f.eval(p)));
    return sup;
}

}  // namespace hw
