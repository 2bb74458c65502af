#include "holoweight/bergman.hpp"

#include <cmath>
#include <stdexcept>

#include "holoweight/expr.hpp"

namespace hw {
namespace {

constexpr double kPi = 3.14159265358979323846;

std::function<Complex(Point)> bergman_multiplier(const std::string& g_id) {
    if (g_id == "one") return [](Point) { return Complex(1.0, 0.0); };
    if (g_id == "exp_x1") return [](Point p) { return Complex(std::exp(p[0]), 0.0); };
    if (g_id.rfind("pow:", 0) == 0) {
        int q = std::stoi(g_id.substr(4));
        if (q < 0 || q > 16) throw std::invalid_argument("multiplier exponent out of range in '" + g_id + "'");
        return [q](Point p) { return std::pow(Complex(p[0], p[1]), q); };
    }
    throw std::invalid_argument("unknown projection multiplier '" + g_id + "'");
}

}  // namespace

DiscBergmanBasis make_disc_basis(int max_mode) {
    if (max_mode < 0) throw std::invalid_argument("max_mode must be >= 0");
    DiscBergmanBasis b;
    b.max_mode = max_mode;
    for (int m = 0; m <= max_mode; ++m) b.norms_sq.push_back(kPi / double(m + 1));
    return b;
}

std::vector<Complex> project(const std::function<Complex(Point)>& f, int max_mode,
                             const ProjectionConfig& cfg) {
    if (max_mode < 0) throw std::invalid_argument("max_mode must be >= 0");
    if (cfg.radial_order < 2 || cfg.angular_order < 4)
        throw std::invalid_argument("projection rule orders too small");
    std::vector<double> nodes, weights;
    gauss_legendre_01(cfg.radial_order, nodes, weights);
    const double wt = 2.0 * kPi / double(cfg.angular_order);

    std::vector<Complex> inner(static_cast<std::size_t>(max_mode) + 1, Complex(0.0, 0.0));
    for (int ir = 0; ir < cfg.radial_order; ++ir) {
        double r = nodes[std::size_t(ir)];
        double wr = weights[std::size_t(ir)] * r * wt;
        for (int it = 0; it < cfg.angular_order; ++it) {
            double th = 2.0 * kPi * double(it) / double(cfg.angular_order);
            double pt[2] = {r * std::cos(th), r * std::sin(th)};
            Complex fv = f(Point(pt, 2));
            Complex zbar(pt[0], -pt[1]);
            Complex pw(1.0, 0.0);
            for (int m = 0; m <= max_mode; ++m) {
                inner[std::size_t(m)] += fv * pw * wr;
                pw *= zbar;
            }
        }
    }
    std::vector<Complex> coeffs(inner.size());
    for (int m = 0; m <= max_mode; ++m)
        coeffs[std::size_t(m)] = inner[std::size_t(m)] * (double(m + 1) / kPi);
    return coeffs;
}

double sobolev_norm(const std::vector<Complex>& coeffs, int k2) {
    if (k2 < 0 || k2 > 2)
        throw std::invalid_argument("sobolev_norm supports orders 0..2 only");
    double total = 0.0;
    for (int j = 0; j <= k2; ++j) {
        double level = 0.0;
        for (std::size_t m = std::size_t(j); m < coeffs.size(); ++m) {
            double fall = 1.0;  // m!/(m-j)!
            for (std::size_t t = 0; t < std::size_t(j); ++t) fall *= double(m - t);
            double a2 = std::norm(coeffs[m]);
            level += a2 * fall * fall * kPi / double(m - std::size_t(j) + 1);
        }
        total += double(j + 1) * level;
    }
    return std::sqrt(total);
}

double weighted_negative_norm(const std::function<Complex(Point)>& mu, int k,
                              const DomainModel& disc, const QuadratureConfig& cfg) {
    if (k < 0) throw std::invalid_argument("weight order must be >= 0");
    if (disc.complex_dim != 1)
        throw std::invalid_argument("weighted norm is implemented on the disc only");
    CompiledField dk(k == 0 ? Field::constant(1.0)
                            : Field::power(disc.delta, 2 * k).simplified());
    auto integrand = [&](Point p) {
        double w = dk.eval(p).real();
        return Complex(std::norm(mu(p)) * w, 0.0);
    };
    IntegralResult r = integrate_disc(integrand, cfg);
    return std::sqrt(std::max(0.0, r.value.real()));
}

SmoothingReport smoothing_check(const std::string& g_id, int k, int k2, int j_max,
                                const DomainModel& disc, const QuadratureConfig& cfg,
                                const ProjectionConfig& proj) {
    if (j_max < 0) throw std::invalid_argument("j_max must be >= 0");
    auto g = bergman_multiplier(g_id);
    SmoothingReport rep;
    rep.g_id = g_id;
    rep.k = k;
    rep.k2 = k2;
    rep.j_max = j_max;
    const int max_mode = 32;
    for (int j = 0; j <= j_max; ++j) {
        auto mu = [j](Point p) { return std::pow(Complex(p[0], -p[1]), j); };
        auto fj = [&](Point p) { return mu(p) * g(p); };
        auto coeffs = project(fj, max_mode, proj);
        SmoothingRow row;
        row.j = j;
        row.projected_norm = sobolev_norm(coeffs, k2);
        row.weighted_norm = weighted_negative_norm(mu, k, disc, cfg);
        row.ratio = row.weighted_norm > 0.0 ? row.projected_norm / row.weighted_norm : 0.0;
        rep.rows.push_back(row);
        double& bucket = j <= 10 ? rep.max_ratio_low : rep.max_ratio_high;
        if (row.ratio > bucket) bucket = row.ratio;
        if (j == 10 && row.ratio > rep.max_ratio_high) rep.max_ratio_high = row.ratio;
    }
    rep.bounded = rep.max_ratio_high <= 2.0 * rep.max_ratio_low;
    return rep;
}

}  // namespace hw
