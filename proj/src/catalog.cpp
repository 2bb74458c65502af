#include "holoweight/catalog.hpp"

#include <charconv>
#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "holoweight/expr.hpp"

namespace hw {
namespace {

Complex point_z(Point p) { return Complex(p[0], p[1]); }

std::string shortest_double(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

HoloTestFunction make_const_fn(int complex_dim) {
    HoloTestFunction f;
    f.id = "const";
    f.complex_dim = complex_dim;
    f.eval = [](Point) { return Complex(1.0, 0.0); };
    f.eval_z = [](Complex) { return Complex(1.0, 0.0); };
    f.deriv_z = [](Complex) { return Complex(0.0, 0.0); };
    f.taylor = [](int m) { return m == 0 ? Complex(1.0, 0.0) : Complex(0.0, 0.0); };
    f.has_taylor = true;
    f.has_deriv = true;
    return f;
}

HoloTestFunction make_pow_fn(int m) {
    HoloTestFunction f;
    f.id = "pow:" + std::to_string(m);
    f.eval = [m](Point p) { return std::pow(point_z(p), m); };
    f.eval_z = [m](Complex z) { return std::pow(z, m); };
    f.deriv_z = [m](Complex z) { return double(m) * std::pow(z, m - 1); };
    f.taylor = [m](int q) { return q == m ? Complex(1.0, 0.0) : Complex(0.0, 0.0); };
    f.has_taylor = true;
    f.has_deriv = true;
    return f;
}

HoloTestFunction make_rat2_fn() {
    HoloTestFunction f;
    f.id = "rat2";
    f.eval = [](Point p) { return 1.0 / (point_z(p) - 2.0); };
    f.eval_z = [](Complex z) { return 1.0 / (z - 2.0); };
    f.deriv_z = [](Complex z) {
        Complex w = z - 2.0;
        return -1.0 / (w * w);
    };
    // 1/(z-2) = -(1/2) * 1/(1 - z/2) = -sum_m z^m / 2^(m+1)
    f.taylor = [](int m) { return Complex(-std::ldexp(1.0, -(m + 1)), 0.0); };
    f.has_taylor = true;
    f.has_deriv = true;
    return f;
}

HoloTestFunction make_exp_fn() {
    HoloTestFunction f;
    f.id = "exp";
    f.eval = [](Point p) { return std::exp(point_z(p)); };
    f.eval_z = [](Complex z) { return std::exp(z); };
    f.deriv_z = [](Complex z) { return std::exp(z); };
    f.taylor = [](int m) {
        double c = 1.0;
        for (int j = 2; j <= m; ++j) c /= double(j);
        return Complex(c, 0.0);
    };
    f.has_taylor = true;
    f.has_deriv = true;
    return f;
}

HoloTestFunction make_sing_fn(double a) {
    if (!(a > 0.0 && a < 2.0))
        throw std::invalid_argument("sing exponent must lie in (0, 2), got " + std::to_string(a));
    HoloTestFunction f;
    f.id = "sing:" + shortest_double(a);
    f.eval = [a](Point p) { return std::pow(1.0 - point_z(p), -a); };
    f.eval_z = [a](Complex z) { return std::pow(1.0 - z, -a); };
    f.deriv_z = [a](Complex z) { return a * std::pow(1.0 - z, -a - 1.0); };
    // (1-z)^(-a) = sum_m binom(a+m-1, m) z^m, coefficients via the ratio
    // a_{m+1} = a_m (a+m)/(m+1).
    f.taylor = [a](int m) {
        double c = 1.0;
        for (int j = 0; j < m; ++j) c *= (a + double(j)) / double(j + 1);
        return Complex(c, 0.0);
    };
    f.has_taylor = true;
    f.has_deriv = true;
    f.l1_member = a < 2.0;
    f.l2_member = a < 1.0;
    f.singularities = {{1.0, 0.0}};
    return f;
}

HoloTestFunction make_ball_mono_fn(int m, int p) {
    HoloTestFunction f;
    f.id = "mono:" + std::to_string(m) + "," + std::to_string(p);
    f.complex_dim = 2;
    f.eval = [m, p](Point pt) {
        Complex z1(pt[0], pt[1]);
        Complex z2(pt[2], pt[3]);
        return std::pow(z1, m) * std::pow(z2, p);
    };
    return f;
}

double parse_number(const std::string& text, const std::string& id) {
    try {
        std::size_t used = 0;
        double v = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("bad numeric suffix in test function id '" + id + "'");
    }
}

int parse_int(const std::string& text, const std::string& id) {
    try {
        std::size_t used = 0;
        int v = std::stoi(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("bad integer suffix in id '" + id + "'");
    }
}

}  // namespace

std::vector<std::string> catalog_ids(const DomainModel& domain) {
    if (domain.complex_dim == 1) {
        std::vector<std::string> ids = {"const"};
        for (int m = 1; m <= 6; ++m) ids.push_back("pow:" + std::to_string(m));
        ids.push_back("rat2");
        ids.push_back("exp");
        ids.push_back("sing:0.5");
        ids.push_back("sing:1.5");
        ids.push_back("sing:1.9");
        return ids;
    }
    std::vector<std::string> ids = {"const"};
    for (int total = 1; total <= 3; ++total)
        for (int m = total; m >= 0; --m)
            ids.push_back("mono:" + std::to_string(m) + "," + std::to_string(total - m));
    return ids;
}

HoloTestFunction find_eta(const DomainModel& domain, const std::string& id) {
    if (domain.complex_dim == 1) {
        if (id == "const") return make_const_fn(1);
        if (id == "rat2") return make_rat2_fn();
        if (id == "exp") return make_exp_fn();
        if (id.rfind("pow:", 0) == 0) {
            int m = parse_int(id.substr(4), id);
            if (m < 1 || m > 12) throw std::invalid_argument("pow exponent out of range in '" + id + "'");
            return make_pow_fn(m);
        }
        if (id.rfind("sing:", 0) == 0) return make_sing_fn(parse_number(id.substr(5), id));
        throw std::invalid_argument("unknown disc test function '" + id + "'");
    }
    if (id == "const") return make_const_fn(2);
    if (id.rfind("mono:", 0) == 0) {
        std::string rest = id.substr(5);
        auto comma = rest.find(',');
        if (comma == std::string::npos)
            throw std::invalid_argument("ball monomial id needs 'mono:m,p', got '" + id + "'");
        int m = parse_int(rest.substr(0, comma), id);
        int p = parse_int(rest.substr(comma + 1), id);
        if (m < 0 || p < 0 || m + p > 6)
            throw std::invalid_argument("ball monomial degree out of range in '" + id + "'");
        return make_ball_mono_fn(m, p);
    }
    throw std::invalid_argument("unknown ball test function '" + id + "'");
}

std::vector<HoloTestFunction> catalog(const DomainModel& domain) {
    std::vector<HoloTestFunction> out;
    for (const auto& id : catalog_ids(domain)) out.push_back(find_eta(domain, id));
    return out;
}

std::vector<std::string> multiplier_ids(const DomainModel& domain) {
    if (domain.complex_dim == 1) return {"one", "conj_pow:1", "conj_pow:2", "conj_pow:3", "exp_x1"};
    return {"one", "exp_x1"};
}

Multiplier make_multiplier(const DomainModel& domain, const std::string& id) {
    if (id == "one") return {id, Field::constant(1.0)};
    if (id == "exp_x1") return {id, Field::exp(Field::coordinate(1))};
    if (id.rfind("conj_pow:", 0) == 0) {
        if (domain.complex_dim != 1)
            throw std::invalid_argument("conjugate powers are only defined on the disc");
        int p = parse_int(id.substr(9), id);
        if (p < 1 || p > 8) throw std::invalid_argument("conj_pow exponent out of range in '" + id + "'");
        Field zbar = Field::coordinate(1) + Field::scale(Complex(0.0, -1.0), Field::coordinate(2));
        Field g = p == 1 ? zbar : Field::power(zbar, p);
        return {id, g.simplified()};
    }
    throw std::invalid_argument("unknown multiplier '" + id + "'");
}

std::optional<Complex> reference_integral(const HoloTestFunction& eta, const std::string& g_id,
                                          const DomainModel& domain) {
    if (g_id == "one") {
        std::vector<double> origin(static_cast<std::size_t>(domain.ambient_dim), 0.0);
        return domain.volume * eta.eval(origin);
    }
    if (g_id.rfind("conj_pow:", 0) == 0 && domain.complex_dim == 1 && eta.has_taylor) {
        int p = parse_int(g_id.substr(9), g_id);
        // int_disc eta(z) conj(z)^p dA = pi/(p+1) * a_p by orthogonality of the
        // angular modes on circles.
        const double pi = 3.14159265358979323846;
        return pi / double(p + 1) * eta.taylor(p);
    }
    return std::nullopt;
}

HolomorphyCheck holomorphy_relation_check(const HoloTestFunction& eta, const DomainModel& domain,
                                          int samples, std::uint64_t seed) {
    if (domain.complex_dim != 1)
        throw std::invalid_argument("holomorphy residual check is implemented for the disc only");
    if (!eta.has_deriv)
        throw std::invalid_argument("test function '" + eta.id + "' has no closed-form derivative");
    auto points = sample_collar(domain, samples, seed);
    CompiledField g1(domain.delta_grad[0]);
    CompiledField g2(domain.delta_grad[1]);
    HolomorphyCheck out;
    out.samples = samples;
    for (const auto& pt : points) {
        Complex z = point_z(pt);
        Complex dz = eta.deriv_z(z);
        double d1 = g1.eval(pt).real();
        double d2 = g2.eval(pt).real();
        Complex normal = (Complex(d1, 0.0) + Complex(0.0, d2)) * dz;
        Complex tangential = (Complex(d2, 0.0) - Complex(0.0, d1)) * dz;
        double resid = std::abs(normal - Complex(0.0, 1.0) * tangential);
        if (resid > out.max_residual) out.max_residual = resid;
    }
    return out;
}

}  // namespace hw
