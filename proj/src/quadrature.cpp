#include "holoweight/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace hw {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Rule {
    std::vector<double> x, w;  // on [0,1]
};

const Rule& cached_rule(int order) {
    static std::mutex mu;
    static std::map<int, Rule> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(order);
    if (it != cache.end()) return it->second;

    Rule r;
    r.x.resize(static_cast<std::size_t>(order));
    r.w.resize(static_cast<std::size_t>(order));
    for (int k = 0; k < order; ++k) {
        // Newton on P_n over [-1,1], then map to [0,1].
        double x = std::cos(kPi * (k + 0.75) / (order + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int j = 2; j <= order; ++j) {
                double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            dp = order * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        double w = 2.0 / ((1.0 - x * x) * dp * dp);
        r.x[static_cast<std::size_t>(order - 1 - k)] = 0.5 * (x + 1.0);
        r.w[static_cast<std::size_t>(order - 1 - k)] = 0.5 * w;
    }
    return cache.emplace(order, std::move(r)).first->second;
}

void validate(const QuadratureConfig& cfg, int ambient_dim) {
    if (!(cfg.rel_tol > 0.0) || !(cfg.abs_tol > 0.0))
        throw std::invalid_argument("quadrature tolerances must be positive");
    if (cfg.base_rule < 2 || cfg.base_rule > 64)
        throw std::invalid_argument("quadrature base_rule must be in 2..64");
    if (cfg.max_subdivisions < 0)
        throw std::invalid_argument("quadrature max_subdivisions must be >= 0");
    for (const auto& p : cfg.singular_points)
        if (static_cast<int>(p.size()) != ambient_dim)
            throw std::invalid_argument("singular point hint has wrong dimension");
}

// ---------------------------------------------------------------------------
// Disc (polar cells)
// ---------------------------------------------------------------------------

struct DiscCell {
    double r0, r1, t0, t1;
    Complex val{0.0, 0.0};
    double err = 0.0;
    bool alive = true;
};

Complex polar_rule(const Integrand& f, const DiscCell& c, const Rule& rr, const Rule& rt) {
    const double dr = c.r1 - c.r0, dt = c.t1 - c.t0;
    Complex acc(0.0, 0.0);
    double pt[2];
    for (std::size_t i = 0; i < rr.x.size(); ++i) {
        const double r = c.r0 + dr * rr.x[i];
        const double wr = rr.w[i] * r;
        Complex row(0.0, 0.0);
        for (std::size_t j = 0; j < rt.x.size(); ++j) {
            const double th = c.t0 + dt * rt.x[j];
            pt[0] = r * std::cos(th);
            pt[1] = r * std::sin(th);
            row += rt.w[j] * f(Point(pt, 2));
        }
        acc += wr * row;
    }
    return acc * (dr * dt);
}

void eval_disc_cell(const Integrand& f, DiscCell& c, const Rule& hi_r, const Rule& hi_t,
                    const Rule& lo_r, const Rule& lo_t) {
    Complex a = polar_rule(f, c, hi_r, hi_t);
    Complex b = polar_rule(f, c, lo_r, lo_t);
    c.val = a;
    c.err = std::abs(a - b);
}

// ---------------------------------------------------------------------------
// Ball (hyperspherical cells, radially adaptive)
// ---------------------------------------------------------------------------

struct BallCell {
    double r0, r1;
    Complex val{0.0, 0.0};
    double err = 0.0;
    bool alive = true;
};

Complex ball_rule(const Integrand& f, const BallCell& c, const Rule& rr, const Rule& ra) {
    const double dr = c.r1 - c.r0;
    Complex acc(0.0, 0.0);
    double pt[4];
    for (std::size_t i = 0; i < rr.x.size(); ++i) {
        const double rho = c.r0 + dr * rr.x[i];
        const double wr = rr.w[i] * rho * rho * rho;
        Complex acc1(0.0, 0.0);
        for (std::size_t a = 0; a < ra.x.size(); ++a) {
            const double p1 = kPi * ra.x[a];
            const double s1 = std::sin(p1), c1 = std::cos(p1);
            const double w1 = ra.w[a] * s1 * s1;
            Complex acc2(0.0, 0.0);
            for (std::size_t b = 0; b < ra.x.size(); ++b) {
                const double p2 = kPi * ra.x[b];
                const double s2 = std::sin(p2), c2 = std::cos(p2);
                const double w2 = ra.w[b] * s2;
                Complex acc3(0.0, 0.0);
                for (std::size_t g = 0; g < ra.x.size(); ++g) {
                    const double p3 = 2.0 * kPi * ra.x[g];
                    pt[0] = rho * c1;
                    pt[1] = rho * s1 * c2;
                    pt[2] = rho * s1 * s2 * std::cos(p3);
                    pt[3] = rho * s1 * s2 * std::sin(p3);
                    acc3 += ra.w[g] * f(Point(pt, 4));
                }
                acc2 += w2 * acc3;
            }
            acc1 += w1 * acc2;
        }
        acc += wr * acc1;
    }
    // angular box measure: pi * pi * 2pi
    return acc * (dr * kPi * kPi * 2.0 * kPi);
}

void eval_ball_cell(const Integrand& f, BallCell& c, const Rule& hi_r, const Rule& hi_a,
                    const Rule& lo_r) {
    // Coarsen only the radial rule for the error estimate: cells split
    // radially, so an angular-rule disagreement would never shrink and the
    // refinement loop would stall on it.
    Complex a = ball_rule(f, c, hi_r, hi_a);
    Complex b = ball_rule(f, c, lo_r, hi_a);
    c.val = a;
    c.err = std::abs(a - b);
}

std::vector<double> radial_grid(const QuadratureConfig& cfg, double rmax) {
    std::vector<double> rs{0.0, rmax};
    for (double b : cfg.radial_breaks)
        if (b > 1e-12 && b < rmax - 1e-12) rs.push_back(b);
    std::sort(rs.begin(), rs.end());
    rs.erase(std::unique(rs.begin(), rs.end(),
                         [](double a, double b) { return std::abs(a - b) < 1e-12; }),
             rs.end());
    return rs;
}

template <class Cell, class EvalFn>
void eval_batch(std::vector<Cell>& cells, std::size_t from, const EvalFn& ev, int threads) {
    const std::size_t n = cells.size() - from;
    if (threads <= 1 || n < 2) {
        for (std::size_t i = from; i < cells.size(); ++i) ev(cells[i]);
        return;
    }
    const std::size_t nt = std::min<std::size_t>(static_cast<std::size_t>(threads), n);
    std::vector<std::thread> pool;
    pool.reserve(nt);
    for (std::size_t t = 0; t < nt; ++t) {
        pool.emplace_back([&, t]() {
            for (std::size_t i = from + t; i < cells.size(); i += nt) ev(cells[i]);
        });
    }
    for (auto& th : pool) th.join();
}

// Shared driver: evaluates initial cells, then repeatedly splits the worst
// cell until the summed error estimate meets the tolerance. All reductions
// run in cell-creation order, so results are bit-identical for any thread
// count.
template <class Cell, class EvalFn, class SplitFn>
IntegralResult drive(std::vector<Cell>& cells, const EvalFn& ev, const SplitFn& split,
                     const QuadratureConfig& cfg, long long evals_per_cell) {
    IntegralResult res;
    eval_batch(cells, 0, ev, cfg.threads);

    auto recompute = [&]() {
        Complex total(0.0, 0.0);
        double err = 0.0;
        for (const auto& c : cells)
            if (c.alive) {
                total += c.val;
                err += c.err;
            }
        return std::make_pair(total, err);
    };

    auto [total, err] = recompute();
    int splits = 0;
    while (err > std::max(cfg.abs_tol, cfg.rel_tol * std::abs(total))) {
        if (splits >= cfg.max_subdivisions) {
            res.converged = false;
            break;
        }
        std::size_t worst = cells.size();
        double werr = -1.0;
        for (std::size_t i = 0; i < cells.size(); ++i)
            if (cells[i].alive && cells[i].err > werr) {
                werr = cells[i].err;
                worst = i;
            }
        if (worst == cells.size() || werr <= 0.0) break;
        // Copy before splitting: push_back may reallocate the cell storage.
        Cell parent = cells[worst];
        parent.alive = false;
        cells[worst] = parent;
        std::size_t first_child = cells.size();
        split(parent, cells);
        eval_batch(cells, first_child, ev, 1);
        ++splits;
        std::tie(total, err) = recompute();
    }

    res.value = total;
    res.error_estimate = err;
    for (const auto& c : cells)
        if (c.alive) ++res.cells;
    res.evaluations = static_cast<long long>(cells.size()) * evals_per_cell;
    return res;
}

IntegralResult integrate_polar(const Integrand& f, const QuadratureConfig& cfg, double rmax) {
    validate(cfg, 2);
    const int hi = cfg.base_rule, lo = std::max(2, cfg.base_rule / 2);
    const Rule &hi_rule = cached_rule(hi), &lo_rule = cached_rule(lo);

    std::vector<double> rs = radial_grid(cfg, rmax);
    std::vector<double> ts;
    const int nt = 8;
    for (int i = 0; i <= nt; ++i) ts.push_back(2.0 * kPi * i / nt);
    for (const auto& sp : cfg.singular_points) {
        double th = std::atan2(sp[1], sp[0]);
        if (th < 0.0) th += 2.0 * kPi;
        ts.push_back(th);
        if (th == 0.0) ts.push_back(2.0 * kPi);
    }
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end(),
                         [](double a, double b) { return std::abs(a - b) < 1e-12; }),
             ts.end());

    std::vector<DiscCell> cells;
    for (std::size_t i = 0; i + 1 < rs.size(); ++i)
        for (std::size_t j = 0; j + 1 < ts.size(); ++j)
            cells.push_back({rs[i], rs[i + 1], ts[j], ts[j + 1]});

    auto ev = [&](DiscCell& c) { eval_disc_cell(f, c, hi_rule, hi_rule, lo_rule, lo_rule); };
    long long probe_evals = 0;
    auto split = [&](const DiscCell& c, std::vector<DiscCell>& out) {
        const double rm = 0.5 * (c.r0 + c.r1), tm = 0.5 * (c.t0 + c.t1);
        bool do_r = true, do_t = true;
        if (c.r1 - c.r0 <= 1e-9) {
            do_r = false;
        } else if (c.t1 - c.t0 <= 1e-9) {
            do_t = false;
        } else {
            // Probe each direction with a rule that is coarse only there, and
            // halve just the rough one. Radial boundary layers then refine in
            // a column of cells instead of an ever-finer angular fan.
            double er = std::abs(c.val - polar_rule(f, c, lo_rule, hi_rule));
            double et = std::abs(c.val - polar_rule(f, c, hi_rule, lo_rule));
            probe_evals += 2ll * hi * lo;
            if (er > 4.0 * et)
                do_t = false;
            else if (et > 4.0 * er)
                do_r = false;
        }
        if (do_r && do_t) {
            out.push_back({c.r0, rm, c.t0, tm});
            out.push_back({c.r0, rm, tm, c.t1});
            out.push_back({rm, c.r1, c.t0, tm});
            out.push_back({rm, c.r1, tm, c.t1});
        } else if (do_r) {
            out.push_back({c.r0, rm, c.t0, c.t1});
            out.push_back({rm, c.r1, c.t0, c.t1});
        } else {
            out.push_back({c.r0, c.r1, c.t0, tm});
            out.push_back({c.r0, c.r1, tm, c.t1});
        }
    };
    IntegralResult res = drive(cells, ev, split, cfg, static_cast<long long>(hi) * hi + lo * lo);
    res.evaluations += probe_evals;
    return res;
}

IntegralResult integrate_hyperspherical(const Integrand& f, const QuadratureConfig& cfg,
                                        double rmax) {
    validate(cfg, 4);
    const int hir = std::min(cfg.base_rule, 16), lor = std::max(2, hir / 2);
    const int hia = cfg.ball_angular_rule;
    const Rule &hi_r = cached_rule(hir), &lo_r = cached_rule(lor);
    const Rule& hi_a = cached_rule(hia);

    std::vector<double> rs = radial_grid(cfg, rmax);
    std::vector<BallCell> cells;
    for (std::size_t i = 0; i + 1 < rs.size(); ++i) cells.push_back({rs[i], rs[i + 1]});

    auto ev = [&](BallCell& c) { eval_ball_cell(f, c, hi_r, hi_a, lo_r); };
    auto split = [](const BallCell& c, std::vector<BallCell>& out) {
        const double rm = 0.5 * (c.r0 + c.r1);
        out.push_back({c.r0, rm});
        out.push_back({rm, c.r1});
    };
    const long long epc = static_cast<long long>(hir + lor) * hia * hia * hia;
    return drive(cells, ev, split, cfg, epc);
}

}  // namespace

IntegralResult integrate_disc(const Integrand& f, const QuadratureConfig& cfg) {
    return integrate_polar(f, cfg, 1.0);
}

IntegralResult integrate_ball(const Integrand& f, const QuadratureConfig& cfg) {
    return integrate_hyperspherical(f, cfg, 1.0);
}

IntegralResult integrate_domain(const DomainModel& domain, const Integrand& f,
                                const QuadratureConfig& cfg) {
    return domain.ambient_dim == 2 ? integrate_disc(f, cfg) : integrate_ball(f, cfg);
}

IntegralResult integrate_epsilon_shell(const DomainModel& domain, const Integrand& f, double eps,
                                       const QuadratureConfig& cfg) {
    if (!(eps >= 0.0) || eps > 0.5)
        throw std::invalid_argument(
            "epsilon shell requires 0 <= eps <= 1/2 (delta = 1-|x| only holds there)");
    const double rmax = 1.0 - eps;
    return domain.ambient_dim == 2 ? integrate_polar(f, cfg, rmax)
                                   : integrate_hyperspherical(f, cfg, rmax);
}

Complex oracle_monomial_moment(int m, int p, double a) {
    if (m < 0 || p < 0) throw std::invalid_argument("monomial moment requires m, p >= 0");
    if (m != p) return Complex(0.0, 0.0);
    const double expo = 2.0 * m + 2.0 * a + 2.0;
    if (!(expo > 0.0))
        throw std::invalid_argument("monomial moment diverges: need 2m + 2a + 2 > 0");
    return Complex(2.0 * kPi / expo, 0.0);
}

void gauss_legendre_01(int order, std::vector<double>& nodes, std::vector<double>& weights) {
    if (order < 1 || order > 128) throw std::invalid_argument("gauss rule order must be in 1..128");
    const Rule& r = cached_rule(order);
    nodes = r.x;
    weights = r.w;
}

}  // namespace hw
