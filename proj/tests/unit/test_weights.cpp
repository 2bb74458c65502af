#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "holoweight/catalog.hpp"
#include "holoweight/geometry.hpp"
#include "holoweight/weights.hpp"

using namespace hw;

namespace {

struct Fixture {
    DomainModel disc = make_disc_domain();
    CutoffProfile cut = make_cutoff(disc);
    Field one = Field::constant(1.0);
};

Complex weval(const Field& f, std::initializer_list<double> pt) {
    std::vector<double> v(pt);
    return f.eval(Point(v.data(), v.size()));
}

}  // namespace

TEST_CASE("first-order weight: closed-form values inside and deep in the collar") {
    Fixture fx;
    auto prog = inductive_weight(1, fx.one, "one", fx.disc, fx.cut, WeightVariant::Corrected);
    CHECK(prog.steps.size() == 1);
    CHECK(prog.omega == prog.steps.back());
    // interior: cutoff is identically zero, weight is 1/delta = 4/3 at the origin
    CHECK(std::abs(weval(prog.omega, {0.0, 0.0}) - Complex(4.0 / 3.0, 0.0)) <= 1e-14);
    // below the inner junction: cutoff is one, weight is -lap(delta) = 1/r
    CHECK(std::abs(weval(prog.omega, {0.97, 0.0}) - Complex(1.0 / 0.97, 0.0)) <= 1e-12);
    CHECK(std::abs(weval(prog.omega, {0.0, -0.96}) - Complex(1.0 / 0.96, 0.0)) <= 1e-12);
}

TEST_CASE("second-order weight: interior closed forms separate the variants") {
    Fixture fx;
    auto cor = inductive_weight(2, fx.one, "one", fx.disc, fx.cut, WeightVariant::Corrected);
    auto bare = inductive_weight(2, fx.one, "one", fx.disc, fx.cut, WeightVariant::BareLaplacian);
    // interior, cutoff = 0: corrected collapses to 1/delta^2
    CHECK(std::abs(weval(cor.omega, {0.0, 0.0}) - Complex(16.0 / 9.0, 0.0)) <= 1e-13);
    // bare keeps the uncut laplacian term: 1/delta^2 - lap(delta)/(2 delta)
    CHECK(std::abs(weval(bare.omega, {0.0, 0.0}) - Complex(40.0 / 9.0, 0.0)) <= 1e-13);
    // both agree below the inner junction where the cutoff is exactly one
    for (double x : {0.96, 0.97, 0.98}) {
        Complex a = weval(cor.omega, {x, 0.0});
        Complex b = weval(bare.omega, {x, 0.0});
        CHECK(std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a)));
    }
}

TEST_CASE("order one is variant-independent by construction") {
    Fixture fx;
    auto a = inductive_weight(1, fx.one, "one", fx.disc, fx.cut, WeightVariant::Corrected);
    auto b = inductive_weight(1, fx.one, "one", fx.disc, fx.cut, WeightVariant::BareLaplacian);
    CHECK(a.omega == b.omega);  // interned: same DAG node
}

TEST_CASE("disc second-order weight vanishes identically in the flat collar band") {
    // In 2d the operator omega -> N(omega) + lap(delta) omega annihilates c/r,
    // so the g = one recursion degenerates below the inner junction.
    Fixture fx;
    auto prog = inductive_weight(2, fx.one, "one", fx.disc, fx.cut, WeightVariant::Corrected);
    for (double x : {0.955, 0.97, 0.99})
        CHECK(std::abs(weval(prog.omega, {x, 0.0})) <= 1e-12);
}

TEST_CASE("ball second-order weight follows 3/r^2 in the flat collar band") {
    auto ball = make_ball_domain();
    auto cut = make_cutoff(ball);
    auto prog =
        inductive_weight(2, Field::constant(1.0), "one", ball, cut, WeightVariant::Corrected);
    for (double x : {0.96, 0.98}) {
        Complex v = weval(prog.omega, {x, 0.0, 0.0, 0.0});
        CHECK(std::abs(v - Complex(3.0 / (x * x), 0.0)) <= 1e-11);
    }
}

TEST_CASE("weight construction is linear in the multiplier") {
    Fixture fx;
    auto g1 = make_multiplier(fx.disc, "conj_pow:1").expr;
    auto g2 = make_multiplier(fx.disc, "exp_x1").expr;
    auto w1 = inductive_weight(2, g1, "a", fx.disc, fx.cut, WeightVariant::Corrected);
    auto w2 = inductive_weight(2, g2, "b", fx.disc, fx.cut, WeightVariant::Corrected);
    auto ws = inductive_weight(2, (g1 + g2).simplified(), "a+b", fx.disc, fx.cut,
                               WeightVariant::Corrected);
    for (auto pt : std::vector<std::vector<double>>{{0.0, 0.0}, {0.5, 0.3}, {0.88, 0.1},
                                                    {0.0, 0.93}, {-0.97, 0.01}}) {
        Complex lhs = ws.omega.eval(Point(pt.data(), 2));
        Complex rhs = w1.omega.eval(Point(pt.data(), 2)) + w2.omega.eval(Point(pt.data(), 2));
        CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(rhs)));
    }
}

TEST_CASE("zero multiplier gives the zero weight") {
    Fixture fx;
    auto prog = inductive_weight(3, Field::constant(0.0), "zero", fx.disc, fx.cut,
                                 WeightVariant::Corrected);
    for (auto pt : std::vector<std::vector<double>>{{0.0, 0.0}, {0.9, 0.1}, {0.97, 0.0}})
        CHECK(prog.omega.eval(Point(pt.data(), 2)) == Complex(0.0, 0.0));
}

TEST_CASE("every stored step reproduces from its predecessor") {
    Fixture fx;
    auto g = make_multiplier(fx.disc, "conj_pow:2").expr;
    auto prog = inductive_weight(3, g, "conj_pow:2", fx.disc, fx.cut, WeightVariant::Corrected);
    CHECK(prog.steps.size() == 3);
    CHECK(structural_recursion_holds(prog));
    CHECK(prog.steps[0] == base_weight(g, fx.disc, fx.cut));
    CHECK(prog.steps[1] ==
          induction_step(prog.steps[0], 1, fx.disc, fx.cut, WeightVariant::Corrected));

    WeightProgram tampered = prog;
    tampered.steps[1] = prog.steps[1] + Field::constant(1e-30);
    CHECK_FALSE(structural_recursion_holds(tampered));
}

TEST_CASE("delta is divided only through the guarded quotient") {
    Fixture fx;
    for (int k : {1, 2, 3}) {
        auto prog = inductive_weight(k, fx.one, "one", fx.disc, fx.cut, WeightVariant::Corrected);
        CHECK_FALSE(contains_bare_delta_reciprocal(prog.omega, fx.disc));
    }
    Field bad = Field::recip(fx.disc.delta) * Field::constant(2.0);
    CHECK(contains_bare_delta_reciprocal(bad, fx.disc));
}

TEST_CASE("sharing keeps the weight DAG far below its tree expansion") {
    Fixture fx;
    auto prog = inductive_weight(3, fx.one, "one", fx.disc, fx.cut, WeightVariant::Corrected);
    CHECK(prog.dag_sizes.size() == 3);
    CHECK(prog.dag_sizes[2] > prog.dag_sizes[1]);
    CHECK(static_cast<double>(prog.omega.dag_size()) < 0.01 * prog.omega.tree_size());
}

TEST_CASE("argument validation") {
    Fixture fx;
    CHECK_THROWS_AS(
        (void)inductive_weight(0, fx.one, "one", fx.disc, fx.cut, WeightVariant::Corrected),
        std::invalid_argument);
    CHECK_THROWS_AS((void)induction_step(fx.one, 0, fx.disc, fx.cut, WeightVariant::Corrected),
                    std::invalid_argument);
    CHECK(parse_variant("corrected") == WeightVariant::Corrected);
    CHECK(parse_variant("bare_laplacian") == WeightVariant::BareLaplacian);
    CHECK(parse_variant("bare-laplacian") == WeightVariant::BareLaplacian);
    CHECK_THROWS_AS((void)parse_variant("literal"), std::invalid_argument);
    CHECK(variant_name(WeightVariant::Corrected) == "corrected");
    CHECK(variant_name(WeightVariant::BareLaplacian) == "bare_laplacian");
}

TEST_CASE("normal-ray profile slopes recover the vanishing order") {
    Fixture fx;
    std::vector<double> scales{0.04, 0.02, 0.01, 0.005, 0.0025};

    auto p1 = inductive_weight(1, fx.one, "one", fx.disc, fx.cut, WeightVariant::Corrected);
    auto prof1 = vanishing_profile(p1, scales);
    CHECK(prof1.k == 1);
    CHECK(prof1.rays.size() == 8);
    for (const auto& ray : prof1.rays) {
        REQUIRE_FALSE(ray.degenerate);
        CHECK(std::abs(ray.slopes[0] - 1.0) <= 0.1);
    }

    auto ball = make_ball_domain();
    auto bcut = make_cutoff(ball);
    auto p2 = inductive_weight(2, Field::constant(1.0), "one", ball, bcut,
                               WeightVariant::Corrected);
    auto prof2 = vanishing_profile(p2, scales);
    for (const auto& ray : prof2.rays) {
        REQUIRE_FALSE(ray.degenerate);
        CHECK(std::abs(ray.slopes[0] - 2.0) <= 0.1);
        CHECK(ray.magnitudes.size() == 2);  // value and first normal derivative
    }

    // disc k = 2 with g = one: degenerate band, flagged instead of sloped
    auto p2d = inductive_weight(2, fx.one, "one", fx.disc, fx.cut, WeightVariant::Corrected);
    auto prof2d = vanishing_profile(p2d, scales);
    for (const auto& ray : prof2d.rays) CHECK(ray.degenerate);
}

TEST_CASE("profile scales must sit inside the flat collar band") {
    Fixture fx;
    auto p1 = inductive_weight(1, fx.one, "one", fx.disc, fx.cut, WeightVariant::Corrected);
    CHECK_THROWS_AS((void)vanishing_profile(p1, {0.2}), std::invalid_argument);
    CHECK_THROWS_AS((void)vanishing_profile(p1, {0.0}), std::invalid_argument);
    CHECK_THROWS_AS((void)vanishing_profile(p1, std::vector<double>{}), std::invalid_argument);
}

TEST_CASE("collar sup stays modest at default parameters") {
    Fixture fx;
    for (int k : {1, 2, 3}) {
        auto prog = inductive_weight(k, fx.one, "one", fx.disc, fx.cut, WeightVariant::Corrected);
        double sup = collar_sup(prog, 500, 7);
        CHECK(sup < 1e6);
        CHECK(sup > 0.0);
        CHECK(collar_sup(prog, 500, 7) == sup);  // deterministic
    }
}

TEST_CASE("moving the collar moves the flat band with it") {
    auto narrow = make_disc_domain(0.02, 0.1);
    auto cut = make_cutoff(narrow);
    auto prog =
        inductive_weight(1, Field::constant(1.0), "one", narrow, cut, WeightVariant::Corrected);
    // delta(0.99, 0) = 0.01 < 0.02: flat band of the narrow collar
    CHECK(std::abs(weval(prog.omega, {0.99, 0.0}) - Complex(1.0 / 0.99, 0.0)) <= 1e-11);
    // delta(0.97, 0) = 0.03 now lies inside the transition: no longer 1/r
    Complex v = weval(prog.omega, {0.97, 0.0});
    CHECK(std::abs(v - Complex(1.0 / 0.97, 0.0)) > 1e-3);
    CHECK(std::isfinite(v.real()));
}
