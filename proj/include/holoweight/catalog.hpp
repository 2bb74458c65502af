#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "holoweight/geometry.hpp"

namespace hw {

/// One holomorphic test function with enough metadata for verification runs:
/// closed-form Taylor coefficients where known, the complex derivative for the
/// n = 1 entries, boundary singularity locations, and integrability flags.
struct HoloTestFunction {
    std::string id;
    int complex_dim = 1;
    std::function<Complex(Point)> eval;
    std::function<Complex(Complex)> eval_z;   // n = 1 only
    std::function<Complex(Complex)> deriv_z;  // n = 1 only
    std::function<Complex(int)> taylor;       // coefficient of z^m about 0
    bool has_taylor = false;
    bool has_deriv = false;
    bool l1_member = true;
    bool l2_member = true;
    std::vector<std::vector<double>> singularities;  // boundary points
};

/// Multiplier g for the weighted identity; kept as an expression so the weight
/// recursion can differentiate it.
struct Multiplier {
    std::string id;
    Field expr;
};

/// Canonical catalog ids for a domain.
std::vector<std::string> catalog_ids(const DomainModel& domain);

std::vector<HoloTestFunction> catalog(const DomainModel& domain);

/// Resolve one test function by id ("const", "pow:3", "exp", "rat2",
/// "sing:1.5" on the disc; "const", "mono:2,0", ... on the ball).
HoloTestFunction find_eta(const DomainModel& domain, const std::string& id);

/// Resolve a multiplier by id ("one", "conj_pow:p", "exp_x1").
Multiplier make_multiplier(const DomainModel& domain, const std::string& id);

std::vector<std::string> multiplier_ids(const DomainModel& domain);

/// Closed-form value of int_domain eta * g dV when one is known:
/// volume * eta(0) for g = one, pi/(p+1) * taylor(p) for g = conj_pow:p.
std::optional<Complex> reference_integral(const HoloTestFunction& eta, const std::string& g_id,
                                          const DomainModel& domain);

struct HolomorphyCheck {
    double max_residual = 0.0;
    int samples = 0;
};

/// Max over collar samples of |N(eta) - i T(eta)|, both sides assembled from
/// delta's gradient and the complex derivative of eta.
HolomorphyCheck holomorphy_relation_check(const HoloTestFunction& eta, const DomainModel& domain,
                                          int samples, std::uint64_t seed);

}  // namespace hw
