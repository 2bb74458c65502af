#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "holoweight/expr.hpp"
#include "holoweight/geometry.hpp"

namespace hw {

/// Recursion flavor for the weight construction. Both apply the cutoff inside
/// the normal- and tangential-derivative terms; they differ in the Laplacian
/// term of each induction step:
///   Corrected:     ... + (lap delta) * zeta * omega_m ...
///   BareLaplacian: ... + (lap delta) * omega_m ...  (cutoff omitted)
/// The bare form fails the integral identity away from the boundary band and
/// is kept as a first-class alternative so the harness can measure the gap.
enum class WeightVariant { Corrected, BareLaplacian };

std::string variant_name(WeightVariant v);
WeightVariant parse_variant(const std::string& name);

/// The constructed weight: all intermediate orders are retained so the
/// recursion can be audited step by step.
struct WeightProgram {
    int k = 1;
    std::string g_id;
    WeightVariant variant = WeightVariant::Corrected;
    DomainModel domain;
    CutoffProfile cutoff;
    std::vector<Field> steps;  // steps[m-1] = weight of order m
    Field omega;               // steps.back()
    std::vector<std::size_t> dag_sizes;
};

/// First-order weight for an arbitrary smooth multiplier expression:
///   (1 - zeta)/delta * gamma - [N(zeta*gamma) + (lap delta)*zeta*gamma
///                               - i*T(zeta*gamma)],
/// with the quotient realized as a guarded collar quotient.
Field base_weight(Field gamma, const DomainModel& domain, const CutoffProfile& cutoff);

/// One induction step: from the order-m weight to order m+1 (m >= 1):
///   (1 - zeta)/delta * w - 1/(m+1) * [N(zeta*w) + (lap delta)*(zeta*)w
///                                     - i*T(zeta*w)],
/// where the parenthesized zeta is present for Corrected and absent for
/// BareLaplacian.
Field induction_step(Field w, int m, const DomainModel& domain, const CutoffProfile& cutoff,
                     WeightVariant variant);

WeightProgram inductive_weight(int k, Field g, const std::string& g_id, const DomainModel& domain,
                               const CutoffProfile& cutoff, WeightVariant variant);

/// True when every stored step reproduces, node for node, from its
/// predecessor via induction_step (pointer equality of interned DAGs).
bool structural_recursion_holds(const WeightProgram& w);

/// True if the expression contains a reciprocal applied directly to the
/// domain's delta (division by delta is only allowed via the guarded
/// collar quotient).
bool contains_bare_delta_reciprocal(Field f, const DomainModel& domain);

/// Decay of |delta^k * omega| and its first k-1 normal derivatives along
/// inward-normal rays, sampled at delta = scale for each requested scale.
struct RayProfile {
    std::array<double, 4> direction{};           // unit vector (trailing zeros in 2D)
    std::vector<double> scales;                  // descending
    std::vector<std::vector<double>> magnitudes; // [derivative order][scale index]
    std::vector<double> slopes;                  // least-squares log-log slope per order
    bool degenerate = false;                     // all magnitudes at roundoff dust level
};

struct VanishingProfile {
    int k = 1;
    std::vector<RayProfile> rays;
};

/// scales must lie in (0, collar_inner); directions default to a fixed fan.
VanishingProfile vanishing_profile(const WeightProgram& w, std::vector<double> scales,
                                   std::vector<std::vector<double>> directions = {});

/// max |omega| over deterministic collar samples.
double collar_sup(const WeightProgram& w, int samples, std::uint64_t seed);

}  // namespace hw
