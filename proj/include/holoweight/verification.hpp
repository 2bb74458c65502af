#pragma once

#include <optional>
#include <string>
#include <vector>

#include "holoweight/catalog.hpp"
#include "holoweight/config.hpp"
#include "holoweight/geometry.hpp"
#include "holoweight/quadrature.hpp"
#include "holoweight/weights.hpp"

namespace hw {

enum class LhsSource { ClosedForm, OracleQuadrature };

std::string lhs_source_name(LhsSource s);

struct IdentityOptions {
    double tol_rel = 1e-8;
    double tol_abs = 1e-12;  // applies when lhs is exactly zero
    QuadratureConfig quad;
};

/// Outcome of one identity check: integral of eta*g versus the weighted
/// integral of delta^k * omega * eta.
struct IdentityReport {
    std::string domain_id;
    int k = 1;
    std::string g_id;
    std::string eta_id;
    std::string variant;
    Complex lhs{0.0, 0.0};
    LhsSource lhs_source = LhsSource::ClosedForm;
    Complex rhs{0.0, 0.0};
    double rhs_error_estimate = 0.0;
    double abs_err = 0.0;
    double rel_err = 0.0;  // abs_err / max(|lhs|, 1e-14)
    bool quad_converged = true;
    bool pass = false;
    double runtime_seconds = 0.0;
};

/// A weight with its evaluation program, reusable across test functions.
struct PreparedWeight {
    WeightProgram program;
    CompiledField weighted_core;  // delta^k * omega, compiled
    CompiledField multiplier;     // g, compiled (for oracle-quadrature lhs)
};

PreparedWeight prepare_weight(const DomainModel& domain, const CutoffProfile& cutoff, int k,
                              const std::string& g_id, WeightVariant variant);

IdentityReport verify_with(const PreparedWeight& w, const HoloTestFunction& eta,
                           const IdentityOptions& opts);

IdentityReport verify_identity(const DomainModel& domain, int k, const std::string& g_id,
                               const std::string& eta_id, WeightVariant variant,
                               const IdentityOptions& opts);

/// Cross-validation of a closed-form reference value against quadrature over
/// the shrunken domains {delta > eps}, normalized by the exact per-mode radial
/// factor. Used before trusting closed-form lhs values for singular inputs.
struct LhsExhaustionCheck {
    bool closed_form_available = false;
    Complex closed_form{0.0, 0.0};
    std::vector<double> eps_values;
    std::vector<Complex> extrapolated;  // per eps, normalized shell integral
    double max_rel_gap = 0.0;           // worst |extrapolated - closed|/|closed|
    bool converged = true;
};

LhsExhaustionCheck lhs_exhaustion_check(const DomainModel& domain, const HoloTestFunction& eta,
                                        const std::string& g_id, const std::vector<double>& eps_values,
                                        const QuadratureConfig& cfg);

/// Same identity computed under both recursion variants, with the gap between
/// their right-hand sides judged against the combined quadrature error.
struct VariantComparison {
    IdentityReport corrected;
    IdentityReport bare;
    double gap = 0.0;           // |rhs_corrected - rhs_bare|
    double error_budget = 0.0;  // 10 * (sum of rhs error estimates)
    bool significant = false;   // gap > error_budget
};

VariantComparison variant_discrimination(const DomainModel& domain, int k, const std::string& g_id,
                                         const std::string& eta_id, const IdentityOptions& opts);

/// Boundary-term traces over the exhausting domains {delta > eps}:
///   i2 = integral of N(zeta*g) * eta,
///   i3 = i * integral of [zeta*g*T(eta) - T(zeta*g)*eta]  (reported split).
struct DecayRow {
    double eps = 0.0;
    Complex i2{0.0, 0.0};
    double eps_i2_abs = 0.0;
    Complex i3_eta_part{0.0, 0.0};
    Complex i3_weight_part{0.0, 0.0};
    Complex i3{0.0, 0.0};
    bool converged = true;
};

std::vector<DecayRow> boundary_term_decay(const DomainModel& domain, const std::string& eta_id,
                                          const std::string& g_id, const std::vector<double>& eps_values,
                                          const QuadratureConfig& cfg);

/// Full configured matrix run. Cells are ordered variant-major, then k, g,
/// eta; results are merged in that order regardless of thread count.
struct SuiteResult {
    std::vector<IdentityReport> cells;
    int passed = 0;
    int failed = 0;
    bool all_pass = true;
};

SuiteResult run_suite(const RunConfig& cfg);

}  // namespace hw
