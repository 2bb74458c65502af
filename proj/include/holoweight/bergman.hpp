#pragma once

#include <functional>
#include <string>
#include <vector>

#include "holoweight/geometry.hpp"
#include "holoweight/quadrature.hpp"

namespace hw {

/// Monomial basis data for the holomorphic subspace of L^2 on the unit disc:
/// ||z^m||^2 = pi/(m+1).
struct DiscBergmanBasis {
    int max_mode = 32;
    std::vector<double> norms_sq;
};

DiscBergmanBasis make_disc_basis(int max_mode);

/// Fixed tensor product rule (Gauss radial x uniform angular) used for the
/// projection inner products. Exact to machine precision for the polynomial
/// inputs exercised here; ample for entire inputs.
struct ProjectionConfig {
    int radial_order = 64;
    int angular_order = 256;
};

/// Coefficients a_m = (f, z^m)/||z^m||^2 for m = 0..max_mode.
std::vector<Complex> project(const std::function<Complex(Point)>& f, int max_mode,
                             const ProjectionConfig& cfg = {});

/// Squared-coefficient Sobolev norm of sum a_m z^m on the disc, orders 0..2:
/// ||.||_{k2}^2 = sum_{j<=k2} (j+1) sum_{m>=j} |a_m|^2 (m!/(m-j)!)^2 pi/(m-j+1).
/// The factor j+1 counts the order-j coordinate derivative combinations.
double sobolev_norm(const std::vector<Complex>& coeffs, int k2);

/// ||delta^k mu||_{L^2} by adaptive quadrature with the domain's blended delta.
double weighted_negative_norm(const std::function<Complex(Point)>& mu, int k,
                              const DomainModel& disc, const QuadratureConfig& cfg);

struct SmoothingRow {
    int j = 0;
    double projected_norm = 0.0;  // ||B(mu_j g)||_{k2}
    double weighted_norm = 0.0;   // ||delta^k mu_j||
    double ratio = 0.0;
};

struct SmoothingReport {
    std::string g_id;
    int k = 1;
    int k1 = 0;  // input Sobolev order of the underlying estimate; informational
    int k2 = 0;
    int j_max = 40;
    std::vector<SmoothingRow> rows;
    double max_ratio_low = 0.0;   // over j in [0, 10]
    double max_ratio_high = 0.0;  // over j in [10, j_max]
    bool bounded = false;         // max_high <= 2 * max_low
};

/// Ratio table for mu_j = conj(z)^j against multiplier g ("one", "pow:q",
/// "exp_x1"), with the boundedness verdict max_[10,j_max] <= 2*max_[0,10].
SmoothingReport smoothing_check(const std::string& g_id, int k, int k2, int j_max,
                                const DomainModel& disc, const QuadratureConfig& cfg,
                                const ProjectionConfig& proj = {});

}  // namespace hw
