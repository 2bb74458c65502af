#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "holoweight/geometry.hpp"

namespace hw {

struct QuadratureConfig {
    double rel_tol = 1e-9;
    double abs_tol = 1e-12;
    /// Budget of cell-split operations before giving up (result still returned,
    /// flagged unconverged).
    int max_subdivisions = 4000;
    /// Tensor Gauss-Legendre order per axis (disc: radial and angular; ball: radial).
    int base_rule = 16;
    /// Angular order for the ball's three sphere angles.
    int ball_angular_rule = 8;
    /// Radii where the integrand is known to change character (blend and collar
    /// junctions); initial cells are aligned to these.
    std::vector<double> radial_breaks = {0.25, 0.5, 0.85, 0.95};
    /// Boundary points near which the integrand is singular; the initial
    /// angular grid is aligned to them and refinement concentrates there.
    std::vector<std::vector<double>> singular_points;
    int threads = 1;
};

struct IntegralResult {
    Complex value{0.0, 0.0};
    double error_estimate = 0.0;
    long long cells = 0;
    long long evaluations = 0;
    bool converged = true;
};

using Integrand = std::function<Complex(Point)>;

/// Adaptive tensor quadrature over the unit disc in polar coordinates.
IntegralResult integrate_disc(const Integrand& f, const QuadratureConfig& cfg);

/// Adaptive tensor quadrature over the unit ball of R^4 in hyperspherical
/// coordinates (radially adaptive).
IntegralResult integrate_ball(const Integrand& f, const QuadratureConfig& cfg);

IntegralResult integrate_domain(const DomainModel& domain, const Integrand& f,
                                const QuadratureConfig& cfg);

/// Integral over {delta > eps}. For the model domains this is the ball of
/// radius 1-eps as long as eps <= 1/2, where delta = 1-|x| exactly.
IntegralResult integrate_epsilon_shell(const DomainModel& domain, const Integrand& f, double eps,
                                       const QuadratureConfig& cfg);

/// Closed form for the disc moments int z^m conj(z)^p |z|^(2a) dV:
/// 0 when m != p, else 2*pi / (2m + 2a + 2).
Complex oracle_monomial_moment(int m, int p, double a);

/// Gauss-Legendre nodes and weights on [0,1] (cached, deterministic).
void gauss_legendre_01(int order, std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace hw
