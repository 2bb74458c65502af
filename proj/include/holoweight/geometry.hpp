#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "holoweight/expr.hpp"

namespace hw {

/// A model domain (unit disc in C or unit ball in C^2) carrying a smoothed
/// boundary-distance expression delta. Inside the collar (|x| >= blend_radius)
/// delta equals 1 - |x| exactly; further in it blends smoothly into
/// 3/4 - |x|^2 so that no radial cusp reaches the origin.
struct DomainModel {
    std::string id;             // "disc" or "ball"
    int complex_dim = 1;        // n
    int ambient_dim = 2;        // 2n
    Field delta;
    std::vector<Field> delta_grad;  // partial derivatives of delta, axes 1..2n
    Field delta_laplacian;
    double collar_inner = 0.05;  // eps1
    double collar_outer = 0.15;  // eps2
    double blend_radius = 0.5;
    double volume = 0.0;
};

/// Smooth cutoff: 1 where delta <= inner, 0 where delta >= outer, smooth
/// monotone transition in between.
struct CutoffProfile {
    double inner = 0.05;
    double outer = 0.15;
    Field zeta;
};

/// Unit disc domain. delta_scale != 1 deliberately breaks the unit-gradient
/// property of delta in the collar; it exists only as a fault-injection hook
/// for the self-test machinery.
DomainModel make_disc_domain(double collar_inner = 0.05, double collar_outer = 0.15,
                             double delta_scale = 1.0);

/// Unit ball of C^2 (ambient R^4), same radial blend as the disc.
DomainModel make_ball_domain(double collar_inner = 0.05, double collar_outer = 0.15,
                             double delta_scale = 1.0);

DomainModel make_domain(const std::string& id, double collar_inner = 0.05,
                        double collar_outer = 0.15);

CutoffProfile make_cutoff(const DomainModel& domain);

///// The smooth step used by both the radial blend and the cutoff:
/// 0 for t <= 0, 1 for t >= 1, e(t)/(e(t)+e(1-t)) in between.
Field smooth_step01(Field t);

/// Deterministic pseudo-random points with delta in [eps1/2, eps2].
std::vector<std::vector<double>> sample_collar(const DomainModel& domain, int count,
                                               std::uint64_t seed);

/// N(f) = sum_j delta_{x_j} * f_{x_j}  (derivative along grad delta).
Field apply_normal(Field f, const DomainModel& domain);

/// T(f) = sum_j [delta_{x_2j} * f_{x_2j-1} - delta_{x_2j-1} * f_{x_2j}]
/// (tangential complex-rotation derivative; annihilates delta).
Field apply_tangential(Field f, const DomainModel& domain);

}  // namespace hw
