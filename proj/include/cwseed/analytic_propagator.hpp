#pragma once

// Closed-form propagation of the thrust-forced Hill equations over one segment.
//
// The in-plane response is written as the homogeneous CW transition plus the
// convolution of the transition matrix with the rotating thrust vector. Every
// convolution integral is evaluated through sinc-type kernels that stay
// accurate through k -> 0 and k -> +-n, so the solution has no singular
// steering rates.

#include "cwseed/hill_dynamics.hpp"

namespace cwseed {

struct OutOfPlaneState {
    double z = 0.0;
    double vz = 0.0;
};

struct InPlaneState {
    double x = 0.0;
    double vx = 0.0;
    double y = 0.0;
    double vy = 0.0;
};

/// Homogeneous CW state-transition matrix over (x, y, z, vx, vy, vz).
Mat6 cw_stm(double n, double t);

OutOfPlaneState propagate_out_of_plane(double z0, double vz0, double accel, double beta, double n,
                                       double t);

InPlaneState propagate_in_plane(double x0, double vx0, double y0, double vy0, const ControlLaw& law,
                                double n, double t);

HillState propagate_segment(const HillState& state, const ControlLaw& law, double n, double dt);

/// A propagated segment. `final` is always the closed form evaluated at dt.
struct SegmentPropagation {
    HillState initial;
    ControlLaw law;
    double n = 0.0;
    double dt = 0.0;
    HillState final;

    static SegmentPropagation run(const HillState& initial, const ControlLaw& law, double n,
                                  double dt);
};

/// Error norm used to compare Hill states across regimes: positions divided
/// by `radius`, velocities by `n * radius`.
double scaled_error(const HillState& a, const HillState& b, double radius, double n);

}  // namespace cwseed
