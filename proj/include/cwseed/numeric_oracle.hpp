#pragma once

// Fixed-step RK4 integrators: the Hill equations with rotating thrust, and
// the full two-body problem with an arbitrary thrust acceleration.

#include "cwseed/hill_dynamics.hpp"

#include <functional>

namespace cwseed {

struct IntegrationSettings {
    int steps = 1000;

    /// Step count giving at most `max_step` seconds per step over `dt`.
    static IntegrationSettings from_max_step(double dt, double max_step);
    /// Default density: `per_rev` steps per revolution of mean motion n.
    static IntegrationSettings per_revolution(double dt, double n, int per_rev = 100);
};

HillState integrate_numeric(const HillState& state, const ControlLaw& law, double n, double dt,
                            const IntegrationSettings& settings);

/// Thrust acceleration (km/s^2) as a function of time and the current state.
using AccelerationFn = std::function<Vec3(double t, const Vec3& pos, const Vec3& vel)>;

struct CartesianState {
    Vec3 pos = Vec3::Zero();
    Vec3 vel = Vec3::Zero();
};

/// Integrates r'' = -mu r / |r|^3 + accel(t, r, v) from t = 0 to dt.
/// Throws SingularRadius if |r| drops below 1 km. An empty `accel` means
/// no thrust.
CartesianState integrate_two_body(const Vec3& pos, const Vec3& vel, const AccelerationFn& accel,
                                  double mu, double dt, const IntegrationSettings& settings);

}  // namespace cwseed
