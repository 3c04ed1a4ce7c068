#pragma once

// Propellant, delta-v and revolution accounting for constant-acceleration
// trajectories.

#include "cwseed/frames.hpp"

#include <span>

namespace cwseed {

inline constexpr double kStandardGravity = 9.80665;  // m/s^2

/// Which of thrust/accel was supplied; the other follows from m0.
enum class ThrustInput { Thrust, Accel };

/// Spacecraft mass and propulsion.
struct SpacecraftParams {
    double m0 = 0.0;      // kg
    double thrust = 0.0;  // N
    double accel = 0.0;   // km/s^2, thrust / m0
    double isp = 0.0;     // s
    ThrustInput input = ThrustInput::Thrust;

    static SpacecraftParams from_thrust(double m0, double thrust_newton, double isp);
    static SpacecraftParams from_accel(double m0, double accel_km_s2, double isp);

    /// Effective exhaust velocity in km/s.
    double exhaust_velocity() const { return isp * kStandardGravity * 1e-3; }

    friend bool operator==(const SpacecraftParams&, const SpacecraftParams&) = default;
};

/// m(t) = m0 exp(-a t / (isp g0)) for constant acceleration a.
double mass_at(const SpacecraftParams& params, double burn_time);

/// Mass after an accumulated delta-v (km/s).
double mass_after_delta_v(const SpacecraftParams& params, double delta_v);

double delta_v(double accel, double burn_time);

/// Revolutions swept by a sampled path about the origin, measured in its
/// mean orbital plane. Throws InsufficientSampling when consecutive samples
/// are a quarter revolution or more apart.
double count_revolutions(std::span<const Vec3> positions);

}  // namespace cwseed
