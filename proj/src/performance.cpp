#include "cwseed/performance.hpp"

#include "cwseed/errors.hpp"

#include <cmath>

namespace cwseed {

SpacecraftParams SpacecraftParams::from_thrust(double m0, double thrust_newton, double isp) {
    if (!(m0 > 0.0)) throw ValidationError("m0", "initial mass must be positive");
    if (!(isp > 0.0)) throw ValidationError("isp", "specific impulse must be positive");
    if (!(thrust_newton >= 0.0)) throw ValidationError("thrust", "must be nonnegative");
    return {m0, thrust_newton, thrust_newton / m0 * 1e-3, isp, ThrustInput::Thrust};
}

SpacecraftParams SpacecraftParams::from_accel(double m0, double accel_km_s2, double isp) {
    if (!(m0 > 0.0)) throw ValidationError("m0", "initial mass must be positive");
    if (!(isp > 0.0)) throw ValidationError("isp", "specific impulse must be positive");
    if (!(accel_km_s2 >= 0.0)) throw ValidationError("accel", "must be nonnegative");
    return {m0, accel_km_s2 * 1e3 * m0, accel_km_s2, isp, ThrustInput::Accel};
}

double mass_at(const SpacecraftParams& params, double burn_time) {
    return mass_after_delta_v(params, delta_v(params.accel, burn_time));
}

double mass_after_delta_v(const SpacecraftParams& params, double dv) {
    return params.m0 * std::exp(-dv / params.exhaust_velocity());
}

double delta_v(double accel, double burn_time) { return accel * burn_time; }

double count_revolutions(std::span<const Vec3> positions) {
    if (positions.size() < 2) return 0.0;
    Vec3 normal = Vec3::Zero();
    for (std::size_t i = 1; i < positions.size(); ++i)
        normal += positions[i - 1].cross(positions[i]);
    if (!(normal.norm() > 0.0)) return 0.0;
    normal.normalize();

    double swept = 0.0;
    for (std::size_t i = 1; i < positions.size(); ++i) {
        const Vec3 a = positions[i - 1] - normal.dot(positions[i - 1]) * normal;
        const Vec3 b = positions[i] - normal.dot(positions[i]) * normal;
        const double step = std::atan2(normal.dot(a.cross(b)), a.dot(b));
        if (std::abs(step) >= kPi / 2)
            throw InsufficientSampling("samples " + std::to_string(i - 1) + " and " +
                                       std::to_string(i) + " are a quarter revolution or more apart");
        swept += step;
    }
    return std::abs(swept) / kTwoPi;
}

}  // namespace cwseed
