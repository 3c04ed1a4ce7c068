#pragma once

// State and control types for thrust-forced Clohessy-Wiltshire motion.
//
// Units are km, km/s, km/s^2, rad and seconds throughout. The Hill frame has
// x radial, y along-track and z cross-track relative to a reference point on
// a circular orbit.

#include <Eigen/Dense>

#include <numbers>

namespace cwseed {

using Vec3 = Eigen::Vector3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat3 = Eigen::Matrix3d;
using Mat6 = Eigen::Matrix<double, 6, 6>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Wraps an angle to (-pi, pi].
double wrap_angle(double angle);

/// Relative position (km) and velocity (km/s) in the rotating Hill frame.
struct HillState {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
    double vx = 0.0;
    double vy = 0.0;
    double vz = 0.0;

    Vec6 as_vector() const { return {x, y, z, vx, vy, vz}; }
    static HillState from_vector(const Vec6& v) { return {v[0], v[1], v[2], v[3], v[4], v[5]}; }

    Vec3 position() const { return {x, y, z}; }
    Vec3 velocity() const { return {vx, vy, vz}; }

    bool is_finite() const;

    friend bool operator==(const HillState&, const HillState&) = default;
};

/// Constant-magnitude thrust acceleration steered by
///   alpha(t) = alpha0 + k t  (in-plane, measured from radial toward along-track)
///   beta                     (out-of-plane, constant over the segment).
struct ControlLaw {
    double accel = 0.0;   // km/s^2, >= 0
    double alpha0 = 0.0;  // rad
    double k = 0.0;       // rad/s
    double beta = 0.0;    // rad, [-pi/2, pi/2]

    double alpha_at(double t) const { return alpha0 + k * t; }

    /// Same physical law restarted `t` seconds later.
    ControlLaw shifted(double t) const { return {accel, alpha0 + k * t, k, beta}; }

    /// Canonical form: beta folded into [-pi/2, pi/2] (flipping alpha0 by pi
    /// when needed) and alpha0 wrapped to (-pi, pi]. The thrust history is
    /// unchanged.
    ControlLaw normalized() const;

    friend bool operator==(const ControlLaw&, const ControlLaw&) = default;
};

/// Thrust acceleration components (ax, ay, az) in the Hill frame at time t
/// since the start of the segment.
Vec3 thrust_components(const ControlLaw& law, double t);

/// Right-hand side of the forced Hill equations:
///   (vx, vy, vz, 3 n^2 x + 2 n vy + ax, -2 n vx + ay, -n^2 z + az).
Vec6 cw_derivative(const HillState& state, const Vec3& accel, double n);

}  // namespace cwseed

namespace cwseed {

/// Circular reference orbit that defines a Hill frame.
///
/// The triad columns are (radial, along-track, normal) at the segment epoch.
/// The reference point sits at radius * radial at t = 0 and moves along the
/// circle with mean motion n = sqrt(mu / radius^3).
class ReferenceOrbit {
public:
    ReferenceOrbit(double mu, double radius, const Mat3& triad);

    /// Equatorial reference orbit whose reference point starts on +X.
    static ReferenceOrbit equatorial(double mu, double radius);

    double mu() const { return mu_; }
    double radius() const { return radius_; }
    double mean_motion() const { return n_; }
    double period() const { return kTwoPi / n_; }
    const Mat3& triad() const { return triad_; }

    /// Hill axes (x radial, y along-track, z normal) at time t, as columns.
    Mat3 hill_axes(double t) const;

private:
    double mu_;
    double radius_;
    double n_;
    Mat3 triad_;
};

}  // namespace cwseed
