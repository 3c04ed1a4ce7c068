#pragma once

// Keplerian elements, inertial states and Hill-frame conversions.

#include "cwseed/hill_dynamics.hpp"

#include <utility>

namespace cwseed {

inline constexpr double kAstronomicalUnit = 149597870.7;  // km
inline constexpr double kSecondsPerDay = 86400.0;

struct KeplerianElements {
    double sma = 0.0;   // km
    double ecc = 0.0;
    double inc = 0.0;   // rad
    double raan = 0.0;  // rad
    double argp = 0.0;  // rad
    double nu = 0.0;    // true anomaly, rad

    /// Builds elements from a longitude of perihelion (argp = lon_peri - raan).
    static KeplerianElements from_longitude_of_perihelion(double sma, double ecc, double inc,
                                                          double raan, double lon_peri, double nu);

    friend bool operator==(const KeplerianElements&, const KeplerianElements&) = default;
};

struct InertialState {
    Vec3 pos = Vec3::Zero();  // km
    Vec3 vel = Vec3::Zero();  // km/s
    double epoch = 0.0;       // s past scenario start

    friend bool operator==(const InertialState& a, const InertialState& b) {
        return a.pos == b.pos && a.vel == b.vel && a.epoch == b.epoch;
    }
};

InertialState elements_to_state(const KeplerianElements& el, double mu);

/// Throws DegenerateOrbit for rectilinear or non-elliptic states. Below
/// inclination 1e-8 rad the node is placed on +X; below eccentricity 1e-11
/// the periapsis is placed on the node.
KeplerianElements state_to_elements(const InertialState& s, double mu);

/// Eccentric anomaly E with E - e sin E = M. Newton steps safeguarded by a
/// bisection bracket; the result is on the same 2 pi branch as M.
double solve_kepler(double mean_anomaly, double ecc);

double true_to_mean_anomaly(double nu, double ecc);
double mean_to_true_anomaly(double mean_anomaly, double ecc);

/// Advances `el` by dt seconds of unperturbed two-body motion.
InertialState propagate_target(const KeplerianElements& el, double mu, double dt);

/// Inertial state of a Hill-frame state at time t after the reference epoch.
InertialState hill_to_inertial(const HillState& h, const ReferenceOrbit& ref, double t);

HillState inertial_to_hill(const InertialState& s, const ReferenceOrbit& ref, double t);

/// Circular reference orbit through the spacecraft position with its plane
/// normal along pos x vel. The returned Hill state has zero position.
std::pair<ReferenceOrbit, HillState> recenter_reference(const InertialState& s, double mu);

/// Speed of a circular orbit of radius r.
double circular_speed(double mu, double r);

}  // namespace cwseed
