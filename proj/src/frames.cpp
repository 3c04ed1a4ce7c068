#include "cwseed/frames.hpp"

#include "cwseed/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cwseed {
namespace {

constexpr double kEquatorialThreshold = 1e-8;
constexpr double kCircularThreshold = 1e-11;

Mat3 perifocal_to_inertial(double raan, double inc, double argp) {
    return (Eigen::AngleAxisd(raan, Vec3::UnitZ()) * Eigen::AngleAxisd(inc, Vec3::UnitX()) *
            Eigen::AngleAxisd(argp, Vec3::UnitZ()))
        .toRotationMatrix();
}

}  // namespace

KeplerianElements KeplerianElements::from_longitude_of_perihelion(double sma, double ecc,
                                                                  double inc, double raan,
                                                                  double lon_peri, double nu) {
    return {sma, ecc, inc, wrap_angle(raan), wrap_angle(lon_peri - raan), wrap_angle(nu)};
}

double circular_speed(double mu, double r) { return std::sqrt(mu / r); }

InertialState elements_to_state(const KeplerianElements& el, double mu) {
    const double p = el.sma * (1.0 - el.ecc * el.ecc);
    const double cnu = std::cos(el.nu);
    const double snu = std::sin(el.nu);
    const double r = p / (1.0 + el.ecc * cnu);
    const double vscale = std::sqrt(mu / p);
    const Vec3 r_pf{r * cnu, r * snu, 0.0};
    const Vec3 v_pf{-vscale * snu, vscale * (el.ecc + cnu), 0.0};
    const Mat3 rot = perifocal_to_inertial(el.raan, el.inc, el.argp);
    return {rot * r_pf, rot * v_pf, 0.0};
}

KeplerianElements state_to_elements(const InertialState& s, double mu) {
    const Vec3& r = s.pos;
    const Vec3& v = s.vel;
    const double rn = r.norm();
    const Vec3 h = r.cross(v);
    const double hn = h.norm();
    if (!(rn > 0.0) || hn <= 1e-9 * rn * v.norm())
        throw DegenerateOrbit("rectilinear state has no orbital plane");

    const Vec3 e_vec = v.cross(h) / mu - r / rn;
    const double ecc = e_vec.norm();
    if (ecc >= 1.0 - 1e-9) throw DegenerateOrbit("state is not elliptic (e = " + std::to_string(ecc) + ")");

    const double energy = 0.5 * v.squaredNorm() - mu / rn;
    KeplerianElements el;
    el.sma = -mu / (2.0 * energy);
    el.ecc = ecc;
    el.inc = std::atan2(std::hypot(h.x(), h.y()), h.z());

    // Node direction, falling back to +X for equatorial orbits.
    Vec3 node = Vec3::UnitZ().cross(h);
    if (el.inc < kEquatorialThreshold || node.norm() <= 0.0) {
        node = Vec3::UnitX();
        el.raan = 0.0;
    } else {
        node.normalize();
        el.raan = std::atan2(node.y(), node.x());
    }
    const Vec3 hhat = h / hn;
    const Vec3 q = hhat.cross(node);  // 90 deg ahead of the node in the plane

    // Argument of latitude of the position, then split into argp + nu.
    const double u = std::atan2(r.dot(q), r.dot(node));
    if (ecc < kCircularThreshold) {
        el.argp = 0.0;
        el.nu = wrap_angle(u);
    } else {
        el.argp = std::atan2(e_vec.dot(q), e_vec.dot(node));
        el.nu = wrap_angle(u - el.argp);
    }
    el.raan = wrap_angle(el.raan);
    el.argp = wrap_angle(el.argp);
    return el;
}

double solve_kepler(double mean_anomaly, double ecc) {
    if (!(ecc >= 0.0 && ecc < 1.0)) throw ValidationError("ecc", "Kepler solver needs 0 <= e < 1");
    const double m = wrap_angle(mean_anomaly);
    const double branch = mean_anomaly - m;
    if (ecc == 0.0 || m == 0.0) return mean_anomaly;

    // |E - M| <= e, and f(E) = E - e sin E - M is increasing.
    double lo = m - ecc;
    double hi = m + ecc;
    double e_anom = ecc < 0.8 ? m : (m > 0 ? kPi : -kPi);
    e_anom = std::clamp(e_anom, lo, hi);
    for (int iter = 0; iter < 100; ++iter) {
        const double f = e_anom - ecc * std::sin(e_anom) - m;
        if (f == 0.0) return e_anom + branch;
        if (f > 0.0) hi = e_anom; else lo = e_anom;
        const double fp = 1.0 - ecc * std::cos(e_anom);
        double next = e_anom - f / fp;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - e_anom) <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(next)))
            return next + branch;
        e_anom = next;
    }
    throw NonConvergence("Kepler's equation did not converge for M = " + std::to_string(mean_anomaly) +
                         ", e = " + std::to_string(ecc));
}

double true_to_mean_anomaly(double nu, double ecc) {
    const double e_anom = 2.0 * std::atan2(std::sqrt(1.0 - ecc) * std::sin(0.5 * nu),
                                           std::sqrt(1.0 + ecc) * std::cos(0.5 * nu));
    return e_anom - ecc * std::sin(e_anom);
}

double mean_to_true_anomaly(double mean_anomaly, double ecc) {
    const double e_anom = solve_kepler(mean_anomaly, ecc);
    return 2.0 * std::atan2(std::sqrt(1.0 + ecc) * std::sin(0.5 * e_anom),
                            std::sqrt(1.0 - ecc) * std::cos(0.5 * e_anom));
}

InertialState propagate_target(const KeplerianElements& el, double mu, double dt) {
    KeplerianElements out = el;
    if (dt != 0.0) {
        const double n = std::sqrt(mu / (el.sma * el.sma * el.sma));
        const double m0 = true_to_mean_anomaly(el.nu, el.ecc);
        out.nu = wrap_angle(mean_to_true_anomaly(wrap_angle(m0 + n * dt), el.ecc));
    }
    InertialState s = elements_to_state(out, mu);
    s.epoch = dt;
    return s;
}

InertialState hill_to_inertial(const HillState& h, const ReferenceOrbit& ref, double t) {
    const Mat3 axes = ref.hill_axes(t);
    const double n = ref.mean_motion();
    const double rx = ref.radius() + h.x;
    // d/dt of (rx xhat + y yhat + z zhat) with xhat' = n yhat, yhat' = -n xhat.
    const Vec3 rel{rx, h.y, h.z};
    const Vec3 vel_hill{h.vx - n * h.y, h.vy + n * rx, h.vz};
    return {axes * rel, axes * vel_hill, t};
}

HillState inertial_to_hill(const InertialState& s, const ReferenceOrbit& ref, double t) {
    const Mat3 axes = ref.hill_axes(t);
    const double n = ref.mean_motion();
    const Vec3 rel = axes.transpose() * s.pos;
    const Vec3 vel = axes.transpose() * s.vel;
    HillState h;
    h.x = rel.x() - ref.radius();
    h.y = rel.y();
    h.z = rel.z();
    h.vx = vel.x() + n * h.y;
    h.vy = vel.y() - n * rel.x();
    h.vz = vel.z();
    return h;
}

std::pair<ReferenceOrbit, HillState> recenter_reference(const InertialState& s, double mu) {
    const double rn = s.pos.norm();
    const Vec3 h = s.pos.cross(s.vel);
    if (!(rn > 0.0) || !(h.norm() > 1e-9 * rn * s.vel.norm()))
        throw DegenerateOrbit("cannot re-center on a rectilinear state");
    Mat3 triad;
    triad.col(0) = s.pos / rn;
    triad.col(2) = h.normalized();
    triad.col(1) = triad.col(2).cross(triad.col(0));
    ReferenceOrbit ref(mu, rn, triad);
    const Vec3 vel = triad.transpose() * s.vel;
    HillState hs;
    hs.vx = vel.x();
    hs.vy = vel.y() - ref.mean_motion() * rn;
    hs.vz = vel.z();
    return {ref, hs};
}

}  // namespace cwseed
