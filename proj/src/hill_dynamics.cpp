#include "cwseed/hill_dynamics.hpp"

#include "cwseed/errors.hpp"

#include <cmath>

namespace cwseed {

double wrap_angle(double angle) {
    double wrapped = std::remainder(angle, kTwoPi);
    if (wrapped <= -kPi) wrapped += kTwoPi;
    return wrapped;
}

bool HillState::is_finite() const {
    return std::isfinite(x) && std::isfinite(y) && std::isfinite(z) && std::isfinite(vx) &&
           std::isfinite(vy) && std::isfinite(vz);
}

ControlLaw ControlLaw::normalized() const {
    ControlLaw out = *this;
    double beta_w = wrap_angle(beta);
    double alpha_w = alpha0;
    if (beta_w > kPi / 2) {
        beta_w = kPi - beta_w;
        alpha_w += kPi;
    } else if (beta_w < -kPi / 2) {
        beta_w = -kPi - beta_w;
        alpha_w += kPi;
    }
    out.beta = beta_w;
    out.alpha0 = wrap_angle(alpha_w);
    return out;
}

Vec3 thrust_components(const ControlLaw& law, double t) {
    const double alpha = law.alpha_at(t);
    const double in_plane = law.accel * std::cos(law.beta);
    return {in_plane * std::cos(alpha), in_plane * std::sin(alpha), law.accel * std::sin(law.beta)};
}

Vec6 cw_derivative(const HillState& s, const Vec3& accel, double n) {
    const double n2 = n * n;
    return {s.vx,
            s.vy,
            s.vz,
            3.0 * n2 * s.x + 2.0 * n * s.vy + accel[0],
            -2.0 * n * s.vx + accel[1],
            -n2 * s.z + accel[2]};
}

ReferenceOrbit::ReferenceOrbit(double mu, double radius, const Mat3& triad)
    : mu_(mu), radius_(radius), n_(0.0), triad_(triad) {
    if (!(mu > 0.0)) throw ValidationError("mu", "gravitational parameter must be positive");
    if (!(radius > 0.0)) throw ValidationError("radius", "reference radius must be positive");
    const double ortho = (triad.transpose() * triad - Mat3::Identity()).cwiseAbs().maxCoeff();
    if (!(ortho <= 1e-12) || triad.determinant() < 0.0)
        throw ValidationError("orientation", "triad is not a right-handed orthonormal basis");
    n_ = std::sqrt(mu / (radius * radius * radius));
}

ReferenceOrbit ReferenceOrbit::equatorial(double mu, double radius) {
    return ReferenceOrbit(mu, radius, Mat3::Identity());
}

Mat3 ReferenceOrbit::hill_axes(double t) const {
    const double c = std::cos(n_ * t);
    const double s = std::sin(n_ * t);
    Mat3 axes;
    axes.col(0) = c * triad_.col(0) + s * triad_.col(1);
    axes.col(1) = -s * triad_.col(0) + c * triad_.col(1);
    axes.col(2) = triad_.col(2);
    return axes;
}

}  // namespace cwseed
