#include "cwseed/numeric_oracle.hpp"

#include "cwseed/errors.hpp"

#include <array>
#include <cmath>

namespace cwseed {

IntegrationSettings IntegrationSettings::from_max_step(double dt, double max_step) {
    if (!(max_step > 0.0)) throw ValidationError("max_step", "must be positive");
    return {std::max(1, static_cast<int>(std::ceil(dt / max_step)))};
}

IntegrationSettings IntegrationSettings::per_revolution(double dt, double n, int per_rev) {
    return from_max_step(dt, kTwoPi / n / per_rev);
}

HillState integrate_numeric(const HillState& state, const ControlLaw& law, double n, double dt,
                            const IntegrationSettings& settings) {
    if (settings.steps < 1) throw ValidationError("steps", "must be at least 1");
    const double h = dt / settings.steps;
    const double n2 = n * n;
    const double in_plane = law.accel * std::cos(law.beta);
    const double az = law.accel * std::sin(law.beta);

    using Arr = std::array<double, 6>;
    auto f = [&](const Arr& s, double ax, double ay) -> Arr {
        return {s[3], s[4], s[5], 3.0 * n2 * s[0] + 2.0 * n * s[4] + ax, -2.0 * n * s[3] + ay,
                -n2 * s[2] + az};
    };
    auto axpy = [](const Arr& y, double a, const Arr& k) {
        Arr out;
        for (std::size_t i = 0; i < 6; ++i) out[i] = y[i] + a * k[i];
        return out;
    };

    Arr y{state.x, state.y, state.z, state.vx, state.vy, state.vz};
    // Thrust angle at step boundaries and midpoints advances by a fixed
    // half-step rotation; exact trig reseeds it every 256 steps.
    const double half_turn = 0.5 * h * law.k;
    const double ch = std::cos(half_turn), sh = std::sin(half_turn);
    double c0 = 0.0, s0 = 0.0;
    for (int i = 0; i < settings.steps; ++i) {
        if (i % 256 == 0) {
            const double a0 = law.alpha_at(i * h);
            c0 = std::cos(a0);
            s0 = std::sin(a0);
        }
        const double cm = c0 * ch - s0 * sh, sm = s0 * ch + c0 * sh;
        const double c1 = cm * ch - sm * sh, s1 = sm * ch + cm * sh;
        const Arr k1 = f(y, in_plane * c0, in_plane * s0);
        const Arr k2 = f(axpy(y, 0.5 * h, k1), in_plane * cm, in_plane * sm);
        const Arr k3 = f(axpy(y, 0.5 * h, k2), in_plane * cm, in_plane * sm);
        const Arr k4 = f(axpy(y, h, k3), in_plane * c1, in_plane * s1);
        for (std::size_t j = 0; j < 6; ++j) y[j] += (h / 6.0) * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        c0 = c1;
        s0 = s1;
    }
    return {y[0], y[1], y[2], y[3], y[4], y[5]};
}

CartesianState integrate_two_body(const Vec3& pos, const Vec3& vel, const AccelerationFn& accel,
                                  double mu, double dt, const IntegrationSettings& settings) {
    if (settings.steps < 1) throw ValidationError("steps", "must be at least 1");
    if (!(pos.norm() > 0.0)) throw SingularRadius("initial position is at the origin");
    const double h = dt / settings.steps;

    auto deriv = [&](double t, const Vec3& r, const Vec3& v, Vec3& dr, Vec3& dv) {
        const double rn = r.norm();
        if (rn < 1.0) throw SingularRadius("radius fell below 1 km at t = " + std::to_string(t));
        dr = v;
        dv = -mu / (rn * rn * rn) * r;
        if (accel) dv += accel(t, r, v);
    };

    Vec3 r = pos;
    Vec3 v = vel;
    Vec3 k1r, k1v, k2r, k2v, k3r, k3v, k4r, k4v;
    for (int i = 0; i < settings.steps; ++i) {
        const double t = i * h;
        deriv(t, r, v, k1r, k1v);
        deriv(t + 0.5 * h, r + 0.5 * h * k1r, v + 0.5 * h * k1v, k2r, k2v);
        deriv(t + 0.5 * h, r + 0.5 * h * k2r, v + 0.5 * h * k2v, k3r, k3v);
        deriv(t + h, r + h * k3r, v + h * k3v, k4r, k4v);
        r += (h / 6.0) * (k1r + 2.0 * k2r + 2.0 * k3r + k4r);
        v += (h / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    }
    return {r, v};
}

}  // namespace cwseed
