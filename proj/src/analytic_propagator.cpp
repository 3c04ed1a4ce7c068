#include "cwseed/analytic_propagator.hpp"

#include <cmath>

namespace cwseed {
namespace {

// sin(x)/x
double sinc(double x) {
    if (std::abs(x) < 1e-3) {
        const double x2 = x * x;
        return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
    }
    return std::sin(x) / x;
}

// (1 - cos x)/x, computed as 2 sin^2(x/2)/x.
double versinc(double x) {
    if (x == 0.0) return 0.0;
    const double h = std::sin(0.5 * x);
    return 2.0 * h * h / x;
}

// sin(x)/x - (1 - cos x)/x^2
double kernel_u_cos(double x) {
    const double s = sinc(0.5 * x);
    return sinc(x) - 0.5 * s * s;
}

// (sin x - x cos x)/x^2, odd, ~ x/3 near zero.
double kernel_u_sin(double x) {
    if (std::abs(x) < 1.0) {
        // sum_{j>=1} (-1)^{j+1} 2j x^{2j-1} / (2j+1)!
        const double x2 = x * x;
        double term = x;  // x^{2j-1}
        double fact = 6.0;  // (2j+1)!
        double sum = 0.0;
        for (int j = 1; j <= 10; ++j) {
            const double contrib = 2.0 * j * term / fact;
            sum += (j % 2 == 1) ? contrib : -contrib;
            term *= x2;
            fact *= (2.0 * j + 2.0) * (2.0 * j + 3.0);
        }
        return sum;
    }
    return (std::sin(x) - x * std::cos(x)) / (x * x);
}

// Integrals over u in [0, t].
double int_cos(double w, double t) { return t * sinc(w * t); }
double int_sin(double w, double t) { return t * versinc(w * t); }
double int_u_cos(double w, double t) { return t * t * kernel_u_cos(w * t); }
double int_u_sin(double w, double t) { return t * t * kernel_u_sin(w * t); }

// Pair of integrals of f(u) against cos(k u) and sin(k u).
struct KernelPair {
    double c;
    double s;
};

}  // namespace

Mat6 cw_stm(double n, double t) {
    const double nt = n * t;
    const double c = std::cos(nt);
    const double s = std::sin(nt);
    const double h = std::sin(0.5 * nt);
    const double omc = 2.0 * h * h;  // 1 - cos(nt)

    Mat6 phi = Mat6::Zero();
    // x
    phi(0, 0) = 4.0 - 3.0 * c;
    phi(0, 3) = s / n;
    phi(0, 4) = 2.0 * omc / n;
    // y
    phi(1, 0) = 6.0 * (s - nt);
    phi(1, 1) = 1.0;
    phi(1, 3) = -2.0 * omc / n;
    phi(1, 4) = (4.0 * s - 3.0 * nt) / n;
    // z
    phi(2, 2) = c;
    phi(2, 5) = s / n;
    // vx
    phi(3, 0) = 3.0 * n * s;
    phi(3, 3) = c;
    phi(3, 4) = 2.0 * s;
    // vy
    phi(4, 0) = -6.0 * n * omc;
    phi(4, 3) = -2.0 * s;
    phi(4, 4) = 4.0 * c - 3.0;
    // vz
    phi(5, 2) = -n * s;
    phi(5, 5) = c;
    return phi;
}

OutOfPlaneState propagate_out_of_plane(double z0, double vz0, double accel, double beta, double n,
                                       double t) {
    const double nt = n * t;
    const double c = std::cos(nt);
    const double s = std::sin(nt);
    const double h = std::sin(0.5 * nt);
    const double omc = 2.0 * h * h;
    const double az = accel * std::sin(beta);
    return {z0 * c + (vz0 / n) * s + (az / (n * n)) * omc, vz0 * c - n * z0 * s + (az / n) * s};
}

InPlaneState propagate_in_plane(double x0, double vx0, double y0, double vy0, const ControlLaw& law,
                                double n, double t) {
    const double nt = n * t;
    const double c = std::cos(nt);
    const double s = std::sin(nt);
    const double h = std::sin(0.5 * nt);
    const double omc = 2.0 * h * h;

    InPlaneState out;
    out.x = (4.0 - 3.0 * c) * x0 + (s / n) * vx0 + (2.0 * omc / n) * vy0;
    out.y = 6.0 * (s - nt) * x0 + y0 - (2.0 * omc / n) * vx0 + ((4.0 * s - 3.0 * nt) / n) * vy0;
    out.vx = 3.0 * n * s * x0 + c * vx0 + 2.0 * s * vy0;
    out.vy = -6.0 * n * omc * x0 - 2.0 * s * vx0 + (4.0 * c - 3.0) * vy0;

    const double amp = law.accel * std::cos(law.beta);
    if (amp == 0.0 || t == 0.0) return out;

    // Forced response: integral over u in [0, t] of Phi(u) B a(t - u), where
    // the thrust angle at t - u is theta_t - k u.
    const double k = law.k;
    const double theta_t = law.alpha_at(t);
    const double ct = std::cos(theta_t);
    const double st = std::sin(theta_t);

    const KernelPair one{int_cos(k, t), int_sin(k, t)};
    const KernelPair lin{int_u_cos(k, t), int_u_sin(k, t)};
    const double cos_minus = int_cos(n - k, t);
    const double cos_plus = int_cos(n + k, t);
    const double sin_minus = int_sin(n - k, t);
    const double sin_plus = int_sin(n + k, t);
    const KernelPair cosn{0.5 * (cos_minus + cos_plus), 0.5 * (sin_plus - sin_minus)};
    const KernelPair sinn{0.5 * (sin_plus + sin_minus), 0.5 * (cos_minus - cos_plus)};

    // Integrals of f(u) cos(theta) and f(u) sin(theta).
    auto against_cos = [&](const KernelPair& f) { return ct * f.c + st * f.s; };
    auto against_sin = [&](const KernelPair& f) { return st * f.c - ct * f.s; };

    const double xc_sin = against_cos(sinn);
    const double xc_cos = against_cos(cosn);
    const double xc_one = against_cos(one);
    const double xs_sin = against_sin(sinn);
    const double xs_cos = against_sin(cosn);
    const double xs_one = against_sin(one);
    const double xs_lin = against_sin(lin);

    out.x += amp / n * (xc_sin + 2.0 * (xs_one - xs_cos));
    out.y += amp / n * (-2.0 * (xc_one - xc_cos) + 4.0 * xs_sin - 3.0 * n * xs_lin);
    out.vx += amp * (xc_cos + 2.0 * xs_sin);
    out.vy += amp * (-2.0 * xc_sin + 4.0 * xs_cos - 3.0 * xs_one);
    return out;
}

HillState propagate_segment(const HillState& state, const ControlLaw& law, double n, double dt) {
    if (dt == 0.0) return state;
    const InPlaneState ip = propagate_in_plane(state.x, state.vx, state.y, state.vy, law, n, dt);
    const OutOfPlaneState op = propagate_out_of_plane(state.z, state.vz, law.accel, law.beta, n, dt);
    return {ip.x, ip.y, op.z, ip.vx, ip.vy, op.vz};
}

SegmentPropagation SegmentPropagation::run(const HillState& initial, const ControlLaw& law,
                                           double n, double dt) {
    return {initial, law, n, dt, propagate_segment(initial, law, n, dt)};
}

double scaled_error(const HillState& a, const HillState& b, double radius, double n) {
    const double pos = (a.position() - b.position()).norm() / radius;
    const double vel = (a.velocity() - b.velocity()).norm() / (n * radius);
    return std::max(pos, vel);
}

}  // namespace cwseed
