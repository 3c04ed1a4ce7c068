#include "cwseed/analytic_propagator.hpp"
#include "cwseed/numeric_oracle.hpp"

#include "support.hpp"

#include <doctest.h>

#include <array>

using namespace cwseed;

namespace {

// Forced response from rest by composite 5-point Gauss-Legendre quadrature
// of the convolution  int_0^t Phi(t - tau) B a(tau) dtau.
Vec6 duhamel_quadrature(const ControlLaw& law, double n, double t, int panels) {
    static const std::array<double, 5> node{0.0, -0.5384693101056831, 0.5384693101056831,
                                            -0.9061798459386640, 0.9061798459386640};
    static const std::array<double, 5> weight{0.5688888888888889, 0.4786286704993665, 0.4786286704993665,
                                              0.2369268850561891, 0.2369268850561891};
    Vec6 sum = Vec6::Zero();
    const double h = t / panels;
    for (int p = 0; p < panels; ++p) {
        const double mid = (p + 0.5) * h;
        for (int q = 0; q < 5; ++q) {
            const double tau = mid + 0.5 * h * node[q];
            const double ang = law.alpha0 + law.k * tau;
            Vec6 impulse = Vec6::Zero();
            impulse[3] = law.accel * std::cos(law.beta) * std::cos(ang);
            impulse[4] = law.accel * std::cos(law.beta) * std::sin(ang);
            impulse[5] = law.accel * std::sin(law.beta);
            sum += 0.5 * h * weight[q] * test::cw_textbook(impulse, n, t - tau);
        }
    }
    return sum;
}

HillState random_state(test::Rng& rng, double scale, double n) {
    return {scale * rng.signed_unit(), scale * rng.signed_unit(), scale * rng.signed_unit(),
            n * scale * rng.signed_unit(), n * scale * rng.signed_unit(), n * scale * rng.signed_unit()};
}

}  // namespace

TEST_CASE("out-of-plane oscillator") {
    const OutOfPlaneState half = propagate_out_of_plane(1.0, 0.0, 0.0, 0.0, 1.0, kPi);
    CHECK(half.z == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(std::abs(half.vz) < 1e-14);
    const OutOfPlaneState forced = propagate_out_of_plane(0.0, 0.0, 1.0, kPi / 2, 1.0, kPi);
    CHECK(forced.z == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(std::abs(forced.vz) < 1e-14);
}

TEST_CASE("out-of-plane against RK4") {
    const double n = 1.2e-3, t = 900.0;
    const ControlLaw law{1e-3, 0.0, 0.0, 0.4};
    const OutOfPlaneState a = propagate_out_of_plane(0.3, -0.1, law.accel, law.beta, n, t);
    const HillState b = integrate_numeric({0, 0, 0.3, 0, 0, -0.1}, law, n, t, {10000});
    CHECK(test::rel_diff(a.z, b.z) <= 1e-9);
    CHECK(test::rel_diff(a.vz, b.vz) <= 1e-9);
}

TEST_CASE("in-plane examples") {
    const InPlaneState zero = propagate_in_plane(0, 0, 0, 0, ControlLaw{}, 1e-3, 1234.0);
    CHECK(zero.x == 0.0);
    CHECK(zero.y == 0.0);
    CHECK(zero.vx == 0.0);
    CHECK(zero.vy == 0.0);

    const InPlaneState free = propagate_in_plane(1, 0, 0, 0, ControlLaw{}, 1e-3, 500.0);
    const Vec6 stm = test::cw_textbook((Vec6() << 1, 0, 0, 0, 0, 0).finished(), 1e-3, 500.0);
    CHECK(std::abs(free.x - stm[0]) <= 1e-12);
    CHECK(std::abs(free.y - stm[1]) <= 1e-12);
    CHECK(std::abs(free.vx - stm[3]) <= 1e-12);
    CHECK(std::abs(free.vy - stm[4]) <= 1e-12);

    const double n = 1.16e-3, t = 2000.0;
    const ControlLaw law{1e-6, 0.7, 2.5e-4, 0.0};
    const InPlaneState a = propagate_in_plane(0.5, 1e-4, -2.0, -5e-4, law, n, t);
    const HillState b = integrate_numeric({0.5, -2.0, 0, 1e-4, -5e-4, 0}, law, n, t, {100000});
    const double pos_scale = std::hypot(b.x, b.y);
    const double vel_scale = std::hypot(b.vx, b.vy);
    CHECK(std::hypot(a.x - b.x, a.y - b.y) <= 1e-9 * pos_scale);
    CHECK(std::hypot(a.vx - b.vx, a.vy - b.vy) <= 1e-9 * vel_scale);
}

TEST_CASE("state transition matrix") {
    CHECK(cw_stm(1e-3, 0.0).isApprox(Mat6::Identity()));
    test::Rng rng(21);
    for (int i = 0; i < 50; ++i) {
        const double n = rng.uniform(1e-5, 2e-3);
        const double t = rng.uniform(0.0, 3.0 * kTwoPi / n);
        const Mat6 phi = cw_stm(n, t);
        CHECK(phi.determinant() == doctest::Approx(1.0).epsilon(1e-9));
        Vec6 v;
        for (int j = 0; j < 6; ++j) v[j] = rng.signed_unit();
        CHECK((phi * v - test::cw_textbook(v, n, t)).norm() <= 1e-9 * std::max(1.0, v.norm() * n * t));
    }
    const Vec6 e1 = (Vec6() << 1, 0, 0, 0, 0, 0).finished();
    const HillState rk = integrate_numeric(HillState::from_vector(e1), ControlLaw{}, 1e-3, 3000.0, {100000});
    CHECK((cw_stm(1e-3, 3000.0) * e1 - rk.as_vector()).norm() <= 1e-10);
}

TEST_CASE("zero thrust reduces to the transition matrix") {
    test::Rng rng(22);
    for (int i = 0; i < 100; ++i) {
        const double radius = rng.uniform(6600, 50000);
        const double n = std::sqrt(test::kMuEarth / (radius * radius * radius));
        const HillState s = random_state(rng, 10.0, n);
        ControlLaw law{0.0, rng.uniform(-3, 3), rng.uniform(-2 * n, 2 * n), rng.uniform(-1, 1)};
        const double t = rng.uniform(0, kTwoPi / n);
        const Vec6 a = propagate_segment(s, law, n, t).as_vector();
        const Vec6 b = cw_stm(n, t) * s.as_vector();
        CHECK(test::scaled(a, b, radius, n) <= 1e-12);
    }
}

TEST_CASE("zero duration returns the state exactly") {
    const HillState s{1.5, -2.25, 0.125, 1e-3, -2e-3, 3e-4};
    CHECK(propagate_segment(s, {1e-5, 0.3, 1e-3, 0.2}, 1e-3, 0.0) == s);
}

TEST_CASE("forced response matches a quadrature of the convolution") {
    test::Rng rng(23);
    for (int i = 0; i < 40; ++i) {
        const double n = rng.uniform(1e-4, 1.2e-3);
        const double radius = std::cbrt(test::kMuEarth / (n * n));
        const double t = rng.uniform(0.1, 1.0) * kTwoPi / n;
        ControlLaw law{rng.uniform(1e-7, 1e-5), rng.uniform(-kPi, kPi), rng.uniform(-3 * n, 3 * n),
                       rng.uniform(-1.2, 1.2)};
        if (i % 4 == 0) law.k = n;
        if (i % 4 == 1) law.k = -n;
        if (i % 4 == 2) law.k = 0.0;
        const Vec6 closed = propagate_segment(HillState{}, law, n, t).as_vector();
        const Vec6 quad = duhamel_quadrature(law, n, t, 400);
        CHECK(test::scaled(closed, quad, radius, n) <= 1e-12);
    }
}

TEST_CASE("semigroup property") {
    test::Rng rng(24);
    for (int i = 0; i < 100; ++i) {
        const double n = rng.uniform(1e-4, 1.2e-3);
        const double radius = std::cbrt(test::kMuEarth / (n * n));
        const HillState s = random_state(rng, 5.0, n);
        const ControlLaw law{rng.uniform(0, 1e-5), rng.uniform(-kPi, kPi), rng.uniform(-3 * n, 3 * n),
                             rng.uniform(-1, 1)};
        const double t1 = rng.uniform(0, 3.0 / n), t2 = rng.uniform(0, 3.0 / n);
        const HillState mid = propagate_segment(s, law, n, t1);
        const Vec6 two = propagate_segment(mid, law.shifted(t1), n, t2).as_vector();
        const Vec6 one = propagate_segment(s, law, n, t1 + t2).as_vector();
        CHECK(test::scaled(two, one, radius, n) <= 1e-10);
    }
}

TEST_CASE("superposition of initial states") {
    test::Rng rng(25);
    for (int i = 0; i < 100; ++i) {
        const double n = rng.uniform(1e-4, 1.2e-3);
        const double radius = std::cbrt(test::kMuEarth / (n * n));
        const HillState s1 = random_state(rng, 5.0, n), s2 = random_state(rng, 5.0, n);
        const ControlLaw law{rng.uniform(0, 1e-5), rng.uniform(-kPi, kPi), rng.uniform(-3 * n, 3 * n),
                             rng.uniform(-1, 1)};
        const double t = rng.uniform(0, kTwoPi / n);
        const Vec6 diff = propagate_segment(s1, law, n, t).as_vector() - propagate_segment(s2, law, n, t).as_vector();
        const Vec6 expect = cw_stm(n, t) * (s1.as_vector() - s2.as_vector());
        CHECK(test::scaled(diff, expect, radius, n) <= 1e-11);
    }
}

TEST_CASE("steering rates near resonance vary continuously") {
    const double n = 1.1e-3;
    const double radius = std::cbrt(test::kMuEarth / (n * n));
    const HillState s{1, 2, 3, 1e-3, -1e-3, 2e-4};
    const double t = 4000.0;
    for (double k0 : {0.0, n, -n}) {
        const Vec6 at = propagate_segment(s, {1e-5, 0.4, k0, 0.3}, n, t).as_vector();
        double prev = 0.0;
        for (double eps : {1e-12, 1e-9, 1e-6}) {
            const double dk = eps * n;
            const Vec6 near = propagate_segment(s, {1e-5, 0.4, k0 + dk, 0.3}, n, t).as_vector();
            // A rate change dk tilts the thrust by at most dk t, so the
            // response is bounded by a t^2 (t + 1/n) dk.
            const double diff = test::scaled(near, at, radius, n);
            CHECK(diff <= 10.0 * 1e-5 * t * t * (t + 1.0 / n) * dk / radius + 1e-15);
            if (eps == 1e-6) CHECK(diff / prev == doctest::Approx(1000.0).epsilon(0.01));
            prev = diff;
        }
    }
}

TEST_CASE("randomized agreement with RK4") {
    test::Rng rng(26);
    for (int i = 0; i < 30; ++i) {
        const double radius = rng.uniform(6600, 60000);
        const double n = std::sqrt(test::kMuEarth / (radius * radius * radius));
        const HillState s = random_state(rng, 1e-3 * radius, n);
        const ControlLaw law{rng.uniform(0, 1e-5), rng.uniform(-kPi, kPi), rng.uniform(-3 * n, 3 * n),
                             rng.uniform(-1.5, 1.5)};
        const double t = rng.uniform(0, kTwoPi / n);
        const SegmentPropagation seg = SegmentPropagation::run(s, law, n, t);
        const HillState rk = integrate_numeric(s, law, n, t, {100000});
        CHECK(scaled_error(seg.final, rk, radius, n) <= 1e-9);
        CHECK(test::scaled(seg.final.as_vector(), rk.as_vector(), radius, n) <= 1e-9);
    }
}
