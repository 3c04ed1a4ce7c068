#include "cwseed/errors.hpp"
#include "cwseed/frames.hpp"

#include "support.hpp"

#include <doctest.h>

using namespace cwseed;

namespace {

double deg(double d) { return d * kPi / 180.0; }

double angle_diff(double a, double b) { return std::abs(wrap_angle(a - b)); }

double bisect_kepler(double M, double e) {
    double lo = M - e - 1e-12, hi = M + e + 1e-12;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid - e * std::sin(mid) - M > 0.0) hi = mid; else lo = mid;
    }
    return 0.5 * (lo + hi);
}

KeplerianElements random_elements(test::Rng& rng) {
    return {rng.uniform(6700, 60000), rng.uniform(0.001, 0.9), rng.uniform(0.01, kPi - 0.01),
            rng.uniform(-kPi, kPi), rng.uniform(-kPi, kPi), rng.uniform(-kPi, kPi)};
}

}  // namespace

TEST_CASE("circular equatorial elements") {
    const double r = 7000.0;
    const InertialState s = elements_to_state({r, 0, 0, 0, 0, 0}, test::kMuEarth);
    CHECK((s.pos - Vec3(r, 0, 0)).norm() < 1e-9);
    CHECK((s.vel - Vec3(0, std::sqrt(test::kMuEarth / r), 0)).norm() < 1e-12);
    const KeplerianElements el = state_to_elements(s, test::kMuEarth);
    CHECK(el.ecc <= 1e-12);
    CHECK(el.sma == doctest::Approx(r).epsilon(1e-12));
}

TEST_CASE("GEO radius circular state") {
    const double r = 42165.0;
    const InertialState s{Vec3(0, r, 0), Vec3(-std::sqrt(test::kMuEarth / r), 0, 0), 0.0};
    CHECK(state_to_elements(s, test::kMuEarth).sma == doctest::Approx(42165.0).epsilon(1e-6));
}

TEST_CASE("Earth departure state lies between perihelion and aphelion") {
    const auto el = KeplerianElements::from_longitude_of_perihelion(kAstronomicalUnit, 0.0167, deg(0.00005),
                                                                    deg(-11.2606), deg(102.9471), deg(194.72));
    const double r = elements_to_state(el, test::kMuSun).pos.norm();
    CHECK(r >= kAstronomicalUnit * (1 - 0.0167));
    CHECK(r <= kAstronomicalUnit * (1 + 0.0167));
    CHECK(el.argp == doctest::Approx(deg(102.9471 + 11.2606)));
}

TEST_CASE("elements and state are inverse") {
    test::Rng rng(31);
    for (int i = 0; i < 1000; ++i) {
        const KeplerianElements el = random_elements(rng);
        const InertialState s = elements_to_state(el, test::kMuEarth);
        const KeplerianElements back = state_to_elements(s, test::kMuEarth);
        CHECK(std::abs(back.sma - el.sma) / el.sma <= 1e-9);
        CHECK(std::abs(back.ecc - el.ecc) <= 1e-9);
        CHECK(angle_diff(back.inc, el.inc) <= 1e-9);
        CHECK(angle_diff(back.raan, el.raan) <= 1e-9);
        CHECK(angle_diff(back.argp, el.argp) <= 1e-9);
        CHECK(angle_diff(back.nu, el.nu) <= 1e-9);
        const InertialState again = elements_to_state(back, test::kMuEarth);
        CHECK(again.pos.cross(again.vel).normalized().dot(s.pos.cross(s.vel).normalized()) ==
              doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("degenerate states are rejected") {
    CHECK_THROWS_AS(state_to_elements({Vec3(7000, 0, 0), Vec3(3, 0, 0), 0}, test::kMuEarth), DegenerateOrbit);
    CHECK_THROWS_AS(state_to_elements({Vec3(7000, 0, 0), Vec3(0, 20, 0), 0}, test::kMuEarth), DegenerateOrbit);
}

TEST_CASE("Kepler equation") {
    CHECK(solve_kepler(0.0, 0.5) == 0.0);
    CHECK(solve_kepler(1.234, 0.0) == 1.234);
    const double E = solve_kepler(kPi / 2, 0.0934);
    CHECK(std::abs(E - 0.0934 * std::sin(E) - kPi / 2) <= 1e-12);
    CHECK(std::abs(E - bisect_kepler(kPi / 2, 0.0934)) <= 1e-13);
    double worst = 0.0, worst_oracle = 0.0;
    for (int i = 0; i < 100; ++i) {
        const double M = -kPi + kTwoPi * i / 99.0;
        for (int j = 0; j < 100; ++j) {
            const double e = 0.95 * j / 99.0;
            const double Ei = solve_kepler(M, e);
            worst = std::max(worst, std::abs(Ei - e * std::sin(Ei) - M));
            worst_oracle = std::max(worst_oracle, std::abs(Ei - bisect_kepler(M, e)));
        }
    }
    CHECK(worst <= 1e-12);
    CHECK(worst_oracle <= 1e-12);
}

TEST_CASE("anomaly conversions are inverse") {
    test::Rng rng(32);
    for (int i = 0; i < 200; ++i) {
        const double e = rng.uniform(0, 0.95), nu = rng.uniform(-kPi, kPi);
        CHECK(angle_diff(mean_to_true_anomaly(true_to_mean_anomaly(nu, e), e), nu) <= 1e-10);
    }
}

TEST_CASE("target propagation") {
    const KeplerianElements el{9000.0, 0.2, 0.3, 0.4, 0.5, 0.6};
    const InertialState s0 = elements_to_state(el, test::kMuEarth);
    const InertialState same = propagate_target(el, test::kMuEarth, 0.0);
    CHECK((same.pos - s0.pos).norm() <= 1e-9);
    const double period = kTwoPi * std::sqrt(el.sma * el.sma * el.sma / test::kMuEarth);
    const InertialState loop = propagate_target(el, test::kMuEarth, period);
    CHECK((loop.pos - s0.pos).norm() / s0.pos.norm() <= 1e-9);
    CHECK((loop.vel - s0.vel).norm() / s0.vel.norm() <= 1e-9);

    const auto mars = KeplerianElements::from_longitude_of_perihelion(1.5236 * kAstronomicalUnit, 0.0934,
                                                                      deg(1.8506), deg(49.5785), deg(336.0408),
                                                                      deg(201.99));
    const double r = propagate_target(mars, test::kMuSun, 965.33 * kSecondsPerDay).pos.norm() / kAstronomicalUnit;
    CHECK(r >= 1.5236 * (1 - 0.0934));
    CHECK(r <= 1.5236 * (1 + 0.0934));
}

TEST_CASE("Hill frame conversions") {
    const double radius = 7000.0;
    const ReferenceOrbit ref = ReferenceOrbit::equatorial(test::kMuEarth, radius);
    const InertialState origin = hill_to_inertial(HillState{}, ref, 0.0);
    CHECK((origin.pos - Vec3(radius, 0, 0)).norm() < 1e-12);
    CHECK(origin.vel.norm() == doctest::Approx(circular_speed(test::kMuEarth, radius)).epsilon(1e-15));
    const InertialState out = hill_to_inertial(HillState{2.5, 0, 0, 0, 0, 0}, ref, 0.0);
    CHECK(out.pos.norm() == radius + 2.5);

    test::Rng rng(33);
    for (int i = 0; i < 1000; ++i) {
        Mat3 triad = Eigen::Quaterniond::UnitRandom().toRotationMatrix();
        const double r = rng.uniform(6700, 50000);
        const ReferenceOrbit rr(test::kMuEarth, r, triad);
        const double n = rr.mean_motion();
        const HillState h{rng.signed_unit() * 50, rng.signed_unit() * 50, rng.signed_unit() * 50,
                          rng.signed_unit() * 0.05, rng.signed_unit() * 0.05, rng.signed_unit() * 0.05};
        const double t = rng.uniform(0, 2 * rr.period());
        const HillState back = inertial_to_hill(hill_to_inertial(h, rr, t), rr, t);
        CHECK(test::scaled(back.as_vector(), h.as_vector(), r, n) <= 1e-10);
    }
}

TEST_CASE("re-centering") {
    const double r = 7000.0;
    const InertialState circ{Vec3(0, r, 0), Vec3(-circular_speed(test::kMuEarth, r), 0, 0), 0};
    const auto [ref0, h0] = recenter_reference(circ, test::kMuEarth);
    CHECK(h0.velocity().cwiseAbs().maxCoeff() <= 1e-12);

    test::Rng rng(34);
    for (int i = 0; i < 1000; ++i) {
        const InertialState s = elements_to_state(random_elements(rng), test::kMuEarth);
        const auto [ref, h] = recenter_reference(s, test::kMuEarth);
        CHECK(h.position().norm() == 0.0);
        const InertialState back = hill_to_inertial(h, ref, 0.0);
        CHECK((back.pos - s.pos).norm() / s.pos.norm() <= 1e-10);
        CHECK((back.vel - s.vel).norm() / (ref.mean_motion() * s.pos.norm()) <= 1e-10);
    }
    CHECK_THROWS_AS(recenter_reference({Vec3(7000, 0, 0), Vec3(1, 0, 0), 0}, test::kMuEarth), DegenerateOrbit);
}
