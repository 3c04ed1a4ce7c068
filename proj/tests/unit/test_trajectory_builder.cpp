#include "cwseed/errors.hpp"
#include "cwseed/export.hpp"
#include "cwseed/numeric_oracle.hpp"
#include "cwseed/trajectory_builder.hpp"

#include "support.hpp"

#include <doctest.h>

using namespace cwseed;

namespace {

Scenario raising(double r0, double r1, double accel, int segments, double tof_lo, double tof_hi) {
    Scenario sc;
    sc.name = "raise";
    sc.kind = ScenarioKind::Raising;
    sc.mu = test::kMuEarth;
    sc.start = KeplerianElements{r0, 0, 0, 0, 0, 0};
    sc.target = KeplerianElements{r1, 0, 0, 0, 0, 0};
    sc.spacecraft = SpacecraftParams::from_accel(100.0, accel, 3000.0);
    sc.segments = segments;
    sc.tof_bounds = {tof_lo, tof_hi};
    sc.accel_model = AccelModel::Constant;
    return sc;
}

double edelbaum(double r1, double r2) {
    return std::abs(std::sqrt(test::kMuEarth / r1) - std::sqrt(test::kMuEarth / r2));
}

}  // namespace

TEST_CASE("single zero-length segment leaves the start state") {
    Scenario sc = raising(7000, 7100, 1e-6, 1, 0, 1000);
    const ChainResult res = evaluate_chain(sc, {SegmentParams{0.0, 0.3, 0.0, 0.0}});
    const InertialState s0 = sc.start_state();
    CHECK((res.final.pos - s0.pos).norm() <= 1e-12 * s0.pos.norm());
    CHECK((res.final.vel - s0.vel).norm() <= 1e-12 * s0.vel.norm());
}

TEST_CASE("coasting one period closes the orbit") {
    Scenario sc = raising(7000, 7100, 0.0, 1, 0, 1e5);
    sc.spacecraft = SpacecraftParams::from_accel(100.0, 0.0, 3000.0);
    const double period = kTwoPi * std::sqrt(7000.0 * 7000.0 * 7000.0 / test::kMuEarth);
    const ChainResult res = evaluate_chain(sc, {SegmentParams{period, 0.0, 0.0, 0.0}});
    const InertialState s0 = sc.start_state();
    CHECK((res.final.pos - s0.pos).norm() / s0.pos.norm() <= 1e-8);
    CHECK((res.final.vel - s0.vel).norm() / s0.vel.norm() <= 1e-8);
}

TEST_CASE("splitting a segment barely moves the end point") {
    Scenario sc = raising(7000, 7100, 1e-6, 1, 0, 1e5);
    sc.start = KeplerianElements{7000, 0.0, 0.2, 0.3, 0.4, 0.5};
    const double dt = 800.0, k = 2e-4;
    const SegmentParams whole{dt, 0.7, k, 0.1};
    const SegmentParams first{dt / 2, 0.7, k, 0.1};
    const SegmentParams second{dt / 2, 0.7 + k * dt / 2, k, 0.1};
    const InertialState a = evaluate_chain(sc, {whole}).final;
    const InertialState b = evaluate_chain(sc, {first, second}).final;
    const double r = sc.start_state().pos.norm();
    const double n = std::sqrt(test::kMuEarth / (r * r * r));
    CHECK((a.pos - b.pos).norm() / r <= 1e-6);
    CHECK((a.vel - b.vel).norm() / (n * r) <= 1e-6);

    // Both stay close to the full two-body answer with the same steering.
    const AccelerationFn steer = [&](double t, const Vec3& p, const Vec3& v) {
        const Vec3 x = p.normalized(), z = p.cross(v).normalized(), y = z.cross(x);
        const double al = 0.7 + k * t;
        return Vec3(1e-6 * (std::cos(0.1) * (std::cos(al) * x + std::sin(al) * y) + std::sin(0.1) * z));
    };
    const InertialState s0 = sc.start_state();
    const CartesianState exact = integrate_two_body(s0.pos, s0.vel, steer, test::kMuEarth, dt, {20000});
    CHECK((a.pos - exact.pos).norm() / r <= 1e-6);
}

TEST_CASE("boundary residual examples") {
    Scenario sc;
    sc.kind = ScenarioKind::Rendezvous;
    sc.mu = test::kMuEarth;
    const KeplerianElements el{8000, 0.1, 0.3, 0.2, 0.1, 1.0};
    sc.start = el;
    sc.target = el;
    sc.spacecraft = SpacecraftParams::from_accel(100, 0.0, 3000);
    sc.segments = 1;
    sc.tof_bounds = {0, 0};
    CHECK(residuals(sc, {SegmentParams{}}).cwiseAbs().maxCoeff() <= 1e-12);

    Scenario up = raising(7000, 7500, 1e-6, 1, 0, 1);
    const InertialState at_target = elements_to_state({7500, 0, 0, 0, 0, 0.3}, test::kMuEarth);
    const Eigen::VectorXd r = boundary_residuals(up, at_target, 100.0);
    CHECK(r.size() == 1);
    CHECK(std::abs(r[0]) <= 1e-12);
}

TEST_CASE("trivial scenario converges at once") {
    Scenario sc;
    sc.kind = ScenarioKind::Rendezvous;
    sc.mu = test::kMuEarth;
    sc.start = KeplerianElements{8000, 0.1, 0.3, 0.2, 0.1, 1.0};
    sc.target = std::get<KeplerianElements>(sc.start);
    sc.spacecraft = SpacecraftParams::from_accel(100, 1e-6, 3000);
    sc.segments = 2;
    sc.tof_bounds = {0, 0};
    SolverSettings st;
    st.tol = 1e-10;
    const TrajectorySolution sol = solve_scenario(sc, default_initial_guess(sc), st);
    CHECK(sol.converged);
    CHECK(sol.iterations <= 2);
    CHECK(sol.residual_norm <= 1e-10);
}

TEST_CASE("initial guess conventions") {
    const Scenario up = raising(7000, 8000, 1e-6, 6, 1000, 3000);
    for (const SegmentParams& p : default_initial_guess(up)) {
        CHECK(p.alpha0 == doctest::Approx(kPi / 2));
        CHECK(p.beta == 0.0);
        CHECK(p.k == 0.0);
        CHECK(p.dt == doctest::Approx(2000.0 / 6));
    }
    const Scenario down = raising(8000, 7000, 1e-6, 3, 1000, 3000);
    for (const SegmentParams& p : default_initial_guess(down)) CHECK(p.alpha0 == doctest::Approx(-kPi / 2));

    // SMA grows segment by segment along the guessed spiral.
    const Scenario spiral = raising(7000, 7400, 1e-6, 20, 0.5 * 86400, 0.5 * 86400);
    const ChainResult chain = evaluate_chain(spiral, default_initial_guess(spiral), {0.05, 8, true});
    double prev = 0.0;
    for (const SegmentRecord& seg : chain.segments) {
        const double sma = state_to_elements(hill_to_inertial(seg.end, seg.ref, seg.dt), test::kMuEarth).sma;
        CHECK(sma > prev);
        prev = sma;
    }
}

TEST_CASE("LEO raise delta-v matches the Edelbaum value") {
    const double r1 = 6378.137 + 300.0, r2 = 6378.137 + 400.0;
    const Scenario sc = raising(r1, r2, 9.81e-7, 40, 0.3 * 86400, 1.5 * 86400);
    const TrajectorySolution sol = solve_sectioned(sc, SolverSettings{}, 1);
    CHECK(sol.converged);
    const double oracle = edelbaum(r1, r2);
    CHECK(oracle == doctest::Approx(0.0573).epsilon(2e-3));
    CHECK(std::abs(sol.delta_v / oracle - 1.0) <= 0.10);
    CHECK(sol.continuity_error() <= 1e-10);
}

TEST_CASE("small raise survives two-body re-propagation") {
    SolverSettings st;
    const Scenario sc = raising(7000, 7020, 1e-6, 8, 5000, 16000);
    const TrajectorySolution sol = solve_sectioned(sc, st, 1);
    REQUIRE(sol.converged);
    const Repropagation rp = repropagate(sc, control_history(sol, 10), 1.0);
    CHECK(rp.residual_norm <= 10.0 * st.tol);
}

TEST_CASE("solver is deterministic") {
    const Scenario sc = raising(7000, 7300, 1e-5, 12, 0.1 * 86400, 0.3 * 86400);
    const TrajectorySolution a = solve_scenario(sc, default_initial_guess(sc), SolverSettings{});
    const TrajectorySolution b = solve_scenario(sc, default_initial_guess(sc), SolverSettings{});
    CHECK(a.params == b.params);
    CHECK(a.final == b.final);
    CHECK(a.trace == b.trace);
}

TEST_CASE("unconverged solutions keep continuity") {
    Scenario sc = raising(7000, 9000, 1e-6, 12, 0.1 * 86400, 0.2 * 86400);
    SolverSettings st;
    st.max_iterations = 1;
    st.continuation_stages = 0;
    try {
        solve_scenario(sc, default_initial_guess(sc), st);
        FAIL("expected NoConvergence");
    } catch (const NoConvergence& e) {
        CHECK_FALSE(e.best().converged);
        CHECK(e.best().continuity_error() <= 1e-10);
        CHECK(e.best().segments.size() >= 12);
    }
}

TEST_CASE("Earth-Mars residual decreases on every accepted step") {
    auto deg = [](double d) { return d * kPi / 180.0; };
    Scenario sc;
    sc.kind = ScenarioKind::Rendezvous;
    sc.mu = test::kMuSun;
    sc.start = KeplerianElements::from_longitude_of_perihelion(kAstronomicalUnit, 0.0167, deg(0.00005),
                                                               deg(-11.2606), deg(102.9471), deg(194.72));
    sc.target = KeplerianElements::from_longitude_of_perihelion(1.5236 * kAstronomicalUnit, 0.0934, deg(1.8506),
                                                                deg(49.5785), deg(336.0408), deg(201.99));
    sc.spacecraft = SpacecraftParams::from_thrust(1000, 0.098, 2800);
    sc.segments = 50;
    sc.tof_bounds = {900 * kSecondsPerDay, 1050 * kSecondsPerDay};
    const TrajectorySolution sol = solve_scenario(sc, default_initial_guess(sc), SolverSettings{});
    REQUIRE(sol.trace.size() > 2);
    for (std::size_t i = 1; i < sol.trace.size(); ++i) CHECK(sol.trace[i] < sol.trace[i - 1]);
    CHECK(sol.continuity_error() <= 1e-10);
}

TEST_CASE("section partition") {
    Scenario sc = raising(6678.137, 42165.0, 9.81e-7, 100, 50 * 86400, 70 * 86400);
    const std::vector<Scenario> one = partition_sections(sc, 1);
    REQUIRE(one.size() == 1);
    CHECK(one.front() == sc);

    const std::vector<Scenario> parts = partition_sections(sc, 5);
    REQUIRE(parts.size() == 5);
    int total = 0;
    double prev = 6678.137;
    for (const Scenario& p : parts) {
        CHECK(p.target.sma > prev);
        prev = p.target.sma;
        total += p.segments;
    }
    CHECK(parts.back().target.sma == 42165.0);
    CHECK(total == 100);
    CHECK(spiral_revolutions(sc) == doctest::Approx(370).epsilon(0.05));
    CHECK(default_section_count(sc) == 15);
}

TEST_CASE("sectioned solution is continuous") {
    const Scenario sc = raising(7000, 7600, 1e-5, 24, 0.2 * 86400, 0.6 * 86400);
    const TrajectorySolution sol = solve_sectioned(sc, SolverSettings{}, 3);
    CHECK(sol.converged);
    CHECK(sol.sections == 3);
    CHECK(sol.continuity_error() <= 1e-10);
    CHECK(state_to_elements(sol.final, test::kMuEarth).sma == doctest::Approx(7600).epsilon(1e-5));
    CHECK(std::abs(sol.delta_v / edelbaum(7000, 7600) - 1.0) <= 0.10);
}

TEST_CASE("scenario validation") {
    Scenario sc = raising(7000, 7600, 1e-6, 24, 100, 50);
    CHECK_THROWS_AS(sc.validate(), ValidationError);
    sc = raising(7000, 7600, 1e-6, 0, 50, 100);
    CHECK_THROWS_AS(sc.validate(), ValidationError);
    sc = raising(7000, -1, 1e-6, 4, 50, 100);
    CHECK_THROWS_AS(sc.validate(), ValidationError);
}
