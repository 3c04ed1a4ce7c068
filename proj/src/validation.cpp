#include "cwseed/validation.hpp"

#include "cwseed/analytic_propagator.hpp"
#include "cwseed/frames.hpp"
#include "cwseed/numeric_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace cwseed {

PropertySuiteReport run_property_suite(const PropertySuiteSettings& settings) {
    constexpr double mu = 398600.4418;
    std::mt19937_64 rng(settings.seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::uniform_real_distribution<double> frac(0.0, 1.0);

    PropertySuiteReport report;
    report.cases = settings.cases;
    for (int i = 0; i < settings.cases; ++i) {
        const double radius = 6678.0 * std::pow(10.0, frac(rng));
        const ReferenceOrbit ref(mu, radius, Mat3::Identity());
        const double n = ref.mean_motion();
        const double dt = frac(rng) * kTwoPi / n;
        const double dr = 1e-3 * radius;
        const HillState s{dr * unit(rng), dr * unit(rng), dr * unit(rng),
                          n * dr * unit(rng), n * dr * unit(rng), n * dr * unit(rng)};
        ControlLaw law{1e-5 * frac(rng), kPi * unit(rng), 3.0 * n * unit(rng), 0.5 * kPi * unit(rng)};
        switch (i % 5) {
            case 0: law.k = 0.0; break;
            case 1: law.k = n; break;
            case 2: law.k = -n; break;
            default: break;
        }

        const HillState analytic = propagate_segment(s, law, n, dt);
        const HillState numeric = integrate_numeric(s, law, n, dt, {settings.oracle_steps});
        report.max_scaled_error = std::max(report.max_scaled_error, scaled_error(analytic, numeric, radius, n));

        ControlLaw coast = law;
        coast.accel = 0.0;
        const HillState free = HillState::from_vector(cw_stm(n, dt) * s.as_vector());
        report.max_zero_thrust_error =
            std::max(report.max_zero_thrust_error, scaled_error(propagate_segment(s, coast, n, dt), free, radius, n));

        const HillState back = inertial_to_hill(hill_to_inertial(s, ref, dt), ref, dt);
        report.max_frame_error = std::max(report.max_frame_error, scaled_error(back, s, radius, n));

        const double M = kPi * unit(rng);
        const double e = 0.95 * frac(rng);
        const double E = solve_kepler(M, e);
        report.max_kepler_residual = std::max(report.max_kepler_residual, std::abs(E - e * std::sin(E) - M));
    }
    return report;
}

}  // namespace cwseed
