#pragma once

// Randomized self-checks of the closed-form propagator against the RK4
// oracle, run by `cwseed validate`.

#include <cstdint>

namespace cwseed {

struct PropertySuiteSettings {
    int cases = 1000;
    int oracle_steps = 100000;
    std::uint64_t seed = 0x5eed;
};

struct PropertySuiteReport {
    int cases = 0;
    double max_scaled_error = 0.0;       // closed form vs RK4
    double max_zero_thrust_error = 0.0;  // a = 0 vs state transition matrix
    double max_frame_error = 0.0;        // Hill -> inertial -> Hill
    double max_kepler_residual = 0.0;    // |E - e sin E - M|
};

/// Segments draw n from LEO to beyond GEO, t in [0, one period], steering
/// rates in [-3n, 3n] (every fifth case exactly 0 or +-n).
PropertySuiteReport run_property_suite(const PropertySuiteSettings& settings = {});

}  // namespace cwseed
