#pragma once

// Result files: control histories and trajectory samples (CSV), optimizer
// seeds and run summaries (JSON), plus re-propagation of a control history
// through the two-body integrator.

#include "cwseed/numeric_oracle.hpp"
#include "cwseed/trajectory_builder.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace cwseed {

struct ControlSample {
    double t = 0.0;      // s
    double alpha = 0.0;  // rad, unwrapped within a segment
    double beta = 0.0;   // rad
    double k = 0.0;      // rad/s
    double accel = 0.0;  // km/s^2
    int segment = 0;

    friend bool operator==(const ControlSample&, const ControlSample&) = default;
};

/// `samples_per_segment` uniform rows per segment plus a closing row at the
/// final time.
std::vector<ControlSample> control_history(const TrajectorySolution& solution,
                                           int samples_per_segment = 10);

void write_control_history(const std::vector<ControlSample>& rows, const std::filesystem::path& path);

void export_control_history(const TrajectorySolution& solution, const std::filesystem::path& path,
                            int samples_per_segment = 10);

/// Throws ParseError on a missing file, a wrong header or a malformed row.
std::vector<ControlSample> read_control_history(const std::filesystem::path& path);

struct SeedStep {
    double t_start = 0.0;
    double t_end = 0.0;
    Vec3 direction = Vec3::UnitX();  // unit inertial thrust direction
};

/// ceil(revolutions * steps_per_rev) uniform steps; each direction is taken
/// at the step midpoint.
std::vector<SeedStep> seed_steps(const TrajectorySolution& solution, int steps_per_rev);

std::string format_seed(const Scenario& scenario, const TrajectorySolution& solution,
                        int steps_per_rev);

void export_seed(const Scenario& scenario, const TrajectorySolution& solution, int steps_per_rev,
                 const std::filesystem::path& path);

struct TrajectorySample {
    double t = 0.0;
    Vec3 pos = Vec3::Zero();
    Vec3 vel = Vec3::Zero();
    double mass = 0.0;
};

/// Spacecraft mass at time t, from the delta-v accumulated over segments.
double mass_at_time(const TrajectorySolution& solution, double t);

/// max(min_rows, ceil(rows_per_rev * revolutions)) uniform samples on [0, tof].
std::vector<TrajectorySample> trajectory_samples(const TrajectorySolution& solution,
                                                 int min_rows = 1000, int rows_per_rev = 20);

void export_trajectory_samples(const TrajectorySolution& solution, const std::filesystem::path& path,
                               int min_rows = 1000, int rows_per_rev = 20);

/// Run summary as JSON text. Contains no timing data, so identical inputs
/// give identical text.
std::string format_summary(const Scenario& scenario, const TrajectorySolution& solution);

struct Repropagation {
    InertialState final;
    KeplerianElements elements;
    double tof = 0.0;
    double residual_norm = 0.0;  // boundary residual of the re-propagated end state
};

/// Integrates the full two-body problem from the scenario start, steering
/// with the control history in the spacecraft's own radial/along-track/normal
/// frame. Each row's law holds until the next row.
Repropagation repropagate(const Scenario& scenario, const std::vector<ControlSample>& controls,
                          double max_step = 20.0);

std::string format_repropagation(const Scenario& scenario, const Repropagation& result);

}  // namespace cwseed
