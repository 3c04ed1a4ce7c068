#pragma once

// Multi-segment trajectories: each segment is propagated in closed form
// about a circular reference orbit re-centered at its start point, and the
// per-segment steering is solved so the chain meets the scenario's boundary
// conditions.

#include "cwseed/analytic_propagator.hpp"
#include "cwseed/errors.hpp"
#include "cwseed/frames.hpp"
#include "cwseed/levenberg_marquardt.hpp"
#include "cwseed/performance.hpp"

#include <Eigen/Dense>

#include <limits>
#include <string>
#include <variant>
#include <vector>

namespace cwseed {

enum class ScenarioKind { Rendezvous, Insertion, Phasing, Raising };

/// How the thrust acceleration evolves across sections.
enum class AccelModel {
    Constant,           // a = a0 for the whole transfer
    RefreshPerSection,  // a = T / m at the start of every section
};

enum class SectionSpacing { Geometric, EqualRevolutions };

const char* to_string(ScenarioKind kind);
const char* to_string(AccelModel model);
const char* to_string(SectionSpacing spacing);

struct TofBounds {
    double min = 0.0;  // s
    double max = 0.0;  // s
    double midpoint() const { return 0.5 * (min + max); }

    friend bool operator==(const TofBounds&, const TofBounds&) = default;
};

struct Scenario {
    std::string name;
    std::string epoch_label;  // calendar metadata only
    ScenarioKind kind = ScenarioKind::Raising;
    double mu = 0.0;
    std::variant<KeplerianElements, InertialState> start;
    /// Target orbit (Insertion, Raising: only sma is used) or the target
    /// body's elements at the scenario epoch (Rendezvous).
    KeplerianElements target;
    double phase_offset = 0.0;  // Phasing: target leads the start by this mean anomaly
    SpacecraftParams spacecraft;
    int segments = 1;
    TofBounds tof_bounds;
    double length_scale = 0.0;  // 0: start radius
    AccelModel accel_model = AccelModel::RefreshPerSection;
    int sections = 0;           // 0: automatic
    SectionSpacing spacing = SectionSpacing::Geometric;

    InertialState start_state() const;
    double length() const;
    /// Throws ValidationError on an inconsistent scenario.
    void validate() const;

    friend bool operator==(const Scenario&, const Scenario&) = default;
};

/// Per-segment decision variables.
struct SegmentParams {
    double dt = 0.0;      // s
    double alpha0 = 0.0;  // rad
    double k = 0.0;       // rad/s
    double beta = 0.0;    // rad

    friend bool operator==(const SegmentParams&, const SegmentParams&) = default;
};

struct SegmentRecord {
    int param_index = 0;  // index into the SegmentParams that produced it
    double epoch = 0.0;   // s past scenario start
    ReferenceOrbit ref;
    ControlLaw law;
    double dt = 0.0;
    HillState start;
    HillState end;
};

struct TrajectorySolution {
    std::vector<SegmentRecord> segments;
    std::vector<SegmentParams> params;
    std::vector<InertialState> samples;
    InertialState start;
    InertialState final;
    SpacecraftParams spacecraft;
    double tof = 0.0;          // s
    double delta_v = 0.0;      // km/s
    double final_mass = 0.0;   // kg
    double propellant = 0.0;   // kg
    double revolutions = 0.0;
    double residual_norm = 0.0;
    int iterations = 0;
    int sections = 1;
    bool converged = false;
    std::vector<double> trace;

    /// Inertial state at time t (clamped to [0, tof]) from the segment that
    /// contains it.
    InertialState state_at(double t) const;
    /// Thrust acceleration magnitude in effect at time t.
    double accel_at(double t) const;
    /// Largest continuity gap between consecutive segments, scaled by radius.
    double continuity_error() const;
};

/// Returned by solve_scenario when the residual tolerance is not met.
class NoConvergence : public Error {
public:
    NoConvergence(const std::string& what, TrajectorySolution best)
        : Error(what), best_(std::move(best)) {}
    const TrajectorySolution& best() const noexcept { return best_; }

private:
    TrajectorySolution best_;
};

struct SolverSettings {
    double tol = 1e-6;
    int max_iterations = 200;
    double fd_relative_step = 1e-7;
    double fd_min_step = 1e-7;
    double initial_damping = 1e-3;
    int threads = 0;
    /// Newton-homotopy stages used when the direct solve fails (0 disables).
    int continuation_stages = 8;
    /// Segments whose mid-point Hill offset exceeds this fraction of the
    /// reference radius are bisected.
    double deviation_limit = 0.05;
    int max_bisections = 8;
    int samples_per_segment = 8;

    friend bool operator==(const SolverSettings&, const SolverSettings&) = default;
};

struct ChainOptions {
    double deviation_limit = 0.05;
    int max_bisections = 8;
    bool record = false;
};

struct ChainResult {
    InertialState final;
    std::vector<SegmentRecord> segments;
    int bisections = 0;
};

ChainResult evaluate_chain(const Scenario& scenario, const std::vector<SegmentParams>& params,
                           const ChainOptions& options = {});

/// Nondimensional boundary-condition miss of the chain's final state.
Eigen::VectorXd residuals(const Scenario& scenario, const std::vector<SegmentParams>& params,
                          const ChainOptions& options = {});

/// Boundary residuals for a given final state and flight time.
Eigen::VectorXd boundary_residuals(const Scenario& scenario, const InertialState& final, double tof);

std::vector<SegmentParams> default_initial_guess(const Scenario& scenario);

TrajectorySolution solve_scenario(const Scenario& scenario, const std::vector<SegmentParams>& init,
                                  const SolverSettings& settings);

/// Builds the solution record (samples and performance) for fixed params.
TrajectorySolution build_solution(const Scenario& scenario, const std::vector<SegmentParams>& params,
                                  const SolverSettings& settings);

/// Sub-scenarios on a monotone SMA schedule. Starts after the first are
/// nominal circular states; solve_sectioned replaces them with the previous
/// section's solved final state.
std::vector<Scenario> partition_sections(const Scenario& scenario, int sections);

/// Section count used when scenario.sections == 0.
int default_section_count(const Scenario& scenario);

/// Estimated revolutions of a tangential spiral from the start radius to the
/// target SMA at constant acceleration.
double spiral_revolutions(const Scenario& scenario);

/// Solves all sections in order and concatenates them. Rendezvous and
/// Phasing scenarios are always solved as one section.
TrajectorySolution solve_sectioned(const Scenario& scenario, const SolverSettings& settings,
                                   int sections = 0);

double count_revolutions(const TrajectorySolution& solution);

}  // namespace cwseed
