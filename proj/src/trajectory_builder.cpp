#include "cwseed/trajectory_builder.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cwseed {

const char* to_string(ScenarioKind kind) {
    switch (kind) {
        case ScenarioKind::Rendezvous: return "rendezvous";
        case ScenarioKind::Insertion: return "insertion";
        case ScenarioKind::Phasing: return "phasing";
        case ScenarioKind::Raising: return "raising";
    }
    return "unknown";
}

const char* to_string(AccelModel model) {
    return model == AccelModel::Constant ? "constant" : "refresh_per_section";
}

const char* to_string(SectionSpacing spacing) {
    return spacing == SectionSpacing::Geometric ? "geometric" : "equal_revolutions";
}

// ---------------------------------------------------------------------------
// Scenario
// ---------------------------------------------------------------------------

InertialState Scenario::start_state() const {
    if (const auto* el = std::get_if<KeplerianElements>(&start)) return elements_to_state(*el, mu);
    InertialState s = std::get<InertialState>(start);
    s.epoch = 0.0;
    return s;
}

double Scenario::length() const {
    return length_scale > 0.0 ? length_scale : start_state().pos.norm();
}

void Scenario::validate() const {
    if (!(mu > 0.0)) throw ValidationError("mu", "must be positive");
    if (segments < 1) throw ValidationError("segments", "must be at least 1");
    if (!(tof_bounds.min >= 0.0) || !(tof_bounds.max >= tof_bounds.min))
        throw ValidationError("tof_bounds", "need 0 <= min <= max");
    if (!(spacecraft.m0 > 0.0)) throw ValidationError("spacecraft.m0", "must be positive");
    if (!(spacecraft.isp > 0.0)) throw ValidationError("spacecraft.isp", "must be positive");
    if (!(spacecraft.accel >= 0.0)) throw ValidationError("spacecraft.accel", "must be nonnegative");
    if (sections < 0) throw ValidationError("sections", "must be nonnegative");
    if (const auto* el = std::get_if<KeplerianElements>(&start)) {
        if (!(el->sma > 0.0) || !(el->ecc >= 0.0 && el->ecc < 1.0))
            throw ValidationError("start", "elements must describe an ellipse");
    } else if (!(std::get<InertialState>(start).pos.norm() > 0.0)) {
        throw ValidationError("start", "position must be nonzero");
    }
    if (kind != ScenarioKind::Phasing) {
        if (!(target.sma > 0.0)) throw ValidationError("target.sma", "must be positive");
        if (!(target.ecc >= 0.0 && target.ecc < 1.0))
            throw ValidationError("target.ecc", "must satisfy 0 <= e < 1");
    }
}

// ---------------------------------------------------------------------------
// Chain evaluation
// ---------------------------------------------------------------------------

namespace {

struct ChainWalker {
    double mu;
    const ChainOptions& options;
    ChainResult& out;

    InertialState piece(const InertialState& state, const ControlLaw& law, double dt, int index,
                        int depth) {
        auto [ref, h0] = recenter_reference(state, mu);
        const double n = ref.mean_motion();
        if (dt > 0.0 && depth < options.max_bisections) {
            const HillState mid = propagate_segment(h0, law, n, 0.5 * dt);
            if (mid.position().norm() > options.deviation_limit * ref.radius()) {
                ++out.bisections;
                const InertialState half = piece(state, law, 0.5 * dt, index, depth + 1);
                return piece(half, law.shifted(0.5 * dt), 0.5 * dt, index, depth + 1);
            }
        }
        const HillState h1 = propagate_segment(h0, law, n, dt);
        InertialState next = hill_to_inertial(h1, ref, dt);
        next.epoch = state.epoch + dt;
        if (options.record) out.segments.push_back({index, state.epoch, ref, law, dt, h0, h1});
        return next;
    }
};

ControlLaw law_for(const SegmentParams& p, double accel) {
    return ControlLaw{accel, p.alpha0, p.k, p.beta}.normalized();
}

double total_tof(const std::vector<SegmentParams>& params) {
    double t = 0.0;
    for (const auto& p : params) t += p.dt;
    return t;
}

}  // namespace

namespace {

// Runs segments [first, params.size()) from `state`, which must be the
// chain state at the start of segment `first`.
InertialState chain_from(const Scenario& scenario, const std::vector<SegmentParams>& params,
                         std::size_t first, InertialState state, const ChainOptions& options,
                         ChainResult& out) {
    ChainWalker walker{scenario.mu, options, out};
    for (std::size_t i = first; i < params.size(); ++i) {
        if (!(params[i].dt >= 0.0)) throw ValidationError("dt", "segment duration must be nonnegative");
        state = walker.piece(state, law_for(params[i], scenario.spacecraft.accel), params[i].dt,
                             static_cast<int>(i), 0);
    }
    return state;
}

}  // namespace

ChainResult evaluate_chain(const Scenario& scenario, const std::vector<SegmentParams>& params,
                           const ChainOptions& options) {
    ChainResult out;
    if (options.record) out.segments.reserve(params.size());
    out.final = chain_from(scenario, params, 0, scenario.start_state(), options, out);
    return out;
}

// ---------------------------------------------------------------------------
// Residuals
// ---------------------------------------------------------------------------

Eigen::VectorXd boundary_residuals(const Scenario& scenario, const InertialState& final, double tof) {
    const double L = scenario.length();
    switch (scenario.kind) {
        case ScenarioKind::Rendezvous: {
            const InertialState tgt = propagate_target(scenario.target, scenario.mu, tof);
            const double vscale = L * std::sqrt(scenario.mu / (L * L * L));
            Eigen::VectorXd r(6);
            r.head<3>() = (final.pos - tgt.pos) / L;
            r.tail<3>() = (final.vel - tgt.vel) / vscale;
            return r;
        }
        case ScenarioKind::Phasing: {
            KeplerianElements lead = state_to_elements(scenario.start_state(), scenario.mu);
            const double m0 = true_to_mean_anomaly(lead.nu, lead.ecc);
            lead.nu = mean_to_true_anomaly(wrap_angle(m0 + scenario.phase_offset), lead.ecc);
            const InertialState tgt = propagate_target(lead, scenario.mu, tof);
            return (final.pos - tgt.pos) / L;
        }
        case ScenarioKind::Insertion: {
            const KeplerianElements el = state_to_elements(final, scenario.mu);
            Eigen::VectorXd r(4);
            r[0] = (el.sma - scenario.target.sma) / L;
            r[1] = el.ecc - scenario.target.ecc;
            r[2] = el.inc - scenario.target.inc;
            r[3] = wrap_angle(el.raan - scenario.target.raan) * std::sin(el.inc);
            return r;
        }
        case ScenarioKind::Raising: {
            const KeplerianElements el = state_to_elements(final, scenario.mu);
            Eigen::VectorXd r(1);
            r[0] = (el.sma - scenario.target.sma) / L;
            return r;
        }
    }
    throw ValidationError("kind", "unknown scenario kind");
}

Eigen::VectorXd residuals(const Scenario& scenario, const std::vector<SegmentParams>& params,
                          const ChainOptions& options) {
    ChainOptions opts = options;
    opts.record = false;
    const ChainResult chain = evaluate_chain(scenario, params, opts);
    return boundary_residuals(scenario, chain.final, total_tof(params));
}

// ---------------------------------------------------------------------------
// Initial guess
// ---------------------------------------------------------------------------

namespace {

Vec3 plane_normal(const KeplerianElements& el) {
    return {std::sin(el.inc) * std::sin(el.raan), -std::sin(el.inc) * std::cos(el.raan),
            std::cos(el.inc)};
}

double start_sma(const Scenario& scenario) {
    return state_to_elements(scenario.start_state(), scenario.mu).sma;
}

}  // namespace

std::vector<SegmentParams> default_initial_guess(const Scenario& scenario) {
    scenario.validate();
    const int m = scenario.segments;
    const double tof = scenario.tof_bounds.midpoint();
    const double dt = tof / m;
    const InertialState s0 = scenario.start_state();
    const double a0 = start_sma(scenario);

    bool outward = true;
    if (scenario.kind == ScenarioKind::Phasing)
        outward = scenario.phase_offset <= 0.0;
    else
        outward = scenario.target.sma >= a0;
    const double alpha0 = outward ? kPi / 2 : -kPi / 2;

    std::vector<SegmentParams> guess(static_cast<std::size_t>(m), SegmentParams{dt, alpha0, 0.0, 0.0});

    const bool plane_target =
        scenario.kind == ScenarioKind::Insertion || scenario.kind == ScenarioKind::Rendezvous;
    const double available_dv = scenario.spacecraft.accel * tof;
    if (!plane_target || !(available_dv > 0.0)) return guess;

    const Vec3 hs = s0.pos.cross(s0.vel).normalized();
    const Vec3 ht = plane_normal(scenario.target);
    const double rel_inc = std::atan2(hs.cross(ht).norm(), hs.dot(ht));
    if (rel_inc <= 1e-10) return guess;

    // Out-of-plane share of the thrust sized for a sign-switching plane
    // change at the mean circular speed.
    const double r0 = s0.pos.norm();
    const double v_mean = 0.5 * (circular_speed(scenario.mu, r0) + circular_speed(scenario.mu, scenario.target.sma));
    const double share = std::min(0.5, 0.5 * kPi * v_mean * rel_inc / available_dv);
    const double beta_mag = std::asin(share);

    // Predicted angular position with mean motion interpolated linearly
    // between the start and target radii.
    const double n_s = std::sqrt(scenario.mu / (r0 * r0 * r0));
    const double n_t = std::sqrt(scenario.mu / std::pow(scenario.target.sma, 3));
    const Vec3 rhat = s0.pos / r0;
    const Vec3 that = hs.cross(rhat);
    for (int i = 0; i < m; ++i) {
        const double t = (i + 0.5) * dt;
        const double theta = n_s * t + (n_t - n_s) * t * t / (2.0 * tof);
        const Vec3 r = std::cos(theta) * rhat + std::sin(theta) * that;
        const double sign = r.cross(hs).dot(ht) >= 0.0 ? 1.0 : -1.0;
        guess[static_cast<std::size_t>(i)].beta = sign * beta_mag;
    }
    return guess;
}

// ---------------------------------------------------------------------------
// Solution records
// ---------------------------------------------------------------------------

InertialState TrajectorySolution::state_at(double t) const {
    if (segments.empty()) return start;
    t = std::clamp(t, 0.0, tof);
    auto it = std::upper_bound(segments.begin(), segments.end(), t,
                               [](double value, const SegmentRecord& s) { return value < s.epoch; });
    const SegmentRecord& seg = it == segments.begin() ? segments.front() : *std::prev(it);
    const double tau = std::clamp(t - seg.epoch, 0.0, seg.dt);
    const HillState h = propagate_segment(seg.start, seg.law, seg.ref.mean_motion(), tau);
    InertialState s = hill_to_inertial(h, seg.ref, tau);
    s.epoch = seg.epoch + tau;
    return s;
}

double TrajectorySolution::accel_at(double t) const {
    if (segments.empty()) return 0.0;
    auto it = std::upper_bound(segments.begin(), segments.end(), t,
                               [](double value, const SegmentRecord& s) { return value < s.epoch; });
    const SegmentRecord& seg = it == segments.begin() ? segments.front() : *std::prev(it);
    return seg.law.accel;
}

double TrajectorySolution::continuity_error() const {
    double worst = 0.0;
    for (std::size_t i = 1; i < segments.size(); ++i) {
        const SegmentRecord& a = segments[i - 1];
        const SegmentRecord& b = segments[i];
        const InertialState end = hill_to_inertial(a.end, a.ref, a.dt);
        const InertialState begin = hill_to_inertial(b.start, b.ref, 0.0);
        const double r = begin.pos.norm();
        const double v = circular_speed(b.ref.mu(), r);
        worst = std::max({worst, (end.pos - begin.pos).norm() / r, (end.vel - begin.vel).norm() / v});
    }
    return worst;
}

double count_revolutions(const TrajectorySolution& solution) {
    std::vector<Vec3> positions;
    positions.reserve(solution.samples.size());
    for (const auto& s : solution.samples) positions.push_back(s.pos);
    return count_revolutions(positions);
}

TrajectorySolution build_solution(const Scenario& scenario, const std::vector<SegmentParams>& params,
                                  const SolverSettings& settings) {
    ChainOptions opts{settings.deviation_limit, settings.max_bisections, true};
    ChainResult chain = evaluate_chain(scenario, params, opts);

    TrajectorySolution sol;
    sol.segments = std::move(chain.segments);
    sol.params = params;
    sol.start = scenario.start_state();
    sol.final = chain.final;
    sol.spacecraft = scenario.spacecraft;
    sol.tof = total_tof(params);

    sol.samples.push_back(sol.start);
    for (const auto& seg : sol.segments) {
        const double n = seg.ref.mean_motion();
        // At least 16 samples per revolution so the swept angle can be unwrapped.
        const int per_segment =
            std::max({1, settings.samples_per_segment, static_cast<int>(std::ceil(16.0 * n * seg.dt / kTwoPi))});
        for (int j = 1; j <= per_segment; ++j) {
            const double tau = seg.dt * j / per_segment;
            InertialState s = hill_to_inertial(propagate_segment(seg.start, seg.law, n, tau), seg.ref, tau);
            s.epoch = seg.epoch + tau;
            if (seg.dt > 0.0 || j == per_segment) sol.samples.push_back(s);
            if (seg.dt == 0.0) break;
        }
    }
    sol.samples.back() = sol.final;

    sol.delta_v = 0.0;
    for (const auto& seg : sol.segments) sol.delta_v += delta_v(seg.law.accel, seg.dt);
    sol.final_mass = mass_after_delta_v(scenario.spacecraft, sol.delta_v);
    sol.propellant = scenario.spacecraft.m0 - sol.final_mass;
    sol.revolutions = count_revolutions(sol);
    sol.residual_norm = boundary_residuals(scenario, sol.final, sol.tof).norm();
    return sol;
}

// ---------------------------------------------------------------------------
// Solver
// ---------------------------------------------------------------------------

namespace {

// Maps SegmentParams to O(1) solver variables:
//   dt = dt_ref s^2, alpha0, k = k_scale * k_tilde, beta.
struct VariableMap {
    std::vector<double> dt_ref;
    double k_scale = 1.0;

    Eigen::VectorXd encode(const std::vector<SegmentParams>& params) const {
        Eigen::VectorXd x(4 * static_cast<Eigen::Index>(params.size()));
        for (std::size_t i = 0; i < params.size(); ++i) {
            const auto j = 4 * static_cast<Eigen::Index>(i);
            x[j] = std::sqrt(params[i].dt / dt_ref[i]);
            x[j + 1] = params[i].alpha0;
            x[j + 2] = params[i].k / k_scale;
            x[j + 3] = params[i].beta;
        }
        return x;
    }

    SegmentParams decode_one(const Eigen::Vector4d& v, std::size_t i) const {
        return {dt_ref[i] * v[0] * v[0], v[1], v[2] * k_scale, v[3]};
    }

    std::vector<SegmentParams> decode(const Eigen::VectorXd& x) const {
        std::vector<SegmentParams> params(dt_ref.size());
        for (std::size_t i = 0; i < params.size(); ++i) {
            const auto j = 4 * static_cast<Eigen::Index>(i);
            params[i] = {dt_ref[i] * x[j] * x[j], x[j + 1], x[j + 2] * k_scale, x[j + 3]};
        }
        return params;
    }
};

double tof_penalty(const TofBounds& bounds, double tof) {
    const double scale = std::max(bounds.max, 1.0);
    return (std::max(0.0, bounds.min - tof) + std::max(0.0, tof - bounds.max)) / scale;
}

LmSettings lm_settings(const SolverSettings& s, double tol) {
    LmSettings lm;
    lm.tol = tol;
    lm.max_iterations = s.max_iterations;
    lm.fd_relative_step = s.fd_relative_step;
    lm.fd_min_step = s.fd_min_step;
    lm.initial_damping = s.initial_damping;
    lm.threads = s.threads;
    return lm;
}

}  // namespace

TrajectorySolution solve_scenario(const Scenario& scenario, const std::vector<SegmentParams>& init,
                                  const SolverSettings& settings) {
    scenario.validate();
    if (init.size() != static_cast<std::size_t>(scenario.segments))
        throw ValidationError("segments", "initial guess has " + std::to_string(init.size()) +
                                              " entries, scenario needs " +
                                              std::to_string(scenario.segments));

    VariableMap map;
    const double fallback_dt = std::max(scenario.tof_bounds.midpoint() / scenario.segments, 1.0);
    for (const auto& p : init) map.dt_ref.push_back(p.dt > 0.0 ? p.dt : fallback_dt);
    const double L = scenario.length();
    map.k_scale = std::sqrt(scenario.mu / (L * L * L));

    const ChainOptions chain_opts{settings.deviation_limit, settings.max_bisections, false};
    auto full_residual = [&](const InertialState& final, double tof) {
        const Eigen::VectorXd bc = boundary_residuals(scenario, final, tof);
        Eigen::VectorXd r(bc.size() + 1);
        r.head(bc.size()) = bc;
        r[bc.size()] = tof_penalty(scenario.tof_bounds, tof);
        return r;
    };
    const ResidualFn objective = [&](const Eigen::VectorXd& x) {
        const std::vector<SegmentParams> params = map.decode(x);
        ChainResult scratch;
        const InertialState final =
            chain_from(scenario, params, 0, scenario.start_state(), chain_opts, scratch);
        return full_residual(final, total_tof(params));
    };

    // Central differences where a perturbation of segment i only re-runs the
    // chain from segment i onward. Column values match a full re-evaluation.
    const LmSettings base_lm = lm_settings(settings, settings.tol);
    const JacobianFn structured = [&](const Eigen::VectorXd& x, const Eigen::VectorXd&) {
        const std::vector<SegmentParams> params = map.decode(x);
        std::vector<InertialState> before(params.size() + 1);
        before[0] = scenario.start_state();
        ChainResult scratch;
        // Prefix states, one segment at a time.
        {
            ChainWalker walker{scenario.mu, chain_opts, scratch};
            for (std::size_t i = 0; i < params.size(); ++i)
                before[i + 1] = walker.piece(before[i], law_for(params[i], scenario.spacecraft.accel),
                                             params[i].dt, static_cast<int>(i), 0);
        }
        return assemble_columns(
            x.size(),
            [&](Eigen::Index j) -> std::optional<Eigen::VectorXd> {
                const auto seg = static_cast<std::size_t>(j / 4);
                const double h = finite_difference_step(x[j], base_lm);
                auto probe = [&](double value) -> std::optional<Eigen::VectorXd> {
                    Eigen::Vector4d xp = x.segment<4>(4 * static_cast<Eigen::Index>(seg));
                    xp[j % 4] = value;
                    std::vector<SegmentParams> local = params;
                    local[seg] = map.decode_one(xp, seg);
                    const double local_tof = total_tof(local);
                    try {
                        ChainResult tmp;
                        const InertialState final = chain_from(scenario, local, seg, before[seg], chain_opts, tmp);
                        return full_residual(final, local_tof);
                    } catch (const Error&) {
                        return std::nullopt;
                    }
                };
                const auto plus = probe(x[j] + h);
                const auto minus = probe(x[j] - h);
                if (!plus || !minus) return std::nullopt;
                return Eigen::VectorXd((*plus - *minus) / (2.0 * h));
            },
            settings.threads);
    };

    const Eigen::VectorXd x0 = map.encode(init);
    LmResult best = levenberg_marquardt(objective, x0, base_lm, structured);
    int iterations = best.iterations;
    std::vector<double> trace = best.trace;

    if (!best.converged && settings.continuation_stages > 0) {
        // Newton homotopy H(x, s) = r(x) - (1 - s) r(x0), s: 0 -> 1.
        const Eigen::VectorXd r0 = objective(x0);
        Eigen::VectorXd x = x0;
        LmResult stage;
        std::vector<double> stage_trace;
        int stage_iterations = 0;
        const int stages = settings.continuation_stages;
        for (int s = 1; s <= stages; ++s) {
            const double remaining = 1.0 - static_cast<double>(s) / stages;
            const ResidualFn shifted = [&, remaining](const Eigen::VectorXd& v) {
                return Eigen::VectorXd(objective(v) - remaining * r0);
            };
            const double tol = s == stages ? settings.tol : std::max(settings.tol, 1e-3 * r0.norm() / stages);
            // The homotopy shift is constant, so the structured Jacobian applies.
            stage = levenberg_marquardt(shifted, x, lm_settings(settings, tol), structured);
            stage_iterations += stage.iterations;
            x = stage.x;
            if (!stage.converged && s < stages) break;
        }
        if (stage.residual_norm < best.residual_norm && stage.x.size() == x0.size()) {
            stage_trace = stage.trace;
            best = stage;
            trace = stage_trace;
        }
        iterations += stage_iterations;
    }

    TrajectorySolution sol = build_solution(scenario, map.decode(best.x), settings);
    sol.residual_norm = best.residual_norm;
    sol.iterations = iterations;
    sol.converged = best.converged;
    sol.trace = std::move(trace);
    if (!sol.converged) {
        std::ostringstream msg;
        msg << "solver stopped at residual " << best.residual_norm << " after " << iterations
            << " iterations (tolerance " << settings.tol << ")";
        throw NoConvergence(msg.str(), std::move(sol));
    }
    return sol;
}

// ---------------------------------------------------------------------------
// Sections
// ---------------------------------------------------------------------------

double spiral_revolutions(const Scenario& scenario) {
    const double accel = scenario.spacecraft.accel;
    if (!(accel > 0.0)) return 0.0;
    const double v1 = circular_speed(scenario.mu, start_sma(scenario));
    const double v2 = circular_speed(scenario.mu, scenario.target.sma);
    return std::abs(std::pow(v1, 4) - std::pow(v2, 4)) / (8.0 * kPi * scenario.mu * accel);
}

int default_section_count(const Scenario& scenario) {
    if (scenario.kind != ScenarioKind::Raising && scenario.kind != ScenarioKind::Insertion) return 1;
    return std::max(1, static_cast<int>(std::ceil(spiral_revolutions(scenario) / 25.0)));
}

std::vector<Scenario> partition_sections(const Scenario& scenario, int sections) {
    scenario.validate();
    if (sections < 1) throw ValidationError("sections", "must be at least 1");
    if (sections == 1) return {scenario};
    if (scenario.kind != ScenarioKind::Raising && scenario.kind != ScenarioKind::Insertion)
        throw ValidationError("sections", "only raising and insertion transfers can be sectioned");

    const KeplerianElements start_el = state_to_elements(scenario.start_state(), scenario.mu);
    const double a_s = start_el.sma;
    const double a_t = scenario.target.sma;
    const double v_s = circular_speed(scenario.mu, a_s);
    const double v_t = circular_speed(scenario.mu, a_t);

    // Section boundary SMAs.
    std::vector<double> sma(static_cast<std::size_t>(sections) + 1);
    for (int i = 0; i <= sections; ++i) {
        const double f = static_cast<double>(i) / sections;
        if (scenario.spacing == SectionSpacing::Geometric) {
            sma[static_cast<std::size_t>(i)] = a_s * std::pow(a_t / a_s, f);
        } else {
            const double v4 = std::pow(v_s, 4) + f * (std::pow(v_t, 4) - std::pow(v_s, 4));
            sma[static_cast<std::size_t>(i)] = scenario.mu / std::sqrt(v4);
        }
    }
    sma.front() = a_s;
    sma.back() = a_t;

    // Shares: flight time follows circular-speed change, revolutions follow v^4.
    const bool degenerate = std::abs(v_s - v_t) <= 1e-12 * v_s;
    std::vector<double> time_share(static_cast<std::size_t>(sections));
    std::vector<double> rev_share(static_cast<std::size_t>(sections));
    std::vector<double> progress(static_cast<std::size_t>(sections) + 1, 0.0);
    for (int i = 0; i < sections; ++i) {
        const auto u = static_cast<std::size_t>(i);
        const double va = circular_speed(scenario.mu, sma[u]);
        const double vb = circular_speed(scenario.mu, sma[u + 1]);
        time_share[u] = degenerate ? 1.0 / sections : std::abs(va - vb) / std::abs(v_s - v_t);
        rev_share[u] = degenerate ? 1.0 / sections
                                  : std::abs(std::pow(va, 4) - std::pow(vb, 4)) /
                                        std::abs(std::pow(v_s, 4) - std::pow(v_t, 4));
        progress[u + 1] = progress[u] + time_share[u];
    }

    // Segment counts: largest-remainder rounding of the time shares, at least
    // one per section, summing to scenario.segments when that allows it.
    std::vector<int> counts(static_cast<std::size_t>(sections));
    {
        std::vector<std::pair<double, int>> remainder;
        int assigned = 0;
        for (int i = 0; i < sections; ++i) {
            const double raw = scenario.segments * time_share[static_cast<std::size_t>(i)];
            counts[static_cast<std::size_t>(i)] = std::max(1, static_cast<int>(std::floor(raw)));
            assigned += counts[static_cast<std::size_t>(i)];
            remainder.emplace_back(raw - std::floor(raw), i);
        }
        std::stable_sort(remainder.begin(), remainder.end(),
                         [](const auto& a, const auto& b) { return a.first > b.first; });
        for (std::size_t j = 0; assigned < scenario.segments; j = (j + 1) % remainder.size(), ++assigned)
            ++counts[static_cast<std::size_t>(remainder[j].second)];
        while (assigned > scenario.segments) {
            auto big = std::max_element(counts.begin(), counts.end());
            if (*big <= 1) break;
            --*big;
            --assigned;
        }
    }

    std::vector<Scenario> subs;
    subs.reserve(static_cast<std::size_t>(sections));
    for (int i = 0; i < sections; ++i) {
        const auto u = static_cast<std::size_t>(i);
        Scenario sub = scenario;
        sub.name = scenario.name + "/section-" + std::to_string(i + 1);
        sub.sections = 1;
        sub.length_scale = 0.0;
        sub.segments = counts[u];
        sub.tof_bounds = {scenario.tof_bounds.min * time_share[u], scenario.tof_bounds.max * time_share[u]};

        const double f = std::min(1.0, progress[u + 1]);
        KeplerianElements tgt = scenario.target;
        tgt.sma = sma[u + 1];
        if (i + 1 < sections) {
            tgt.inc = start_el.inc + f * (scenario.target.inc - start_el.inc);
            tgt.raan = wrap_angle(start_el.raan + f * wrap_angle(scenario.target.raan - start_el.raan));
        }
        sub.target = tgt;

        if (i > 0) {
            const double f0 = progress[u];
            KeplerianElements nominal{sma[u], 0.0,
                                      start_el.inc + f0 * (scenario.target.inc - start_el.inc),
                                      wrap_angle(start_el.raan + f0 * wrap_angle(scenario.target.raan - start_el.raan)),
                                      0.0, 0.0};
            sub.start = nominal;
        }
        subs.push_back(std::move(sub));
    }
    return subs;
}

TrajectorySolution solve_sectioned(const Scenario& scenario, const SolverSettings& settings, int sections) {
    scenario.validate();
    if (sections <= 0) sections = scenario.sections > 0 ? scenario.sections : default_section_count(scenario);
    if (scenario.kind == ScenarioKind::Rendezvous || scenario.kind == ScenarioKind::Phasing) sections = 1;
    if (sections == 1) return solve_scenario(scenario, default_initial_guess(scenario), settings);

    const std::vector<Scenario> subs = partition_sections(scenario, sections);
    TrajectorySolution total;
    total.start = scenario.start_state();
    total.spacecraft = scenario.spacecraft;
    total.sections = sections;
    total.converged = true;
    total.samples.push_back(total.start);

    InertialState state = total.start;
    double mass = scenario.spacecraft.m0;
    double epoch = 0.0;
    double worst_residual = 0.0;
    for (const Scenario& templ : subs) {
        Scenario sub = templ;
        InertialState s0 = state;
        s0.epoch = 0.0;
        sub.start = s0;
        const double accel = scenario.accel_model == AccelModel::RefreshPerSection
                                 ? scenario.spacecraft.thrust / mass * 1e-3
                                 : scenario.spacecraft.accel;
        sub.spacecraft = {mass, accel * 1e3 * mass, accel, scenario.spacecraft.isp, scenario.spacecraft.input};

        TrajectorySolution part;
        try {
            part = solve_scenario(sub, default_initial_guess(sub), settings);
        } catch (const NoConvergence& e) {
            part = e.best();
            total.converged = false;
        }

        const int offset = static_cast<int>(total.params.size());
        for (SegmentRecord seg : part.segments) {
            seg.param_index += offset;
            seg.epoch += epoch;
            total.segments.push_back(seg);
        }
        total.params.insert(total.params.end(), part.params.begin(), part.params.end());
        for (std::size_t j = 1; j < part.samples.size(); ++j) {
            InertialState s = part.samples[j];
            s.epoch += epoch;
            total.samples.push_back(s);
        }
        total.iterations += part.iterations;
        total.delta_v += part.delta_v;
        total.trace.insert(total.trace.end(), part.trace.begin(), part.trace.end());
        worst_residual = std::max(worst_residual, part.residual_norm);

        epoch += part.tof;
        state = part.final;
        mass = part.final_mass;
    }

    state.epoch = epoch;
    total.final = state;
    total.tof = epoch;
    total.final_mass = mass;
    total.propellant = scenario.spacecraft.m0 - mass;
    total.revolutions = count_revolutions(total);
    total.residual_norm = worst_residual;
    if (!total.converged) {
        std::ostringstream msg;
        msg << "sectioned solve left a section at residual " << worst_residual;
        throw NoConvergence(msg.str(), std::move(total));
    }
    return total;
}

}  // namespace cwseed
