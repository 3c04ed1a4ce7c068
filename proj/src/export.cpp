#include "cwseed/export.hpp"

#include "cwseed/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace cwseed {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr const char* kControlHeader = "t_s,alpha_rad,beta_rad,k_rad_per_s,accel_km_s2,segment_index";
constexpr const char* kTrajectoryHeader = "t_s,x_km,y_km,z_km,vx,vy,vz,mass_kg";

std::ofstream open_for_write(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out = open_for_write(path);
    out << text;
    if (!out) throw Error("write failed for '" + path.string() + "'");
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

const SegmentRecord* record_at(const TrajectorySolution& s, double t) {
    if (s.segments.empty()) return nullptr;
    auto it = std::upper_bound(s.segments.begin(), s.segments.end(), t,
                               [](double value, const SegmentRecord& r) { return value < r.epoch; });
    return it == s.segments.begin() ? &s.segments.front() : &*std::prev(it);
}

ordered_json spacecraft_json(const SpacecraftParams& sp) {
    return {{"m0_kg", sp.m0}, {"thrust_n", sp.thrust}, {"accel_km_s2", sp.accel}, {"isp_s", sp.isp}};
}

ordered_json elements_json(const KeplerianElements& el) {
    return {{"sma_km", el.sma}, {"ecc", el.ecc}, {"inc_rad", el.inc},
            {"raan_rad", el.raan}, {"argp_rad", el.argp}, {"nu_rad", el.nu}};
}

ordered_json vec_json(const Vec3& v) { return ordered_json::array({v.x(), v.y(), v.z()}); }

}  // namespace

std::vector<ControlSample> control_history(const TrajectorySolution& solution, int samples_per_segment) {
    if (samples_per_segment < 1) throw ValidationError("samples_per_segment", "must be at least 1");
    std::vector<ControlSample> rows;
    rows.reserve(solution.segments.size() * samples_per_segment + 1);
    for (std::size_t i = 0; i < solution.segments.size(); ++i) {
        const SegmentRecord& seg = solution.segments[i];
        for (int j = 0; j < samples_per_segment; ++j) {
            const double tau = seg.dt * j / samples_per_segment;
            rows.push_back({seg.epoch + tau, seg.law.alpha_at(tau), seg.law.beta, seg.law.k, seg.law.accel,
                            static_cast<int>(i)});
        }
    }
    if (!solution.segments.empty()) {
        const SegmentRecord& last = solution.segments.back();
        rows.push_back({last.epoch + last.dt, last.law.alpha_at(last.dt), last.law.beta, last.law.k,
                        last.law.accel, static_cast<int>(solution.segments.size() - 1)});
    }
    return rows;
}

void write_control_history(const std::vector<ControlSample>& rows, const std::filesystem::path& path) {
    std::ostringstream out;
    out << kControlHeader << '\n';
    for (const ControlSample& r : rows)
        out << fmt(r.t) << ',' << fmt(r.alpha) << ',' << fmt(r.beta) << ',' << fmt(r.k) << ','
            << fmt(r.accel) << ',' << r.segment << '\n';
    write_text(path, out.str());
}

void export_control_history(const TrajectorySolution& solution, const std::filesystem::path& path,
                            int samples_per_segment) {
    write_control_history(control_history(solution, samples_per_segment), path);
}

std::vector<ControlSample> read_control_history(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open control history '" + path.string() + "'");
    std::string line;
    if (!std::getline(in, line) || line != kControlHeader)
        throw ParseError(path.string() + ": expected header '" + std::string(kControlHeader) + "'");
    std::vector<ControlSample> rows;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        ControlSample r;
        int consumed = 0;
        if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf,%lf,%d%n", &r.t, &r.alpha, &r.beta, &r.k, &r.accel,
                        &r.segment, &consumed) != 6 ||
            consumed != static_cast<int>(line.size()))
            throw ParseError(path.string() + ":" + std::to_string(lineno) + ": malformed row");
        if (!rows.empty() && r.t < rows.back().t)
            throw ParseError(path.string() + ":" + std::to_string(lineno) + ": time decreases");
        rows.push_back(r);
    }
    return rows;
}

std::vector<SeedStep> seed_steps(const TrajectorySolution& solution, int steps_per_rev) {
    if (steps_per_rev < 1) throw ValidationError("seed_steps_per_rev", "must be at least 1");
    std::vector<SeedStep> steps;
    if (!(solution.tof > 0.0) || solution.segments.empty()) return steps;
    const auto count = static_cast<std::size_t>(std::ceil(solution.revolutions * steps_per_rev));
    steps.reserve(count);
    const double h = solution.tof / static_cast<double>(count);
    for (std::size_t i = 0; i < count; ++i) {
        SeedStep s;
        s.t_start = h * static_cast<double>(i);
        s.t_end = i + 1 == count ? solution.tof : h * static_cast<double>(i + 1);
        const double mid = 0.5 * (s.t_start + s.t_end);
        const SegmentRecord& seg = *record_at(solution, mid);
        const double tau = std::clamp(mid - seg.epoch, 0.0, seg.dt);
        ControlLaw unit = seg.law;
        unit.accel = 1.0;
        const Vec3 dir = seg.ref.hill_axes(tau) * thrust_components(unit, tau);
        s.direction = dir / dir.norm();
        steps.push_back(s);
    }
    return steps;
}

std::string format_seed(const Scenario& scenario, const TrajectorySolution& solution, int steps_per_rev) {
    ordered_json doc;
    doc["name"] = scenario.name;
    doc["epoch"] = scenario.epoch_label;
    doc["kind"] = to_string(scenario.kind);
    doc["mu_km3_s2"] = scenario.mu;
    doc["tof_s"] = solution.tof;
    doc["spacecraft"] = spacecraft_json(solution.spacecraft);
    doc["start"] = {{"pos_km", vec_json(solution.start.pos)}, {"vel_km_s", vec_json(solution.start.vel)}};
    doc["control_magnitude"] = 1.0;
    ordered_json list = ordered_json::array();
    for (const SeedStep& s : seed_steps(solution, steps_per_rev))
        list.push_back({{"t_start_s", s.t_start}, {"t_end_s", s.t_end}, {"u", vec_json(s.direction)}});
    doc["steps"] = std::move(list);
    return doc.dump(2) + "\n";
}

void export_seed(const Scenario& scenario, const TrajectorySolution& solution, int steps_per_rev,
                 const std::filesystem::path& path) {
    write_text(path, format_seed(scenario, solution, steps_per_rev));
}

double mass_at_time(const TrajectorySolution& solution, double t) {
    double dv = 0.0;
    for (const SegmentRecord& seg : solution.segments) {
        if (t <= seg.epoch) break;
        dv += seg.law.accel * std::min(seg.dt, t - seg.epoch);
    }
    return mass_after_delta_v(solution.spacecraft, dv);
}

std::vector<TrajectorySample> trajectory_samples(const TrajectorySolution& solution, int min_rows,
                                                 int rows_per_rev) {
    const int rows = std::max({2, min_rows, static_cast<int>(std::ceil(rows_per_rev * solution.revolutions))});
    std::vector<TrajectorySample> out;
    out.reserve(rows);
    for (int i = 0; i < rows; ++i) {
        const double t = i + 1 == rows ? solution.tof : solution.tof * i / (rows - 1);
        const InertialState s = i == 0 ? solution.start : solution.state_at(t);
        out.push_back({t, s.pos, s.vel, mass_at_time(solution, t)});
    }
    return out;
}

void export_trajectory_samples(const TrajectorySolution& solution, const std::filesystem::path& path,
                               int min_rows, int rows_per_rev) {
    std::ostringstream out;
    out << kTrajectoryHeader << '\n';
    for (const TrajectorySample& s : trajectory_samples(solution, min_rows, rows_per_rev))
        out << fmt(s.t) << ',' << fmt(s.pos.x()) << ',' << fmt(s.pos.y()) << ',' << fmt(s.pos.z()) << ','
            << fmt(s.vel.x()) << ',' << fmt(s.vel.y()) << ',' << fmt(s.vel.z()) << ',' << fmt(s.mass) << '\n';
    write_text(path, out.str());
}

std::string format_summary(const Scenario& scenario, const TrajectorySolution& solution) {
    ordered_json doc;
    doc["name"] = scenario.name;
    doc["kind"] = to_string(scenario.kind);
    doc["converged"] = solution.converged;
    doc["residual_norm"] = solution.residual_norm;
    doc["iterations"] = solution.iterations;
    doc["tof_s"] = solution.tof;
    doc["tof_days"] = solution.tof / kSecondsPerDay;
    doc["delta_v_km_s"] = solution.delta_v;
    doc["propellant_kg"] = solution.propellant;
    doc["final_mass_kg"] = solution.final_mass;
    doc["revolutions"] = solution.revolutions;
    doc["segments"] = solution.segments.size();
    doc["sections"] = solution.sections;
    try {
        doc["final_elements"] = elements_json(state_to_elements(solution.final, scenario.mu));
    } catch (const DegenerateOrbit&) {
        doc["final_elements"] = nullptr;
    }
    doc["final_state"] = {{"pos_km", vec_json(solution.final.pos)}, {"vel_km_s", vec_json(solution.final.vel)}};
    return doc.dump(2) + "\n";
}

Repropagation repropagate(const Scenario& scenario, const std::vector<ControlSample>& controls,
                          double max_step) {
    const InertialState start = scenario.start_state();
    Repropagation result;
    result.final = start;
    if (controls.empty()) throw ValidationError("controls", "control history is empty");
    result.tof = controls.back().t - controls.front().t;
    if (result.tof > 0.0) {
        const double t0 = controls.front().t;
        auto accel = [&](double t, const Vec3& r, const Vec3& v) -> Vec3 {
            auto it = std::upper_bound(controls.begin(), controls.end(), t + t0,
                                       [](double value, const ControlSample& c) { return value < c.t; });
            const ControlSample& c = it == controls.begin() ? controls.front() : *std::prev(it);
            const double alpha = c.alpha + c.k * (t + t0 - c.t);
            const double cb = std::cos(c.beta);
            const Vec3 radial = r.normalized();
            const Vec3 normal = r.cross(v).normalized();
            const Vec3 along = normal.cross(radial);
            return c.accel * (cb * std::cos(alpha) * radial + cb * std::sin(alpha) * along +
                              std::sin(c.beta) * normal);
        };
        const CartesianState end = integrate_two_body(start.pos, start.vel, accel, scenario.mu, result.tof,
                                                      IntegrationSettings::from_max_step(result.tof, max_step));
        result.final = {end.pos, end.vel, result.tof};
    }
    result.elements = state_to_elements(result.final, scenario.mu);
    result.residual_norm = boundary_residuals(scenario, result.final, result.tof).norm();
    return result;
}

std::string format_repropagation(const Scenario& scenario, const Repropagation& r) {
    ordered_json doc;
    doc["name"] = scenario.name;
    doc["kind"] = to_string(scenario.kind);
    doc["tof_s"] = r.tof;
    doc["tof_days"] = r.tof / kSecondsPerDay;
    doc["boundary_residual_norm"] = r.residual_norm;
    doc["final_elements"] = elements_json(r.elements);
    doc["final_state"] = {{"pos_km", vec_json(r.final.pos)}, {"vel_km_s", vec_json(r.final.vel)}};
    return doc.dump(2) + "\n";
}

}  // namespace cwseed
