#include "cwseed/config.hpp"

#include "cwseed/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <map>
#include <optional>
#include <set>
#include <sstream>

namespace cwseed {

namespace {

using nlohmann::json;

enum class Dim { Length, Angle, Time, Mu, Mass, Thrust, Accel, Isp, Speed };

const std::map<std::string, double>& units_for(Dim dim) {
    static const std::map<std::string, double> length{{"km", 1.0}, {"m", 1e-3}, {"AU", kAstronomicalUnit}};
    static const std::map<std::string, double> angle{{"rad", 1.0}, {"deg", kPi / 180.0}};
    static const std::map<std::string, double> time{
        {"s", 1.0}, {"min", 60.0}, {"hour", 3600.0}, {"day", kSecondsPerDay}};
    static const std::map<std::string, double> mu{{"km3/s2", 1.0}, {"m3/s2", 1e-9}};
    static const std::map<std::string, double> mass{{"kg", 1.0}};
    static const std::map<std::string, double> thrust{{"N", 1.0}, {"mN", 1e-3}};
    static const std::map<std::string, double> accel{{"km/s2", 1.0}, {"m/s2", 1e-3}};
    static const std::map<std::string, double> isp{{"s", 1.0}};
    static const std::map<std::string, double> speed{{"km/s", 1.0}, {"m/s", 1e-3}};
    switch (dim) {
        case Dim::Length: return length;
        case Dim::Angle: return angle;
        case Dim::Time: return time;
        case Dim::Mu: return mu;
        case Dim::Mass: return mass;
        case Dim::Thrust: return thrust;
        case Dim::Accel: return accel;
        case Dim::Isp: return isp;
        case Dim::Speed: return speed;
    }
    return length;
}

std::string join(const std::string& prefix, const std::string& key) {
    return prefix.empty() ? key : prefix + "." + key;
}

// Object view that tracks the keys consumed so leftovers can be rejected.
class Node {
public:
    Node(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ValidationError(path_.empty() ? "(root)" : path_, "expected an object");
    }

    const std::string& path() const { return path_; }
    bool has(const std::string& key) const { return j_.contains(key); }
    std::string key(const std::string& k) const { return join(path_, k); }

    const json& raw(const std::string& k) {
        seen_.insert(k);
        if (!j_.contains(k)) throw ValidationError(key(k), "missing required key");
        return j_.at(k);
    }

    Node child(const std::string& k) { return Node(raw(k), key(k)); }

    double number(const std::string& k) {
        const json& v = raw(k);
        if (!v.is_number()) throw ValidationError(key(k), "expected a number");
        return v.get<double>();
    }

    int integer(const std::string& k) {
        const json& v = raw(k);
        if (!v.is_number_integer()) throw ValidationError(key(k), "expected an integer");
        return v.get<int>();
    }

    std::string string(const std::string& k) {
        const json& v = raw(k);
        if (!v.is_string()) throw ValidationError(key(k), "expected a string");
        return v.get<std::string>();
    }

    double quantity(const std::string& k, Dim dim) {
        const json& v = raw(k);
        if (v.is_number()) throw ValidationError(key(k), "unit annotation required, use {\"value\": x, \"unit\": \"...\"}");
        Node q(v, key(k));
        const std::string unit = q.string("unit");
        const double value = q.number("value");
        q.finish();
        const auto& table = units_for(dim);
        auto it = table.find(unit);
        if (it == table.end()) throw ValidationError(key(k) + ".unit", "unsupported unit '" + unit + "'");
        return value * it->second;
    }

    Vec3 vector(const std::string& k, Dim dim) {
        const json& v = raw(k);
        if (v.is_array()) throw ValidationError(key(k), "unit annotation required");
        Node q(v, key(k));
        const std::string unit = q.string("unit");
        const json& arr = q.raw("value");
        q.finish();
        if (!arr.is_array() || arr.size() != 3)
            throw ValidationError(key(k) + ".value", "expected an array of 3 numbers");
        const auto& table = units_for(dim);
        auto it = table.find(unit);
        if (it == table.end()) throw ValidationError(key(k) + ".unit", "unsupported unit '" + unit + "'");
        Vec3 out;
        for (int i = 0; i < 3; ++i) {
            if (!arr[i].is_number()) throw ValidationError(key(k) + ".value", "expected numbers");
            out[i] = arr[i].get<double>() * it->second;
        }
        return out;
    }

    template <class T, class F>
    std::optional<T> optional(const std::string& k, F&& get) {
        if (!j_.contains(k)) return std::nullopt;
        return get(k);
    }

    void finish() const {
        for (const auto& item : j_.items())
            if (!seen_.count(item.key())) throw ValidationError(key(item.key()), "unknown key");
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

KeplerianElements read_elements(Node node, bool sma_only_required) {
    KeplerianElements el;
    el.sma = node.quantity("sma", Dim::Length);
    auto angle = [&](const std::string& k) {
        if (sma_only_required && !node.has(k)) return 0.0;
        return node.quantity(k, Dim::Angle);
    };
    if (!sma_only_required || node.has("ecc")) el.ecc = node.number("ecc");
    el.inc = angle("inc");
    el.raan = angle("raan");
    const bool has_lon = node.has("lon_perihelion");
    const bool has_argp = node.has("argp");
    if (has_lon && has_argp)
        throw ValidationError(node.key("argp"), "give either argp or lon_perihelion, not both");
    if (has_lon)
        el.argp = wrap_angle(node.quantity("lon_perihelion", Dim::Angle) - el.raan);
    else
        el.argp = angle("argp");
    el.nu = angle("nu");
    node.finish();
    return el;
}

std::variant<KeplerianElements, InertialState> read_orbit(Node node, bool sma_only_required) {
    const bool has_el = node.has("elements");
    const bool has_state = node.has("state");
    if (has_el == has_state)
        throw ValidationError(node.path(), "expected exactly one of 'elements' or 'state'");
    std::variant<KeplerianElements, InertialState> out;
    if (has_el) {
        out = read_elements(node.child("elements"), sma_only_required);
    } else {
        Node s = node.child("state");
        InertialState st;
        st.pos = s.vector("pos", Dim::Length);
        st.vel = s.vector("vel", Dim::Speed);
        s.finish();
        out = st;
    }
    node.finish();
    return out;
}

template <class E>
E read_enum(Node& node, const std::string& k, std::initializer_list<E> values) {
    const std::string text = node.string(k);
    for (E v : values)
        if (text == to_string(v)) return v;
    throw ValidationError(node.key(k), "unrecognized value '" + text + "'");
}

SolverSettings read_solver(Node node) {
    SolverSettings s;
    auto num = [&](const char* k, double& out) { if (node.has(k)) out = node.number(k); };
    auto integer = [&](const char* k, int& out) { if (node.has(k)) out = node.integer(k); };
    num("tol", s.tol);
    integer("max_iterations", s.max_iterations);
    num("fd_relative_step", s.fd_relative_step);
    num("fd_min_step", s.fd_min_step);
    num("initial_damping", s.initial_damping);
    integer("threads", s.threads);
    integer("continuation_stages", s.continuation_stages);
    num("deviation_limit", s.deviation_limit);
    integer("max_bisections", s.max_bisections);
    integer("samples_per_segment", s.samples_per_segment);
    node.finish();
    if (!(s.tol > 0.0)) throw ValidationError(node.key("tol"), "must be positive");
    if (s.max_iterations < 1) throw ValidationError(node.key("max_iterations"), "must be at least 1");
    if (!(s.fd_relative_step > 0.0)) throw ValidationError(node.key("fd_relative_step"), "must be positive");
    if (!(s.fd_min_step > 0.0)) throw ValidationError(node.key("fd_min_step"), "must be positive");
    if (!(s.initial_damping > 0.0)) throw ValidationError(node.key("initial_damping"), "must be positive");
    if (s.threads < 0) throw ValidationError(node.key("threads"), "must be nonnegative");
    if (s.continuation_stages < 0) throw ValidationError(node.key("continuation_stages"), "must be nonnegative");
    if (!(s.deviation_limit > 0.0)) throw ValidationError(node.key("deviation_limit"), "must be positive");
    if (s.max_bisections < 0) throw ValidationError(node.key("max_bisections"), "must be nonnegative");
    if (s.samples_per_segment < 1) throw ValidationError(node.key("samples_per_segment"), "must be at least 1");
    return s;
}

OutputSettings read_output(Node node) {
    OutputSettings o;
    if (node.has("dir")) o.dir = node.string("dir");
    auto positive = [&](const char* k, int& out) {
        if (!node.has(k)) return;
        out = node.integer(k);
        if (out < 1) throw ValidationError(node.key(k), "must be at least 1");
    };
    positive("control_samples_per_segment", o.control_samples_per_segment);
    positive("seed_steps_per_rev", o.seed_steps_per_rev);
    positive("trajectory_min_rows", o.trajectory_min_rows);
    positive("trajectory_rows_per_rev", o.trajectory_rows_per_rev);
    node.finish();
    return o;
}

json quantity(double value, const char* unit) { return {{"value", value}, {"unit", unit}}; }

json elements_json(const KeplerianElements& el) {
    return {{"sma", quantity(el.sma, "km")}, {"ecc", el.ecc},
            {"inc", quantity(el.inc, "rad")}, {"raan", quantity(el.raan, "rad")},
            {"argp", quantity(el.argp, "rad")}, {"nu", quantity(el.nu, "rad")}};
}

json orbit_json(const std::variant<KeplerianElements, InertialState>& orbit) {
    if (const auto* el = std::get_if<KeplerianElements>(&orbit)) return {{"elements", elements_json(*el)}};
    const auto& st = std::get<InertialState>(orbit);
    return {{"state",
             {{"pos", {{"value", {st.pos.x(), st.pos.y(), st.pos.z()}}, {"unit", "km"}}},
              {"vel", {{"value", {st.vel.x(), st.vel.y(), st.vel.z()}}, {"unit", "km/s"}}}}}};
}

}  // namespace

ScenarioKind parse_kind(const std::string& text) {
    for (ScenarioKind k : {ScenarioKind::Rendezvous, ScenarioKind::Insertion, ScenarioKind::Phasing,
                           ScenarioKind::Raising})
        if (text == to_string(k)) return k;
    throw ValidationError("kind", "unrecognized scenario kind '" + text + "'");
}

ScenarioConfig parse_scenario_config(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("malformed JSON: ") + e.what());
    }
    Node root(doc, "");
    ScenarioConfig cfg;
    Scenario& sc = cfg.scenario;

    if (root.has("name")) sc.name = root.string("name");
    if (root.has("epoch")) sc.epoch_label = root.string("epoch");
    sc.kind = parse_kind(root.string("kind"));
    sc.mu = root.quantity("mu", Dim::Mu);
    sc.start = read_orbit(root.child("start"), false);

    const bool sma_only = sc.kind == ScenarioKind::Raising || sc.kind == ScenarioKind::Insertion;
    if (sc.kind == ScenarioKind::Phasing) {
        if (root.has("target")) throw ValidationError("target", "not used by phasing scenarios");
        sc.phase_offset = root.quantity("phase_offset", Dim::Angle);
    } else {
        auto target = read_orbit(root.child("target"), sma_only);
        if (!std::holds_alternative<KeplerianElements>(target))
            throw ValidationError("target", "target must be given as elements");
        sc.target = std::get<KeplerianElements>(target);
    }

    {
        Node sp = root.child("spacecraft");
        const double m0 = sp.quantity("m0", Dim::Mass);
        const double isp = sp.quantity("isp", Dim::Isp);
        if (sp.has("thrust") == sp.has("accel"))
            throw ValidationError(sp.key("thrust"), "give exactly one of thrust or accel");
        try {
            sc.spacecraft = sp.has("thrust")
                                ? SpacecraftParams::from_thrust(m0, sp.quantity("thrust", Dim::Thrust), isp)
                                : SpacecraftParams::from_accel(m0, sp.quantity("accel", Dim::Accel), isp);
        } catch (const ValidationError& e) {
            throw ValidationError(sp.key(e.key()), e.detail());
        }
        sp.finish();
    }

    {
        Node tb = root.child("tof_bounds");
        sc.tof_bounds.min = tb.quantity("min", Dim::Time);
        sc.tof_bounds.max = tb.quantity("max", Dim::Time);
        tb.finish();
    }

    if (root.has("length_scale")) sc.length_scale = root.quantity("length_scale", Dim::Length);
    if (root.has("accel_model"))
        sc.accel_model = read_enum(root, "accel_model", {AccelModel::Constant, AccelModel::RefreshPerSection});
    if (root.has("sections")) sc.sections = root.integer("sections");
    if (root.has("section_spacing"))
        sc.spacing = read_enum(root, "section_spacing", {SectionSpacing::Geometric, SectionSpacing::EqualRevolutions});
    if (root.has("solver")) cfg.solver = read_solver(root.child("solver"));
    if (root.has("output")) cfg.output = read_output(root.child("output"));

    if (root.has("segments")) {
        sc.segments = root.integer("segments");
    } else if (sc.kind == ScenarioKind::Rendezvous || sc.kind == ScenarioKind::Phasing) {
        sc.segments = 50;
    } else {
        sc.validate();
        sc.segments = std::max(1, static_cast<int>(std::ceil(4.0 * spiral_revolutions(sc))));
    }
    root.finish();
    sc.validate();
    return cfg;
}

ScenarioConfig load_scenario_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open config file '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse_scenario_config(buf.str());
    } catch (const ValidationError& e) {
        throw ValidationError(e.key(), e.detail() + " (in " + path.string() + ")");
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

Scenario load_scenario(const std::filesystem::path& path) { return load_scenario_config(path).scenario; }

std::string format_scenario_config(const ScenarioConfig& cfg) {
    const Scenario& sc = cfg.scenario;
    json doc;
    doc["name"] = sc.name;
    doc["epoch"] = sc.epoch_label;
    doc["kind"] = to_string(sc.kind);
    doc["mu"] = quantity(sc.mu, "km3/s2");
    doc["start"] = orbit_json(sc.start);
    if (sc.kind == ScenarioKind::Phasing)
        doc["phase_offset"] = quantity(sc.phase_offset, "rad");
    else
        doc["target"] = {{"elements", elements_json(sc.target)}};
    json sp = {{"m0", quantity(sc.spacecraft.m0, "kg")}, {"isp", quantity(sc.spacecraft.isp, "s")}};
    if (sc.spacecraft.input == ThrustInput::Thrust)
        sp["thrust"] = quantity(sc.spacecraft.thrust, "N");
    else
        sp["accel"] = quantity(sc.spacecraft.accel, "km/s2");
    doc["spacecraft"] = sp;
    doc["segments"] = sc.segments;
    doc["tof_bounds"] = {{"min", quantity(sc.tof_bounds.min, "s")}, {"max", quantity(sc.tof_bounds.max, "s")}};
    doc["length_scale"] = quantity(sc.length_scale, "km");
    doc["accel_model"] = to_string(sc.accel_model);
    doc["sections"] = sc.sections;
    doc["section_spacing"] = to_string(sc.spacing);
    const SolverSettings& s = cfg.solver;
    doc["solver"] = {{"tol", s.tol},
                     {"max_iterations", s.max_iterations},
                     {"fd_relative_step", s.fd_relative_step},
                     {"fd_min_step", s.fd_min_step},
                     {"initial_damping", s.initial_damping},
                     {"threads", s.threads},
                     {"continuation_stages", s.continuation_stages},
                     {"deviation_limit", s.deviation_limit},
                     {"max_bisections", s.max_bisections},
                     {"samples_per_segment", s.samples_per_segment}};
    const OutputSettings& o = cfg.output;
    doc["output"] = {{"dir", o.dir},
                     {"control_samples_per_segment", o.control_samples_per_segment},
                     {"seed_steps_per_rev", o.seed_steps_per_rev},
                     {"trajectory_min_rows", o.trajectory_min_rows},
                     {"trajectory_rows_per_rev", o.trajectory_rows_per_rev}};
    return doc.dump(2) + "\n";
}

void write_scenario_config(const ScenarioConfig& config, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << format_scenario_config(config);
    if (!out) throw Error("write failed for '" + path.string() + "'");
}

}  // namespace cwseed
