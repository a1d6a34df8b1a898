#include "octarm/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "octarm/topology.hpp"

namespace octarm {

using nlohmann::json;

namespace {

// ---- strict JSON helpers ---------------------------------------------------

void require_keys(const json& obj, const std::string& where,
                  const std::set<std::string>& allowed) {
    for (const auto& [key, value] : obj.items())
        if (!allowed.count(key))
            throw ConfigError("scenario: unknown field '" + where + "." + key +
                              "'");
}

template <typename T>
void get_to(const json& obj, const std::string& where, const std::string& key,
            T& out) {
    if (!obj.contains(key)) return;
    try {
        obj.at(key).get_to(out);
    } catch (const json::exception& e) {
        throw ConfigError("scenario: bad value for field '" + where + "." + key +
                          "': " + e.what());
    }
}

Vec3 get_vec3(const json& obj, const std::string& where, const std::string& key) {
    std::vector<double> v;
    get_to(obj, where, key, v);
    if (v.size() != 3)
        throw ConfigError("scenario: field '" + where + "." + key +
                          "' must be [x, y, z]");
    return Vec3(v[0], v[1], v[2]);
}

ActivationKind kind_from_string(const std::string& s) {
    if (s == "ramp") return ActivationKind::Ramp;
    if (s == "traveling_wave") return ActivationKind::TravelingWave;
    if (s == "sigmoid_wavefront") return ActivationKind::SigmoidWavefront;
    throw ConfigError("scenario: unknown activation kind '" + s + "'");
}

std::string kind_to_string(ActivationKind k) {
    switch (k) {
        case ActivationKind::Ramp: return "ramp";
        case ActivationKind::TravelingWave: return "traveling_wave";
        case ActivationKind::SigmoidWavefront: return "sigmoid_wavefront";
    }
    return "ramp";
}

void parse_arm(const json& j, ArmSpec& arm) {
    require_keys(j, "arm",
                 {"total_length", "base_diameter", "tapered",
                  "tip_radius_fraction", "winding_angle_deg", "frac_anc",
                  "frac_lm", "frac_tm", "frac_om", "n_lm", "n_om_per_hand",
                  "n_tm_rings", "elements_per_rod", "tm_ring_segments",
                  "om_elements_per_turn", "density", "shear_correction",
                  "alpha_s", "alpha_c", "k_s_override", "k_c_override",
                  "connection_stiffness_scale", "contact_stiffness_scale",
                  "contact_damping_ratio", "strain_rate_filter_time",
                  "materials_path"});
    get_to(j, "arm", "total_length", arm.total_length);
    get_to(j, "arm", "base_diameter", arm.base_diameter);
    get_to(j, "arm", "tapered", arm.tapered);
    get_to(j, "arm", "tip_radius_fraction", arm.tip_radius_fraction);
    get_to(j, "arm", "winding_angle_deg", arm.winding_angle_deg);
    get_to(j, "arm", "frac_anc", arm.frac_anc);
    get_to(j, "arm", "frac_lm", arm.frac_lm);
    get_to(j, "arm", "frac_tm", arm.frac_tm);
    get_to(j, "arm", "frac_om", arm.frac_om);
    get_to(j, "arm", "n_lm", arm.n_lm);
    get_to(j, "arm", "n_om_per_hand", arm.n_om_per_hand);
    get_to(j, "arm", "n_tm_rings", arm.n_tm_rings);
    get_to(j, "arm", "elements_per_rod", arm.elements_per_rod);
    get_to(j, "arm", "tm_ring_segments", arm.tm_ring_segments);
    get_to(j, "arm", "om_elements_per_turn", arm.om_elements_per_turn);
    get_to(j, "arm", "density", arm.density);
    get_to(j, "arm", "shear_correction", arm.shear_correction);
    get_to(j, "arm", "alpha_s", arm.alpha_s);
    get_to(j, "arm", "alpha_c", arm.alpha_c);
    get_to(j, "arm", "k_s_override", arm.k_s_override);
    get_to(j, "arm", "k_c_override", arm.k_c_override);
    get_to(j, "arm", "connection_stiffness_scale", arm.connection_stiffness_scale);
    get_to(j, "arm", "contact_stiffness_scale", arm.contact_stiffness_scale);
    get_to(j, "arm", "contact_damping_ratio", arm.contact_damping_ratio);
    get_to(j, "arm", "strain_rate_filter_time", arm.strain_rate_filter_time);
    get_to(j, "arm", "materials_path", arm.materials_path);
}

ActivationTarget parse_activation(const json& j, const std::string& where) {
    require_keys(j, where, {"group", "index", "handedness", "schedule"});
    ActivationTarget t;
    std::string group = "LM";
    get_to(j, where, "group", group);
    t.group = rod_group_from_string(group);
    get_to(j, where, "index", t.index);
    get_to(j, where, "handedness", t.handedness);
    if (j.contains("schedule")) {
        const json& s = j.at("schedule");
        const std::string sw = where + ".schedule";
        require_keys(s, sw,
                     {"kind", "s_start", "s_end", "onset", "ramp_duration",
                      "wave_speed", "wave_width", "sigmoid_steepness",
                      "amplitude"});
        std::string kind = "ramp";
        get_to(s, sw, "kind", kind);
        t.schedule.kind = kind_from_string(kind);
        get_to(s, sw, "s_start", t.schedule.s_start);
        get_to(s, sw, "s_end", t.schedule.s_end);
        get_to(s, sw, "onset", t.schedule.onset);
        get_to(s, sw, "ramp_duration", t.schedule.ramp_duration);
        get_to(s, sw, "wave_speed", t.schedule.wave_speed);
        get_to(s, sw, "wave_width", t.schedule.wave_width);
        get_to(s, sw, "sigmoid_steepness", t.schedule.sigmoid_steepness);
        get_to(s, sw, "amplitude", t.schedule.amplitude);
    }
    return t;
}

void parse_environment(const json& j, Environment& env) {
    require_keys(j, "environment", {"obstacles", "contact", "drag"});
    if (j.contains("obstacles")) {
        int idx = 0;
        for (const auto& o : j.at("obstacles")) {
            const std::string where =
                "environment.obstacles[" + std::to_string(idx++) + "]";
            require_keys(o, where,
                         {"end_a", "end_b", "radius", "elements", "velocity"});
            RigidCylinder c;
            c.end_a = get_vec3(o, where, "end_a");
            c.end_b = get_vec3(o, where, "end_b");
            get_to(o, where, "radius", c.radius);
            get_to(o, where, "elements", c.n_elements);
            if (o.contains("velocity")) c.velocity = get_vec3(o, where, "velocity");
            env.obstacles.push_back(c);
        }
    }
    if (j.contains("contact")) {
        const json& c = j.at("contact");
        require_keys(c, "environment.contact",
                     {"k_r", "gamma_r", "mu_f", "gamma_f", "stick_speed"});
        get_to(c, "environment.contact", "k_r", env.contact.k_r);
        get_to(c, "environment.contact", "gamma_r", env.contact.gamma_r);
        get_to(c, "environment.contact", "mu_f", env.contact.mu_f);
        get_to(c, "environment.contact", "gamma_f", env.contact.gamma_f);
        get_to(c, "environment.contact", "stick_speed", env.contact.stick_speed);
    }
    if (j.contains("drag")) {
        const json& d = j.at("drag");
        require_keys(d, "environment.drag", {"enabled", "rho_w", "c_t", "c_p"});
        get_to(d, "environment.drag", "enabled", env.drag_enabled);
        get_to(d, "environment.drag", "rho_w", env.drag.rho_w);
        get_to(d, "environment.drag", "c_t", env.drag.c_t);
        get_to(d, "environment.drag", "c_p", env.drag.c_p);
    }
}

// Ribbon along the axial rod of one trajectory frame (constant nominal radii;
// only the centerline and normals enter the knot quantities).
RibbonFrame frame_ribbon(const TrajectoryFrame& frame) {
    const auto& nodes = frame.node_positions[0];
    const auto& directors = frame.directors[0];
    const int n = static_cast<int>(directors.size());
    RibbonFrame rb;
    rb.centerline = nodes;
    rb.radii.assign(n + 1, 1e-3);
    rb.normals.resize(n + 1);
    for (int i = 0; i <= n; ++i) {
        Vec3 t;
        if (i == 0)
            t = nodes[1] - nodes[0];
        else if (i == n)
            t = nodes[n] - nodes[n - 1];
        else
            t = nodes[i + 1] - nodes[i - 1];
        t.normalize();
        Vec3 d1 = directors[std::min(i, n - 1)].row(0).transpose();
        d1 -= d1.dot(t) * t;
        rb.normals[i] = d1.normalized();
    }
    return rb;
}

TrajectoryFrame snapshot(const ArmAssembly& arm, const ActivationSet& act,
                         double t) {
    TrajectoryFrame fr;
    fr.time = t;
    fr.node_positions.reserve(arm.rods.size());
    for (const auto& rod : arm.rods) {
        fr.node_positions.push_back(rod.state.node_positions);
        fr.directors.push_back(rod.state.directors);
        fr.node_velocities.push_back(rod.state.node_velocities);
        fr.activations.push_back(rod_activation(rod, act, 0.5, t));
    }
    return fr;
}

bool finite_state(const ArmAssembly& arm) {
    for (const auto& rod : arm.rods)
        for (const auto& p : rod.state.node_positions)
            if (!p.allFinite()) return false;
    return true;
}

}  // namespace

// ---- config ----------------------------------------------------------------

void ScenarioConfig::validate() const {
    if (schema_version != 1)
        throw ConfigError("scenario: unsupported schema_version " +
                          std::to_string(schema_version));
    arm.validate();
    damping.validate();
    for (const auto& a : activations) a.schedule.validate();
    environment.validate();
    if (duration <= 0.0)
        throw ConfigError("scenario: field 'duration' must be positive");
    if (dt < 0.0) throw ConfigError("scenario: field 'dt' must be >= 0");
    if (dt_safety <= 0.0 || dt_safety > 1.0)
        throw ConfigError("scenario: field 'dt_safety' outside (0, 1]");
    if (output.trajectory_stride < 0 || output.knot_stride < 1)
        throw ConfigError("scenario: output strides must be >= 1 (or 0 for auto)");
    if (!arm.materials_path.empty()) {
        std::ifstream f(arm.materials_path);
        if (!f)
            throw ConfigError("scenario: field 'arm.materials_path' not readable: " +
                              arm.materials_path);
    }
}

ScenarioConfig parse_scenario(const std::string& json_text,
                              const std::string& origin) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError("scenario: " + origin + ": " + e.what());
    }
    require_keys(j, "",
                 {"schema_version", "arm", "damping", "activations",
                  "environment", "duration", "dt", "dt_safety", "output",
                  "seed"});
    ScenarioConfig cfg;
    get_to(j, "", "schema_version", cfg.schema_version);
    if (j.contains("arm")) parse_arm(j.at("arm"), cfg.arm);
    if (j.contains("damping")) {
        const json& d = j.at("damping");
        require_keys(d, "damping",
                     {"rayleigh", "filter_strength", "filter_interval"});
        get_to(d, "damping", "rayleigh", cfg.damping.rayleigh_coefficient);
        get_to(d, "damping", "filter_strength",
               cfg.damping.laplacian_filter_strength);
        get_to(d, "damping", "filter_interval",
               cfg.damping.laplacian_filter_interval);
    }
    if (j.contains("activations")) {
        int idx = 0;
        for (const auto& a : j.at("activations"))
            cfg.activations.push_back(parse_activation(
                a, "activations[" + std::to_string(idx++) + "]"));
    }
    if (j.contains("environment"))
        parse_environment(j.at("environment"), cfg.environment);
    get_to(j, "", "duration", cfg.duration);
    get_to(j, "", "dt", cfg.dt);
    get_to(j, "", "dt_safety", cfg.dt_safety);
    if (j.contains("output")) {
        const json& o = j.at("output");
        require_keys(o, "output", {"trajectory_stride", "knot_stride"});
        get_to(o, "output", "trajectory_stride", cfg.output.trajectory_stride);
        get_to(o, "output", "knot_stride", cfg.output.knot_stride);
    }
    get_to(j, "", "seed", cfg.seed);
    cfg.source_text = j.dump();
    cfg.validate();
    return cfg;
}

ScenarioConfig load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("scenario: cannot open config: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_scenario(ss.str(), path);
}

std::string scenario_to_json(const ScenarioConfig& config) {
    json j;
    j["schema_version"] = config.schema_version;
    json arm;
    arm["total_length"] = config.arm.total_length;
    arm["base_diameter"] = config.arm.base_diameter;
    arm["tapered"] = config.arm.tapered;
    arm["winding_angle_deg"] = config.arm.winding_angle_deg;
    arm["n_tm_rings"] = config.arm.n_tm_rings;
    arm["elements_per_rod"] = config.arm.elements_per_rod;
    arm["tm_ring_segments"] = config.arm.tm_ring_segments;
    if (!config.arm.materials_path.empty())
        arm["materials_path"] = config.arm.materials_path;
    j["arm"] = arm;
    j["damping"] = {{"rayleigh", config.damping.rayleigh_coefficient},
                    {"filter_strength", config.damping.laplacian_filter_strength},
                    {"filter_interval", config.damping.laplacian_filter_interval}};
    json acts = json::array();
    for (const auto& a : config.activations) {
        json s;
        s["kind"] = kind_to_string(a.schedule.kind);
        s["s_start"] = a.schedule.s_start;
        s["s_end"] = a.schedule.s_end;
        s["onset"] = a.schedule.onset;
        s["ramp_duration"] = a.schedule.ramp_duration;
        s["wave_speed"] = a.schedule.wave_speed;
        s["wave_width"] = a.schedule.wave_width;
        s["sigmoid_steepness"] = a.schedule.sigmoid_steepness;
        s["amplitude"] = a.schedule.amplitude;
        acts.push_back({{"group", to_string(a.group)},
                        {"index", a.index},
                        {"handedness", a.handedness},
                        {"schedule", s}});
    }
    j["activations"] = acts;
    j["duration"] = config.duration;
    j["dt"] = config.dt;
    j["dt_safety"] = config.dt_safety;
    j["output"] = {{"trajectory_stride", config.output.trajectory_stride},
                   {"knot_stride", config.output.knot_stride}};
    j["seed"] = config.seed;
    return j.dump(2);
}

// ---- run ---------------------------------------------------------------------

TrajectoryRecord run(const ScenarioConfig& config) {
    config.validate();
    const auto wall_start = std::chrono::steady_clock::now();

    auto arm = build_arm(config.arm);
    const double bound = std::min(
        assembly_stable_dt(arm),
        environment_stable_dt(arm, config.environment));
    const double dt = config.dt > 0.0 ? config.dt : config.dt_safety * bound;
    if (dt > bound)
        throw ConfigError("scenario: field 'dt' (" + std::to_string(config.dt) +
                          ") exceeds the stability bound " +
                          std::to_string(bound));

    EnvironmentStats env_stats;
    ExtraLoadFn extra;
    if (!config.environment.obstacles.empty() || config.environment.drag_enabled)
        extra = environment_loads(config.environment, dt, &env_stats);

    TrajectoryRecord rec;
    rec.config_hash = config.hash();
    rec.engine_version = kEngineVersion;
    rec.units = "SI: m, s, kg, N";
    for (const auto& rod : arm.rods)
        rec.rod_elements.push_back(rod.state.n_elements());

    const long steps = static_cast<long>(std::ceil(config.duration / dt));
    // Stride 0 targets ~250 frames regardless of how small the stable step is.
    const long stride = config.output.trajectory_stride > 0
                            ? config.output.trajectory_stride
                            : std::max<long>(1, steps / 250);
    rec.frames.push_back(snapshot(arm, config.activations, 0.0));
    double max_pen = 0.0;
    for (long s = 0; s < steps; ++s) {
        const auto stats = step_arm(arm, config.activations, s * dt, dt,
                                    config.damping, s + 1, extra);
        max_pen = std::max(max_pen, stats.max_penetration_ratio);
        const bool last = (s + 1 == steps);
        if ((s + 1) % stride == 0 || last) {
            if (!finite_state(arm)) {
                rec.failure_frame = static_cast<std::int64_t>(rec.frames.size());
                break;
            }
            rec.frames.push_back(snapshot(arm, config.activations, (s + 1) * dt));
        }
    }

    rec.max_penetration_ratio = max_pen;
    rec.dissipated_work = env_stats.dissipated_work;
    if (rec.failure_frame < 0) {
        for (const auto& rod : arm.rods) {
            rec.final_kinetic_energy += kinetic_energy(rod.state, rod.elast);
            rec.final_elastic_energy += elastic_energy(rod.state, rod.elast);
        }
    }
    rec.wall_time_s = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - wall_start)
                          .count();
    return rec;
}

// ---- sweep -------------------------------------------------------------------

SweepTable sweep_winding_angle(const ScenarioConfig& base,
                               const std::vector<double>& angles, int threads) {
    for (const double a : angles)
        if (a <= 0.0 || a >= 90.0)
            throw ConfigError("sweep: winding angle " + std::to_string(a) +
                              " outside (0, 90)");
    SweepTable table;
    table.rows.resize(angles.size());

    auto run_row = [&](size_t i) {
        SweepRow& row = table.rows[i];
        row.angle_deg = angles[i];
        try {
            ScenarioConfig cfg = base;
            cfg.arm.winding_angle_deg = angles[i];
            cfg.source_text = scenario_to_json(cfg);
            const auto rec = run(cfg);
            if (rec.failure_frame >= 0) {
                row.message = "unstable at frame " +
                              std::to_string(rec.failure_frame);
                return;
            }
            // Steady state: average |Tw| over the last fifth of the frames.
            const auto knots = analyze_knot(rec);
            const size_t tail = std::max<size_t>(1, knots.size() / 5);
            double acc = 0.0;
            for (size_t k = knots.size() - tail; k < knots.size(); ++k)
                acc += std::abs(knots[k].twist);
            row.steady_twist = acc / static_cast<double>(tail);
            row.ok = true;
        } catch (const std::exception& e) {
            row.message = e.what();
        }
    };

    threads = std::max(1, threads);
    if (threads == 1) {
        for (size_t i = 0; i < angles.size(); ++i) run_row(i);
    } else {
        std::vector<std::thread> pool;
        std::atomic<size_t> next{0};
        for (int w = 0; w < threads; ++w)
            pool.emplace_back([&] {
                for (size_t i = next.fetch_add(1); i < angles.size();
                     i = next.fetch_add(1))
                    run_row(i);
            });
        for (auto& th : pool) th.join();
    }

    double best = -1.0;
    for (const auto& row : table.rows)
        if (row.ok && row.steady_twist > best) {
            best = row.steady_twist;
            table.argmax_angle = row.angle_deg;
        }
    return table;
}

// ---- validation suites ---------------------------------------------------------

namespace {

ScenarioConfig reduced_base() {
    ScenarioConfig cfg;
    cfg.arm.n_tm_rings = 20;
    cfg.arm.elements_per_rod = 12;
    cfg.arm.tm_ring_segments = 16;
    cfg.arm.tapered = false;
    cfg.duration = 0.4;
    cfg.source_text = scenario_to_json(cfg);
    return cfg;
}

ActivationTarget simple_ramp(RodGroup group, int index, int handedness,
                             double amplitude) {
    ActivationTarget t;
    t.group = group;
    t.index = index;
    t.handedness = handedness;
    t.schedule.kind = ActivationKind::Ramp;
    t.schedule.onset = 0.0;
    t.schedule.ramp_duration = 0.15;
    t.schedule.amplitude = amplitude;
    return t;
}

// Random open ribbon: perturbed helix centerline with transported normals
// plus a uniform twist rate.
RibbonFrame random_ribbon(unsigned& state) {
    auto rnd = [&]() {
        state = state * 1664525u + 1013904223u;
        return static_cast<double>(state) / 4294967296.0;
    };
    const double radius = 0.4 + 0.6 * rnd();
    const double pitch = 0.2 + 1.0 * rnd();
    const double turns = 0.5 + 1.5 * rnd();
    const double wobble = 0.03 * rnd();
    const double twist_rate = 3.0 * (rnd() - 0.5);
    // The discrete residual falls off as (features / n)^2; resolve
    // proportionally to the rotation content so every draw meets the bound.
    const int n = std::clamp(static_cast<int>(
        800.0 * (turns + std::abs(twist_rate) * radius * turns + 1.0)), 1200, 4000);

    RibbonFrame rb;
    std::vector<Vec3> tangents;
    for (int i = 0; i <= n; ++i) {
        const double u = turns * 2.0 * std::numbers::pi * i / n;
        rb.centerline.emplace_back(
            radius * std::cos(u) + wobble * std::cos(3.1 * u),
            radius * std::sin(u) + wobble * std::sin(2.3 * u),
            pitch * u / (2.0 * std::numbers::pi));
        rb.radii.push_back(1e-5);
    }
    // Parallel-transport a seed normal, then add the uniform twist.
    Vec3 t_prev = (rb.centerline[1] - rb.centerline[0]).normalized();
    Vec3 normal = Vec3::UnitZ().cross(t_prev);
    if (normal.norm() < 1e-6) normal = Vec3::UnitX();
    normal = (normal - normal.dot(t_prev) * t_prev).normalized();
    double arc = 0.0;
    for (int i = 0; i <= n; ++i) {
        Vec3 t;
        if (i == 0)
            t = rb.centerline[1] - rb.centerline[0];
        else if (i == n)
            t = rb.centerline[n] - rb.centerline[n - 1];
        else
            t = rb.centerline[i + 1] - rb.centerline[i - 1];
        t.normalize();
        if (i > 0) {
            const Vec3 axis = t_prev.cross(t);
            const double s = axis.norm();
            const double c = std::clamp(t_prev.dot(t), -1.0, 1.0);
            if (s > 1e-14)
                normal = rotation_exp(std::atan2(s, c) * axis / s) * normal;
            arc += (rb.centerline[i] - rb.centerline[i - 1]).norm();
        }
        const Vec3 twisted = rotation_exp(twist_rate * arc * t) * normal;
        rb.normals.push_back((twisted - twisted.dot(t) * t).normalized());
        t_prev = t;
        normal = (normal - normal.dot(t) * t).normalized();
    }
    return rb;
}

ValidationReport suite_cfw(unsigned seed) {
    ValidationReport report;
    report.suite = "cfw";
    unsigned state = seed * 2654435761u + 17u;
    for (int trial = 0; trial < 10; ++trial) {
        const auto rb = random_ribbon(state);
        const auto q = cfw_check(rb);
        report.rows.push_back({"cfw_residual_" + std::to_string(trial),
                               q.cfw_residual, 1e-6, q.cfw_residual <= 1e-6});
    }
    return report;
}

ValidationReport suite_primitives(unsigned /*seed*/) {
    ValidationReport report;
    report.suite = "primitives";
    const auto base = reduced_base();

    auto finish = [&](const std::string& id, double measured, double bound,
                      bool pass) {
        report.rows.push_back({id, measured, bound, pass});
    };

    {  // symmetric LM -> shorter
        ScenarioConfig cfg = base;
        cfg.activations.push_back(simple_ramp(RodGroup::LM, -1, 0, 0.15));
        const auto rec = run(cfg);
        const auto& last = rec.frames.back().node_positions[0];
        const auto& first = rec.frames.front().node_positions[0];
        double l0 = 0.0, l1 = 0.0;
        for (size_t i = 1; i < last.size(); ++i) {
            l0 += (first[i] - first[i - 1]).norm();
            l1 += (last[i] - last[i - 1]).norm();
        }
        finish("lm_shortens", l1 - l0, 0.0,
               rec.failure_frame < 0 && l1 < l0);
    }
    {  // uniform TM -> longer
        ScenarioConfig cfg = base;
        cfg.activations.push_back(simple_ramp(RodGroup::TM, -1, 0, 0.3));
        const auto rec = run(cfg);
        const auto& last = rec.frames.back().node_positions[0];
        const auto& first = rec.frames.front().node_positions[0];
        double l0 = 0.0, l1 = 0.0;
        for (size_t i = 1; i < last.size(); ++i) {
            l0 += (first[i] - first[i - 1]).norm();
            l1 += (last[i] - last[i - 1]).norm();
        }
        finish("tm_elongates", l1 - l0, 0.0,
               rec.failure_frame < 0 && l1 > l0);
    }
    {  // single LM -> in-plane bend
        ScenarioConfig cfg = base;
        cfg.activations.push_back(simple_ramp(RodGroup::LM, 0, 0, 0.1));
        const auto rec = run(cfg);
        const Vec3 tip = rec.frames.back().node_positions[0].back();
        const bool pass = rec.failure_frame < 0 && tip.x() > 0.005 &&
                          std::abs(tip.y()) < 0.05 * std::abs(tip.x());
        finish("lm_bends_in_plane", tip.x(), 0.005, pass);
    }
    {  // the two OM hands -> opposite twist
        double tw[2] = {0.0, 0.0};
        bool ok = true;
        for (int h = 0; h < 2; ++h) {
            ScenarioConfig cfg = base;
            cfg.activations.push_back(
                simple_ramp(RodGroup::OM, -1, h == 0 ? +1 : -1, 0.3));
            const auto rec = run(cfg);
            ok = ok && rec.failure_frame < 0;
            const auto knots = analyze_knot(rec);
            tw[h] = knots.back().twist;
        }
        finish("om_hands_twist_opposite", tw[0] * tw[1], 0.0,
               ok && tw[0] * tw[1] < 0.0);
    }
    return report;
}

ValidationReport suite_rest(unsigned /*seed*/) {
    ValidationReport report;
    report.suite = "rest";
    ScenarioConfig cfg = reduced_base();
    cfg.duration = 1.0;
    const auto rec = run(cfg);
    double max_disp = 0.0;
    const auto& first = rec.frames.front();
    const auto& last = rec.frames.back();
    for (size_t r = 0; r < first.node_positions.size(); ++r)
        for (size_t i = 0; i < first.node_positions[r].size(); ++i)
            max_disp = std::max(max_disp, (last.node_positions[r][i] -
                                           first.node_positions[r][i])
                                              .norm());
    report.rows.push_back({"rest_max_displacement", max_disp, 1e-6,
                           rec.failure_frame < 0 && max_disp <= 1e-6});
    return report;
}

}  // namespace

bool ValidationReport::all_pass() const {
    for (const auto& row : rows)
        if (!row.pass) return false;
    return !rows.empty();
}

std::vector<std::string> validation_suite_names() {
    return {"cfw", "primitives", "rest"};
}

ValidationReport run_validation_suite(const std::string& suite, unsigned seed) {
    if (suite == "cfw") return suite_cfw(seed);
    if (suite == "primitives") return suite_primitives(seed);
    if (suite == "rest") return suite_rest(seed);
    std::string names;
    for (const auto& n : validation_suite_names()) names += " " + n;
    throw ConfigError("validate: unknown suite '" + suite + "'; available:" +
                      names);
}

// ---- analysis ------------------------------------------------------------------

std::vector<KnotRow> analyze_knot(const TrajectoryRecord& record) {
    record.validate();
    std::vector<KnotRow> rows;
    rows.reserve(record.frames.size());
    for (const auto& frame : record.frames) {
        const auto q = cfw_check(frame_ribbon(frame));
        rows.push_back({frame.time, q.link, q.writhe, q.twist, q.cfw_residual});
    }
    return rows;
}

std::vector<BendRow> analyze_bend(const TrajectoryRecord& record) {
    record.validate();
    std::vector<BendRow> rows;
    rows.reserve(record.frames.size());
    for (const auto& frame : record.frames) {
        const auto& nodes = frame.node_positions[0];
        const int n = static_cast<int>(nodes.size()) - 1;
        // Arc length table.
        std::vector<double> arc(n + 1, 0.0);
        for (int i = 1; i <= n; ++i)
            arc[i] = arc[i - 1] + (nodes[i] - nodes[i - 1]).norm();
        const double total = arc[n];
        // Geometric bending curvature at interior nodes (twist excluded by
        // construction: the turning angle of the centerline ignores it).
        double best = -1.0;
        double best_s = 0.1;
        for (int i = 1; i < n; ++i) {
            const double s = arc[i] / total;
            if (s < 0.1) continue;  // distal 90% only
            const Vec3 a = (nodes[i] - nodes[i - 1]).normalized();
            const Vec3 b = (nodes[i + 1] - nodes[i]).normalized();
            const double angle =
                std::atan2(a.cross(b).norm(), std::clamp(a.dot(b), -1.0, 1.0));
            const double kappa = angle / (0.5 * (arc[i + 1] - arc[i - 1]));
            if (kappa > best) {
                best = kappa;
                best_s = s;
            }
        }
        rows.push_back({frame.time, best_s, 0.0});
    }
    for (size_t i = 1; i < rows.size(); ++i) {
        const double dt = rows[i].time - rows[i - 1].time;
        if (dt > 0.0)
            rows[i].velocity = (rows[i].arc_position - rows[i - 1].arc_position) / dt;
    }
    return rows;
}

}  // namespace octarm
