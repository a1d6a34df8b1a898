#include "octarm/muscle.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace octarm {

namespace {

double horner(const std::array<double, 9>& c, double x) {
    double acc = 0.0;
    for (int i = 8; i >= 0; --i) acc = acc * x + c[i];
    return acc;
}

double smoothstep01(double x) {
    x = std::clamp(x, 0.0, 1.0);
    return x * x * (3.0 - 2.0 * x);
}

}  // namespace

void MuscleMaterial::validate() const {
    if (!(sigma_max > 0.0)) throw ConfigError("muscle '" + group + "': sigma_max must be > 0");
    if (!(compression_modulus > 0.0))
        throw ConfigError("muscle '" + group + "': E_c must be > 0");
    if (!(min_strain_rate < 0.0))
        throw ConfigError("muscle '" + group + "': min_strain_rate must be < 0");
    const double fl0 = horner(active_coeffs, 1.0);
    if (!std::isfinite(fl0) || fl0 < 0.0)
        throw ConfigError("muscle '" + group + "': force_length(0) must be finite and >= 0");
}

void ActivationSchedule::validate() const {
    if (amplitude < 0.0 || amplitude > 1.0)
        throw ConfigError("activation: amplitude must be in [0,1]");
    if (s_end <= s_start) throw ConfigError("activation: s_end must exceed s_start");
    if (ramp_duration <= 0.0) throw ConfigError("activation: ramp_duration must be > 0");
    if (wave_width <= 0.0) throw ConfigError("activation: wave_width must be > 0");
    if (sigmoid_steepness <= 0.0) throw ConfigError("activation: sigmoid_steepness must be > 0");
}

double force_length(double eps, const MuscleMaterial& m) {
    return std::max(0.0, horner(m.active_coeffs, eps + 1.0));
}

double force_velocity(double eps_dot, const MuscleMaterial& m) {
    const double r = eps_dot / m.min_strain_rate; // eps_dot*
    if (r < 0.0) return 1.8 - 0.8 * (1.0 + r) / (1.0 - 7.56 * r / 0.25);
    return (1.0 - r) / (1.0 + r / 0.25);
}

double passive_stress(double eps, const MuscleMaterial& m) {
    if (eps > 0.0)
        return m.sigma_max * horner(m.passive_coeffs, eps + 1.0) - m.passive_offset;
    return m.compression_modulus * eps;
}

double active_stress(double activation, double eps, double eps_dot,
                     const MuscleMaterial& m) {
    if (activation < 0.0 || activation > 1.0)
        throw ConfigError("active_stress: activation outside [0,1]");
    return activation * m.sigma_max * force_length(eps, m) *
           force_velocity(eps_dot, m);
}

double axial_internal_force(double area, double sigma_a, double sigma_p) {
    if (!(area > 0.0)) throw ConfigError("axial_internal_force: area must be > 0");
    return area * (sigma_a + sigma_p);
}

double evaluate_activation(const ActivationSchedule& sched, double s, double t) {
    if (t < sched.onset) return 0.0;
    if (s < sched.s_start || s > sched.s_end) return 0.0;
    const double ramp = smoothstep01((t - sched.onset) / sched.ramp_duration);

    double f = 0.0;
    switch (sched.kind) {
        case ActivationKind::Ramp:
            f = sched.amplitude * ramp;
            break;
        case ActivationKind::TravelingWave: {
            const double center = sched.s_start + sched.wave_speed * (t - sched.onset);
            const double u = (s - center) / sched.wave_width;
            if (std::abs(u) <= 0.5)
                f = sched.amplitude * ramp * 0.5 * (1.0 + std::cos(2.0 * M_PI * u));
            break;
        }
        case ActivationKind::SigmoidWavefront: {
            const double front = sched.s_start + sched.wave_speed * (t - sched.onset);
            f = sched.amplitude * ramp /
                (1.0 + std::exp(sched.sigmoid_steepness * (s - front)));
            break;
        }
    }
    return std::clamp(f, 0.0, 1.0);
}

std::map<std::string, MuscleMaterial> load_muscle_materials(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("muscle coefficient file not found: " + path);

    std::map<std::string, MuscleMaterial> out;
    std::string line;
    bool schema_seen = false;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ss(line);
        if (!schema_seen) {
            std::string kw, version;
            ss >> kw >> version;
            if (kw != "schema" || version != "octarm-muscle-v1")
                throw ConfigError(path + ":" + std::to_string(lineno) +
                                  ": expected 'schema octarm-muscle-v1'");
            schema_seen = true;
            continue;
        }
        MuscleMaterial m;
        ss >> m.group >> m.sigma_max;
        for (auto& a : m.active_coeffs) ss >> a;
        for (auto& b : m.passive_coeffs) ss >> b;
        ss >> m.compression_modulus;
        if (!ss)
            throw ConfigError(path + ":" + std::to_string(lineno) +
                              ": expected 'group sigma_max a0..a8 b0..b8 E_c'");
        // Shift the tension branch so both branches meet at sigma_p(0) = 0.
        m.passive_offset = m.sigma_max * horner(m.passive_coeffs, 1.0);
        m.validate();
        out[m.group] = m;
    }
    if (out.empty()) throw ConfigError(path + ": no muscle groups defined");
    return out;
}

std::map<std::string, MuscleMaterial> fallback_muscle_materials() {
    // Smooth unit-shaped curves: f_l is a downward parabola with f_l(0) = 1
    // and zeros at eps = +-0.8; the passive tension branch is 0.25*eps^2.
    auto make = [](const std::string& group, double ec) {
        MuscleMaterial m;
        m.group = group;
        m.sigma_max = 130e3;
        m.active_coeffs = {-0.5625, 3.125, -1.5625, 0, 0, 0, 0, 0, 0};
        m.passive_coeffs = {0.25, -0.5, 0.25, 0, 0, 0, 0, 0, 0};
        m.compression_modulus = ec;
        m.passive_offset = 0.0;
        return m;
    };
    std::map<std::string, MuscleMaterial> out;
    out["LM"] = make("LM", 25e3);
    out["TM"] = make("TM", 10e3);
    out["OM"] = make("OM", 25e3);
    return out;
}

}  // namespace octarm
