#include "octarm/rod.hpp"

#include <cmath>
#include <limits>

namespace octarm {

void RodState::validate() const {
    const int n = n_elements();
    if (n < 2) throw GeometryError("RodState: need at least 2 elements");
    if (static_cast<int>(node_positions.size()) != n + 1 ||
        static_cast<int>(node_velocities.size()) != n + 1 ||
        static_cast<int>(angular_velocities.size()) != n ||
        static_cast<int>(reference_lengths.size()) != n ||
        static_cast<int>(current_radii.size()) != n)
        throw GeometryError("RodState: inconsistent array sizes");
    for (int k = 0; k < n; ++k) {
        if (!(reference_lengths[k] > 0.0))
            throw GeometryError("RodState: non-positive reference length at element " +
                                std::to_string(k));
        if (!(current_radii[k] > 0.0))
            throw GeometryError("RodState: non-positive radius at element " +
                                std::to_string(k));
    }
}

double RodState::current_length() const {
    double len = 0.0;
    for (size_t k = 0; k + 1 < node_positions.size(); ++k)
        len += (node_positions[k + 1] - node_positions[k]).norm();
    return len;
}

RodElasticity RodElasticity::uniform(int n, double density, double E, double G,
                                     double alpha_c, double radius) {
    RodElasticity el;
    el.density = density;
    el.youngs_modulus = E;
    el.shear_modulus = G;
    el.shear_correction = alpha_c;
    el.intrinsic_shear.assign(n, Vec3::Zero());
    el.intrinsic_curvature.assign(n - 1, Vec3::Zero());
    const double A = M_PI * radius * radius;
    const double I = 0.25 * M_PI * std::pow(radius, 4);
    el.area.assign(n, A);
    el.second_moments.assign(n, Vec3(I, I, 2.0 * I));
    return el;
}

void RodElasticity::validate(int n) const {
    if (!(density > 0.0 && youngs_modulus > 0.0 && shear_modulus > 0.0 &&
          shear_correction > 0.0))
        throw GeometryError("RodElasticity: moduli and density must be positive");
    if (static_cast<int>(area.size()) != n ||
        static_cast<int>(second_moments.size()) != n ||
        static_cast<int>(intrinsic_shear.size()) != n ||
        static_cast<int>(intrinsic_curvature.size()) != n - 1)
        throw GeometryError("RodElasticity: per-element arrays sized wrong");
    for (int k = 0; k < n; ++k)
        if (!(area[k] > 0.0) || !(second_moments[k].minCoeff() > 0.0))
            throw GeometryError("RodElasticity: S/B not positive definite at element " +
                                std::to_string(k));
}

void DampingConfig::validate() const {
    if (rayleigh_coefficient < 0.0 || laplacian_filter_strength < 0.0 ||
        laplacian_filter_strength > 1.0 || laplacian_filter_interval < 1)
        throw ConfigError("DampingConfig: coefficients out of range");
}

void ExternalLoads::clear() {
    for (auto& f : node_forces) f.setZero();
    for (auto& c : element_couples) c.setZero();
}

std::vector<Vec3> compute_shear_strain(const RodState& state) {
    const int n = state.n_elements();
    std::vector<Vec3> eps(n);
    for (int k = 0; k < n; ++k) {
        const Vec3 d = state.node_positions[k + 1] - state.node_positions[k];
        if (d.squaredNorm() == 0.0)
            throw GeometryError("degenerate element (zero current length) at element " +
                                std::to_string(k));
        const Vec3 xs = d / state.reference_lengths[k];
        // Q (x_s - d3) = Q x_s - e3
        eps[k] = state.directors[k] * xs - Vec3::UnitZ();
    }
    return eps;
}

static double voronoi_length(const RodState& state, int node) {
    // node in [1, n-1]
    return 0.5 * (state.reference_lengths[node - 1] + state.reference_lengths[node]);
}

std::vector<Vec3> compute_curvature(const RodState& state) {
    const int n = state.n_elements();
    std::vector<Vec3> kappa(n - 1);
    for (int i = 1; i < n; ++i) {
        const Mat3 rel = state.directors[i] * state.directors[i - 1].transpose();
        kappa[i - 1] = -rotation_log(rel) / voronoi_length(state, i);
    }
    return kappa;
}

std::vector<double> compute_axial_strain_rate(const RodState& state) {
    const int n = state.n_elements();
    std::vector<double> rate(n);
    for (int k = 0; k < n; ++k) {
        const Vec3 d = state.node_positions[k + 1] - state.node_positions[k];
        const Vec3 dv = state.node_velocities[k + 1] - state.node_velocities[k];
        const double len = d.norm();
        // d/dt |x_{k+1}-x_k| / l_ref
        rate[k] = (len > 0.0) ? d.dot(dv) / (len * state.reference_lengths[k]) : 0.0;
    }
    return rate;
}

InternalLoads internal_loads(const RodState& state, const RodElasticity& el,
                             std::optional<std::span<const double>> axial_override) {
    const int n = state.n_elements();
    const auto eps = compute_shear_strain(state);
    const auto kappa = compute_curvature(state);

    InternalLoads out;
    out.element_forces.resize(n);
    out.node_torques.resize(n - 1);
    for (int k = 0; k < n; ++k) {
        const double sAG = el.shear_correction * el.shear_modulus * el.area[k];
        const double EA = el.youngs_modulus * el.area[k];
        const Vec3 de = eps[k] - el.intrinsic_shear[k];
        Vec3 nvec(sAG * de.x(), sAG * de.y(), EA * de.z());
        if (axial_override) nvec.z() = (*axial_override)[k];
        out.element_forces[k] = nvec;
    }
    for (int i = 0; i < n - 1; ++i) {
        // Stiffness at an interior node: average of the adjacent elements.
        const Vec3 I = 0.5 * (el.second_moments[i] + el.second_moments[i + 1]);
        const Vec3 dk = kappa[i] - el.intrinsic_curvature[i];
        out.node_torques[i] = Vec3(el.youngs_modulus * I.x() * dk.x(),
                                   el.youngs_modulus * I.y() * dk.y(),
                                   el.shear_modulus * I.z() * dk.z());
    }
    return out;
}

std::vector<double> node_masses(const RodState& state, const RodElasticity& el) {
    const int n = state.n_elements();
    std::vector<double> m(n + 1, 0.0);
    for (int k = 0; k < n; ++k) {
        const double half = 0.5 * el.density * el.area[k] * state.reference_lengths[k];
        m[k] += half;
        m[k + 1] += half;
    }
    return m;
}

Accelerations compute_accelerations(const RodState& state, const RodElasticity& el,
                                    const InternalLoads& loads,
                                    const ExternalLoads& external) {
    const int n = state.n_elements();
    const auto masses = node_masses(state, el);
    const auto kappa = compute_curvature(state);

    Accelerations acc;
    acc.linear.assign(n + 1, Vec3::Zero());
    acc.angular.assign(n, Vec3::Zero());

    // Linear: node i collects the difference of lab-frame element forces.
    for (int i = 0; i <= n; ++i) {
        Vec3 f = external.node_forces[i];
        if (i < n) f += state.directors[i].transpose() * loads.element_forces[i];
        if (i > 0) f -= state.directors[i - 1].transpose() * loads.element_forces[i - 1];
        acc.linear[i] = f / masses[i];
    }

    // Angular: element k, all quantities in its local frame.
    for (int k = 0; k < n; ++k) {
        const double l = state.reference_lengths[k];
        const Vec3 J = el.density * el.second_moments[k] * l;

        Vec3 m = Vec3::Zero();
        // d_s tau: difference of interior-node torques bounding this element.
        if (k + 1 <= n - 1) m += loads.node_torques[k];       // node k+1 (index k)
        if (k >= 1) m -= loads.node_torques[k - 1];           // node k

        // kappa x tau, split half-half between the node's two elements.
        if (k + 1 <= n - 1)
            m += kappa[k].cross(loads.node_torques[k]) * 0.5 * voronoi_length(state, k + 1);
        if (k >= 1)
            m += kappa[k - 1].cross(loads.node_torques[k - 1]) * 0.5 * voronoi_length(state, k);

        // (Q x_s) x n, integrated over the element.
        const Vec3 xs = (state.node_positions[k + 1] - state.node_positions[k]) /
                        state.reference_lengths[k];
        m += (state.directors[k] * xs).cross(loads.element_forces[k]) * l;

        // Gyroscopic term (rho I w) x w.
        const Vec3& w = state.angular_velocities[k];
        m += Vec3(J.x() * w.x(), J.y() * w.y(), J.z() * w.z()).cross(w);

        // External couple, rotated to the local frame.
        m += state.directors[k] * external.element_couples[k];

        acc.angular[k] = Vec3(m.x() / J.x(), m.y() / J.y(), m.z() / J.z());
    }
    return acc;
}

void position_half_step(RodState& state, double dt) {
    const double h = 0.5 * dt;
    for (size_t i = 0; i < state.node_positions.size(); ++i)
        state.node_positions[i] += h * state.node_velocities[i];
    for (size_t k = 0; k < state.directors.size(); ++k) {
        const Vec3& w = state.angular_velocities[k];
        if (w.squaredNorm() > 0.0)
            state.directors[k] = rotation_exp(-h * w) * state.directors[k];
    }
}

void velocity_step(RodState& state, const Accelerations& acc, double dt) {
    for (size_t i = 0; i < state.node_velocities.size(); ++i)
        state.node_velocities[i] += dt * acc.linear[i];
    for (size_t k = 0; k < state.angular_velocities.size(); ++k)
        state.angular_velocities[k] += dt * acc.angular[k];
}

void step_verlet(RodState& state, const RodElasticity& el,
                 const ExternalLoads& external, double dt,
                 std::optional<std::span<const double>> axial_override) {
    if (!(dt > 0.0)) throw ConfigError("step_verlet: dt must be positive");
    position_half_step(state, dt);
    const auto loads = internal_loads(state, el, axial_override);
    const auto acc = compute_accelerations(state, el, loads, external);
    velocity_step(state, acc, dt);
    position_half_step(state, dt);

    for (const auto& v : state.node_velocities)
        if (!v.allFinite())
            throw SimulationError("step_verlet: non-finite velocity (instability)");
}

namespace {

// Mass-weighted diffusion step v <- v - mu M^-1 L v with edge weights
// m_i m_j / (m_i + m_j). For mu <= 1/2 this provably cannot increase the
// kinetic energy, and it reduces to (mu/2) * discrete-Laplacian smoothing on
// a uniform-mass interior. Rigid translation lies in its nullspace.
void diffuse(std::vector<Vec3>& v, const std::vector<double>& mass, double mu) {
    const size_t n = v.size();
    if (n < 2) return;
    std::vector<Vec3> prev = v;
    for (size_t i = 0; i < n; ++i) {
        Vec3 flux = Vec3::Zero();
        if (i > 0) {
            const double w = mass[i - 1] * mass[i] / (mass[i - 1] + mass[i]);
            flux += w * (prev[i - 1] - prev[i]);
        }
        if (i + 1 < n) {
            const double w = mass[i + 1] * mass[i] / (mass[i + 1] + mass[i]);
            flux += w * (prev[i + 1] - prev[i]);
        }
        v[i] += (mu / mass[i]) * flux;
    }
}

}  // namespace

void apply_damping(RodState& state, const RodElasticity& el,
                   const DampingConfig& cfg, double dt, long step_index) {
    if (cfg.rayleigh_coefficient > 0.0) {
        const double decay = std::exp(-cfg.rayleigh_coefficient * dt);
        for (auto& v : state.node_velocities) v *= decay;
        for (auto& w : state.angular_velocities) w *= decay;
    }
    if (cfg.laplacian_filter_strength > 0.0 &&
        step_index % cfg.laplacian_filter_interval == 0) {
        const double mu = 0.5 * cfg.laplacian_filter_strength;
        diffuse(state.node_velocities, node_masses(state, el), mu);
        // Angular velocities use the mean rotational inertia as weight.
        std::vector<double> inertia(state.n_elements());
        for (int k = 0; k < state.n_elements(); ++k)
            inertia[k] = el.density * el.second_moments[k].mean() *
                         state.reference_lengths[k];
        diffuse(state.angular_velocities, inertia, mu);
    }
}

double stable_dt(const RodState& state, const RodElasticity& el, double safety) {
    double dt = std::numeric_limits<double>::max();
    const double c = std::sqrt(el.density / el.youngs_modulus);
    for (double l : state.reference_lengths) dt = std::min(dt, safety * l * c);
    return dt;
}

double stable_dt_full(const RodState& state, const RodElasticity& el,
                      double safety) {
    double dt = std::numeric_limits<double>::max();
    const double rho = el.density;
    for (int k = 0; k < state.n_elements(); ++k) {
        const double l = state.reference_lengths[k];
        const double r = state.current_radii[k];
        dt = std::min(dt, safety * l * std::sqrt(rho / el.youngs_modulus));
        dt = std::min(dt, safety * l * std::sqrt(rho / el.shear_modulus));
        // Shear-rotation coupling: omega = (2/r) sqrt(alpha_c G / rho).
        dt = std::min(dt, safety * r * std::sqrt(rho / (el.shear_correction *
                                                        el.shear_modulus)));
    }
    return dt;
}

double kinetic_energy(const RodState& state, const RodElasticity& el) {
    const auto masses = node_masses(state, el);
    double e = 0.0;
    for (size_t i = 0; i < masses.size(); ++i)
        e += 0.5 * masses[i] * state.node_velocities[i].squaredNorm();
    for (int k = 0; k < state.n_elements(); ++k) {
        const Vec3 J = el.density * el.second_moments[k] * state.reference_lengths[k];
        const Vec3& w = state.angular_velocities[k];
        e += 0.5 * (J.x() * w.x() * w.x() + J.y() * w.y() * w.y() + J.z() * w.z() * w.z());
    }
    return e;
}

double elastic_energy(const RodState& state, const RodElasticity& el) {
    const auto eps = compute_shear_strain(state);
    const auto kappa = compute_curvature(state);
    double e = 0.0;
    for (int k = 0; k < state.n_elements(); ++k) {
        const double sAG = el.shear_correction * el.shear_modulus * el.area[k];
        const double EA = el.youngs_modulus * el.area[k];
        const Vec3 de = eps[k] - el.intrinsic_shear[k];
        e += 0.5 * (sAG * (de.x() * de.x() + de.y() * de.y()) + EA * de.z() * de.z()) *
             state.reference_lengths[k];
    }
    for (int i = 1; i < state.n_elements(); ++i) {
        const Vec3 I = 0.5 * (el.second_moments[i - 1] + el.second_moments[i]);
        const Vec3 dk = kappa[i - 1] - el.intrinsic_curvature[i - 1];
        e += 0.5 *
             (el.youngs_modulus * (I.x() * dk.x() * dk.x() + I.y() * dk.y() * dk.y()) +
              el.shear_modulus * I.z() * dk.z() * dk.z()) *
             voronoi_length(state, i);
    }
    return e;
}

double max_orthonormality_defect(const RodState& state) {
    double worst = 0.0;
    for (const auto& q : state.directors) {
        const Mat3 defect = q * q.transpose() - Mat3::Identity();
        worst = std::max(worst, defect.cwiseAbs().maxCoeff());
    }
    return worst;
}

void reorthonormalize(RodState& state) {
    for (auto& q : state.directors) q = orthonormalize(q);
}

RodState make_straight_rod(const Vec3& base, const Vec3& axis_unit, double length,
                           int n, double radius) {
    RodState s;
    const Vec3 t = axis_unit.normalized();
    // Any unit vector not parallel to t seeds d1.
    Vec3 seed = (std::abs(t.z()) < 0.9) ? Vec3::UnitZ() : Vec3::UnitX();
    const Vec3 d1 = (seed - seed.dot(t) * t).normalized();
    const Vec3 d2 = t.cross(d1);
    Mat3 q;
    q.row(0) = d1;
    q.row(1) = d2;
    q.row(2) = t;

    const double dl = length / n;
    s.node_positions.resize(n + 1);
    for (int i = 0; i <= n; ++i) s.node_positions[i] = base + t * (dl * i);
    s.directors.assign(n, q);
    s.node_velocities.assign(n + 1, Vec3::Zero());
    s.angular_velocities.assign(n, Vec3::Zero());
    s.reference_lengths.assign(n, dl);
    s.current_radii.assign(n, radius);
    return s;
}

}  // namespace octarm
