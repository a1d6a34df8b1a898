#include "octarm/environment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace octarm {

void RigidCylinder::validate() const {
    if (radius <= 0.0)
        throw ConfigError("rigid cylinder: radius must be positive");
    if (n_elements < 1)
        throw ConfigError("rigid cylinder: need at least one element");
    if ((end_b - end_a).norm() <= 0.0)
        throw ConfigError("rigid cylinder: endpoints coincide");
}

ElementSample RigidCylinder::element(int k) const {
    const Vec3 axis = end_b - end_a;
    const double len = axis.norm();
    ElementSample e;
    e.center = end_a + axis * (k + 0.5) / n_elements;
    e.velocity = velocity;
    e.tangent = axis / len;
    e.radius = radius;
    e.length = len / n_elements;
    return e;
}

ElementSample RigidCylinder::nearest_element(const Vec3& point) const {
    int best = 0;
    double best_d2 = std::numeric_limits<double>::max();
    for (int k = 0; k < n_elements; ++k) {
        const double d2 = (element(k).center - point).squaredNorm();
        if (d2 < best_d2) {
            best_d2 = d2;
            best = k;
        }
    }
    return element(best);
}

void ContactParams::validate() const {
    if (k_r < 0.0 || gamma_r < 0.0 || mu_f < 0.0 || gamma_f < 0.0)
        throw ConfigError("contact params: coefficients must be non-negative");
}

void DragParams::validate() const {
    if (rho_w <= 0.0 || c_t < 0.0 || c_p < 0.0)
        throw ConfigError("drag params: invalid coefficients");
}

void Environment::validate() const {
    for (const auto& c : obstacles) c.validate();
    contact.validate();
    drag.validate();
}

Vec3 obstacle_normal_force(const ElementSample& rod, const ElementSample& obstacle,
                           const ContactParams& params, double* penetration) {
    const Vec3 delta = rod.center - obstacle.center;
    const double dist = delta.norm();
    const double eps = rod.radius + obstacle.radius - dist;
    if (penetration) *penetration = std::max(eps, 0.0);
    if (eps <= 0.0 || dist <= 1e-12) return Vec3::Zero();
    const Vec3 dir = delta / dist;  // obstacle -> rod
    const Vec3 v_rel = rod.velocity - obstacle.velocity;
    const double magnitude = params.k_r * eps - params.gamma_r * v_rel.dot(dir);
    return magnitude * dir;
}

Vec3 obstacle_friction_force(const ElementSample& rod,
                             const ElementSample& obstacle,
                             const Vec3& normal_force,
                             const ContactParams& params) {
    if (normal_force.isZero(0.0)) return Vec3::Zero();
    const Vec3 delta = rod.center - obstacle.center;
    const double dist = delta.norm();
    if (dist <= 1e-12) return Vec3::Zero();
    const Vec3 dir = delta / dist;
    const Vec3 v_rel = rod.velocity - obstacle.velocity;
    const Vec3 slip = v_rel - v_rel.dot(dir) * dir;
    const double speed = slip.norm();
    if (speed < params.stick_speed) return Vec3::Zero();
    const double magnitude =
        std::min(params.gamma_f * speed, params.mu_f * normal_force.norm());
    return -magnitude / speed * slip;
}

std::pair<Vec3, Vec3> drag_forces(const ElementSample& rod, const Vec3& velocity,
                                  const DragParams& params) {
    const Vec3 v_t = velocity.dot(rod.tangent) * rod.tangent;
    const Vec3 v_p = velocity - v_t;
    const double a_t = 2.0 * std::numbers::pi * rod.radius * rod.length;
    const double a_p = 2.0 * rod.radius * rod.length;
    const Vec3 f_t = -0.5 * params.rho_w * a_t * params.c_t * v_t.norm() * v_t;
    const Vec3 f_p = -0.5 * params.rho_w * a_p * params.c_p * v_p.norm() * v_p;
    return {f_t, f_p};
}

namespace {

ElementSample sample_of(const ArmRod& rod, int k) {
    ElementSample e;
    e.center = rod.state.element_center(k);
    e.velocity = rod.state.element_velocity(k);
    e.tangent = rod.state.directors[k].row(2).transpose();
    e.radius = rod.state.current_radii[k];
    e.length = rod.state.reference_lengths[k];
    return e;
}

}  // namespace

ExtraLoadFn environment_loads(const Environment& env, double dt,
                              EnvironmentStats* stats) {
    return [env, dt, stats](const ArmAssembly& arm,
                            std::vector<ExternalLoads>& external, double /*t*/,
                            double* max_penetration) {
        const bool has_om = arm.count(RodGroup::OM) > 0;
        for (size_t r = 0; r < arm.rods.size(); ++r) {
            const ArmRod& rod = arm.rods[r];
            const int n = rod.state.n_elements();
            // Obstacles touch only the outermost layer of the arm.
            const bool contactable = !has_om || rod.group == RodGroup::OM;
            for (int k = 0; k < n; ++k) {
                const ElementSample elem = sample_of(rod, k);
                Vec3 f = Vec3::Zero();
                Vec3 f_dissipative = Vec3::Zero();
                if (env.drag_enabled) {
                    const auto [f_t, f_p] = drag_forces(elem, elem.velocity, env.drag);
                    f += f_t + f_p;
                    f_dissipative += f_t + f_p;
                }
                if (contactable) {
                    for (const auto& cyl : env.obstacles) {
                        const ElementSample obs = cyl.nearest_element(elem.center);
                        double pen = 0.0;
                        const Vec3 f_n =
                            obstacle_normal_force(elem, obs, env.contact, &pen);
                        if (pen <= 0.0) continue;
                        const Vec3 f_f =
                            obstacle_friction_force(elem, obs, f_n, env.contact);
                        f += f_n + f_f;
                        // Only the damping part of the normal force dissipates.
                        const Vec3 dir = (elem.center - obs.center).normalized();
                        f_dissipative +=
                            f_f - env.contact.gamma_r *
                                      (elem.velocity - obs.velocity).dot(dir) * dir;
                        const double touch = elem.radius + obs.radius;
                        if (max_penetration)
                            *max_penetration = std::max(*max_penetration,
                                                        pen / touch);
                        if (stats)
                            stats->max_obstacle_penetration =
                                std::max(stats->max_obstacle_penetration,
                                         pen / touch);
                    }
                }
                if (f.isZero(0.0)) continue;
                external[r].node_forces[k] += 0.5 * f;
                external[r].node_forces[k + 1] += 0.5 * f;
                if (stats)
                    stats->dissipated_work -= f_dissipative.dot(elem.velocity) * dt;
            }
        }
    };
}

double environment_stable_dt(const ArmAssembly& arm, const Environment& env,
                             double safety) {
    if (env.obstacles.empty() || env.contact.k_r <= 0.0)
        return std::numeric_limits<double>::max();
    double m_min = std::numeric_limits<double>::max();
    const bool has_om = arm.count(RodGroup::OM) > 0;
    for (const auto& rod : arm.rods) {
        if (has_om && rod.group != RodGroup::OM) continue;
        for (int k = 0; k < rod.state.n_elements(); ++k)
            m_min = std::min(m_min, rod.elast.density * rod.elast.area[k] *
                                        rod.state.reference_lengths[k]);
    }
    return 2.0 * safety / std::sqrt(env.contact.k_r / m_min);
}

}  // namespace octarm
