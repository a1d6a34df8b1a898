#include "octarm/simulation.hpp"

#include <algorithm>

namespace octarm {

double assembly_stable_dt(const ArmAssembly& arm, double safety) {
    double dt = std::numeric_limits<double>::max();
    for (const auto& rod : arm.rods)
        dt = std::min(dt, stable_dt_full(rod.state, rod.elast, safety));

    auto elem_mass = [&](int rod, int elem) {
        const auto& r = arm.rods[rod];
        return r.elast.density * r.elast.area[elem] *
               r.state.reference_lengths[elem];
    };
    // Several springs can share one element, so the bound accumulates the
    // total coupling stiffness seen by each element before converting it to
    // a frequency.
    std::vector<std::vector<double>> k_elem(arm.rods.size());
    std::vector<std::vector<double>> k_rot(arm.rods.size());
    for (size_t i = 0; i < arm.rods.size(); ++i) {
        k_elem[i].assign(arm.rods[i].state.n_elements(), 0.0);
        k_rot[i].assign(arm.rods[i].state.n_elements(), 0.0);
    }
    for (const auto& c : arm.connections) {
        k_elem[c.rod_a][c.elem_a] += c.k_s;
        k_elem[c.rod_b][c.elem_b] += c.k_s;
        k_rot[c.rod_a][c.elem_a] += c.k_s * c.arm_a * c.arm_a;
        k_rot[c.rod_b][c.elem_b] += c.k_s * c.arm_b * c.arm_b;
    }
    // Contact tangent stiffness evaluated at full-touch penetration; the
    // extra headroom also covers the explicit contact dashpot.
    for (const auto& p : arm.contacts) {
        const double touch = arm.rods[p.rod_a].state.current_radii[p.elem_a] +
                             arm.rods[p.rod_b].state.current_radii[p.elem_b];
        const double k_t = 1.5 * p.k_c * std::sqrt(touch);
        k_elem[p.rod_a][p.elem_a] += k_t;
        k_elem[p.rod_b][p.elem_b] += k_t;
    }
    for (size_t i = 0; i < arm.rods.size(); ++i)
        for (size_t k = 0; k < k_elem[i].size(); ++k) {
            if (k_elem[i][k] <= 0.0 && k_rot[i][k] <= 0.0) continue;
            const double m = elem_mass(static_cast<int>(i), static_cast<int>(k));
            const double r = arm.rods[i].state.current_radii[k];
            const double i_spin = 0.5 * m * r * r;
            const double w2 =
                2.0 * k_elem[i][k] / m + 2.0 * k_rot[i][k] / i_spin;
            dt = std::min(dt, 2.0 * safety / std::sqrt(w2));
        }
    return dt;
}

ArmStepStats step_arm(ArmAssembly& arm, const ActivationSet& activations,
                      double t, double dt, const DampingConfig& damping,
                      long step_index, const ExtraLoadFn& extra) {
    for (auto& rod : arm.rods) position_half_step(rod.state, dt);

    const double tau = std::max(arm.spec.strain_rate_filter_time, dt);
    for (auto& rod : arm.rods) {
        const auto raw = compute_axial_strain_rate(rod.state);
        const double alpha = dt / tau;
        for (size_t k = 0; k < raw.size(); ++k)
            rod.filtered_strain_rate[k] += alpha * (raw[k] - rod.filtered_strain_rate[k]);
    }

    auto loads = gather_assembly_loads(arm, activations, t + 0.5 * dt);
    if (extra)
        extra(arm, loads.external, t + 0.5 * dt, &loads.max_penetration_ratio);

    for (size_t r = 0; r < arm.rods.size(); ++r) {
        auto& rod = arm.rods[r];
        const auto acc = compute_accelerations(
            rod.state, rod.elast,
            internal_loads(rod.state, rod.elast,
                           std::span<const double>(loads.axial_override[r])),
            loads.external[r]);
        velocity_step(rod.state, acc, dt);
    }
    for (auto& rod : arm.rods) {
        position_half_step(rod.state, dt);
        apply_damping(rod.state, rod.elast, damping, dt, step_index);
    }
    arm.enforce_clamps();

    ArmStepStats stats;
    stats.max_penetration_ratio = loads.max_penetration_ratio;
    return stats;
}

}  // namespace octarm
