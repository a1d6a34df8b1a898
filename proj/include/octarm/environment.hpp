#pragma once

#include <utility>
#include <vector>

#include "octarm/assembly.hpp"
#include "octarm/simulation.hpp"
#include "octarm/types.hpp"

namespace octarm {

// Point sample of a rod or obstacle element: everything the environment
// force laws need to know about one element.
struct ElementSample {
    Vec3 center = Vec3::Zero();
    Vec3 velocity = Vec3::Zero();
    Vec3 tangent = Vec3::UnitZ();  // unit
    double radius = 0.0;           // m
    double length = 0.0;           // m
};

// Fixed rigid cylinder, discretized into elements along its axis.
struct RigidCylinder {
    Vec3 end_a = Vec3::Zero();
    Vec3 end_b = Vec3::UnitZ();
    double radius = 0.01;   // m
    int n_elements = 16;
    Vec3 velocity = Vec3::Zero();  // fixed obstacles: zero

    void validate() const;
    ElementSample element(int k) const;
    // Nearest cylinder element to a point (exact linear scan).
    ElementSample nearest_element(const Vec3& point) const;
};

struct ContactParams {
    double k_r = 1e4;     // N/m    (engine default, not a fitted value)
    double gamma_r = 0.1; // N s/m
    double mu_f = 0.5;    // Coulomb coefficient
    double gamma_f = 0.1; // N s/m
    // Slip speeds below this are treated as stick to avoid the direction
    // singularity of v_s/|v_s|.
    double stick_speed = 1e-6;  // m/s

    void validate() const;
};

struct DragParams {
    double rho_w = 1022.0;  // kg/m^3
    double c_t = 0.0256;    // tangential coefficient
    double c_p = 1.01;      // perpendicular coefficient

    void validate() const;
};

// Normal contact force on the rod element:
// F = H(eps) (k_r eps - gamma_r v_rel . delta_hat) delta_hat,
// delta_hat pointing from the obstacle element to the rod element.
Vec3 obstacle_normal_force(const ElementSample& rod, const ElementSample& obstacle,
                           const ContactParams& params,
                           double* penetration = nullptr);

// Coulomb-capped viscous friction opposing the surface slip velocity:
// F = -min(gamma_f |v_s|, mu_f |F_r|) v_s / |v_s|.
Vec3 obstacle_friction_force(const ElementSample& rod,
                             const ElementSample& obstacle,
                             const Vec3& normal_force,
                             const ContactParams& params);

// Anisotropic quadratic drag (tangential, perpendicular):
// F_t = -0.5 rho_w (2 pi r l) C_t |v_t| v_t, F_p = -0.5 rho_w (2 r l) C_p |v_p| v_p.
std::pair<Vec3, Vec3> drag_forces(const ElementSample& rod, const Vec3& velocity,
                                  const DragParams& params);

struct Environment {
    std::vector<RigidCylinder> obstacles;
    ContactParams contact;
    DragParams drag;
    bool drag_enabled = false;

    void validate() const;
};

// Running energy ledger for the dissipative environment terms. Work is
// accumulated per call from force * velocity * dt.
struct EnvironmentStats {
    double dissipated_work = 0.0;      // J, >= 0
    double max_obstacle_penetration = 0.0;  // of the touch distance
};

// Adapter feeding step_arm: obstacle contact acts on the outermost (oblique)
// rods, drag on every rod element. `dt` is the step the caller will take
// (used only for the work ledger); `stats` may be null.
ExtraLoadFn environment_loads(const Environment& env, double dt,
                              EnvironmentStats* stats = nullptr);

// Timestep bound for the obstacle contact spring against the lightest
// contactable rod element, merged with the assembly bound by the caller.
double environment_stable_dt(const ArmAssembly& arm, const Environment& env,
                             double safety = 0.3);

}  // namespace octarm
