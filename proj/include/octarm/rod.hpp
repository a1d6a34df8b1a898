#pragma once

#include <optional>
#include <span>

#include "octarm/types.hpp"

namespace octarm {

// Discretized Cosserat rod: n+1 nodes, n cylindrical elements.
// Directors are stored row-wise (rows are d1, d2, d3 in lab coordinates),
// so v_local = Q * v_lab.
struct RodState {
    std::vector<Vec3> node_positions;     // n+1, m
    std::vector<Mat3> directors;          // n
    std::vector<Vec3> node_velocities;    // n+1, m/s
    std::vector<Vec3> angular_velocities; // n, local frame, rad/s
    std::vector<double> reference_lengths; // n, m
    std::vector<double> current_radii;     // n, m

    int n_elements() const { return static_cast<int>(directors.size()); }
    void validate() const; // throws GeometryError on invariant violation

    Vec3 element_center(int k) const {
        return 0.5 * (node_positions[k] + node_positions[k + 1]);
    }
    Vec3 element_velocity(int k) const {
        return 0.5 * (node_velocities[k] + node_velocities[k + 1]);
    }
    double current_length() const;
};

struct RodElasticity {
    double density = 0.0;        // kg/m^3
    double youngs_modulus = 0.0; // Pa
    double shear_modulus = 0.0;  // Pa
    double shear_correction = 1.0;
    std::vector<Vec3> intrinsic_shear;     // per element
    std::vector<Vec3> intrinsic_curvature; // per interior node
    std::vector<double> area;              // per element, m^2
    std::vector<Vec3> second_moments;      // per element (I1, I2, I3), m^4

    // Uniform-property convenience; intrinsic strain/curvature zero.
    static RodElasticity uniform(int n_elements, double density, double E,
                                 double G, double alpha_c, double radius);
    void validate(int n_elements) const;
};

struct DampingConfig {
    double rayleigh_coefficient = 0.0;    // 1/s
    double laplacian_filter_strength = 0.0; // [0, 1]
    int laplacian_filter_interval = 1;      // steps
    void validate() const;
};

// Internal loads in the local frame: forces per element, torques per
// interior node.
struct InternalLoads {
    std::vector<Vec3> element_forces;  // n, N
    std::vector<Vec3> node_torques;    // n-1, N*m
};

// External loads in the lab frame: forces at nodes, couples on elements.
struct ExternalLoads {
    std::vector<Vec3> node_forces;     // n+1, N
    std::vector<Vec3> element_couples; // n, N*m

    explicit ExternalLoads(int n_elements)
        : node_forces(n_elements + 1, Vec3::Zero()),
          element_couples(n_elements, Vec3::Zero()) {}
    void clear();
};

// Shear strain per element: eps = Q (x_s - d3), with x_s discretized against
// the reference length. Zero for an unstretched, unsheared rod.
std::vector<Vec3> compute_shear_strain(const RodState& state);

// Curvature per interior node via the rotation-vector logarithm of the
// relative director rotation over the Voronoi reference length.
// kappa_1/kappa_2 are bending, kappa_3 is twist.
std::vector<Vec3> compute_curvature(const RodState& state);

// Axial strain rate per element, d(eps_3)/dt evaluated from node velocities.
std::vector<double> compute_axial_strain_rate(const RodState& state);

// n = S (eps - eps0), tau = B (kappa - kappa0). When axial_override is
// supplied, n3 is replaced per element (muscle pathway); shear components and
// torques always follow the linear law.
InternalLoads internal_loads(const RodState& state, const RodElasticity& el,
                             std::optional<std::span<const double>> axial_override = {});

// Accelerations from balance of linear momentum (lab frame, at nodes) and
// angular momentum (local frame, per element). All Eq.-of-motion terms:
// d_s(Q^T n), d_s tau, kappa x tau, (Q x_s) x n, (rho I w) x w, Q c.
struct Accelerations {
    std::vector<Vec3> linear;  // n+1, lab frame
    std::vector<Vec3> angular; // n, local frame
};
Accelerations compute_accelerations(const RodState& state, const RodElasticity& el,
                                    const InternalLoads& loads,
                                    const ExternalLoads& external);

// Per-node mass and per-element rotational inertia diag(rho I l).
std::vector<double> node_masses(const RodState& state, const RodElasticity& el);

// One position-Verlet step: half drift, kick with loads evaluated at the
// midpoint configuration, half drift. Throws SimulationError on NaN/divergence.
void step_verlet(RodState& state, const RodElasticity& el,
                 const ExternalLoads& external, double dt,
                 std::optional<std::span<const double>> axial_override = {});

// Half-step position/director drift (exposed for the assembly integrator).
void position_half_step(RodState& state, double dt);
// Velocity kick from precomputed accelerations.
void velocity_step(RodState& state, const Accelerations& acc, double dt);

// Rayleigh decay every call; Laplacian velocity filter every
// `laplacian_filter_interval`-th call (step_index counts from 1).
// Kinetic energy is non-increasing; rigid translation passes untouched.
void apply_damping(RodState& state, const RodElasticity& el,
                   const DampingConfig& cfg, double dt, long step_index);

// Axial-wave CFL bound: 0.3 * min_k( l_k * sqrt(rho / E) ).
double stable_dt(const RodState& state, const RodElasticity& el,
                 double safety = 0.3);

// Tighter bound that also covers the rotational (shear-coupling, bending,
// twist) modes; needed for thin elements where radius << element length.
double stable_dt_full(const RodState& state, const RodElasticity& el,
                      double safety = 0.3);

double kinetic_energy(const RodState& state, const RodElasticity& el);
double elastic_energy(const RodState& state, const RodElasticity& el);

// Max |Q Q^T - I| over elements; invariant kept <= 1e-10.
double max_orthonormality_defect(const RodState& state);
void reorthonormalize(RodState& state);

// Straight rod along `axis` from `base`, identity-like directors with d3
// aligned to the axis.
RodState make_straight_rod(const Vec3& base, const Vec3& axis_unit, double length,
                           int n_elements, double radius);

}  // namespace octarm
