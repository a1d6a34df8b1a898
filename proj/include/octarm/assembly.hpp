#pragma once

#include <map>
#include <string>
#include <vector>

#include "octarm/muscle.hpp"
#include "octarm/rod.hpp"

namespace octarm {

enum class RodGroup { ANC, LM, TM, OM };

std::string to_string(RodGroup g);
RodGroup rod_group_from_string(const std::string& s);

// Geometry and census of the arm. Default values reproduce the reference
// architecture: 20 cm long, 24 mm base diameter, 197 rods.
struct ArmSpec {
    double total_length = 0.20;     // m
    double base_diameter = 0.024;   // m
    bool tapered = true;
    // Radii shrink linearly to this fraction of the base value at the tip
    // (the resulting profile-to-axis angle is ~3 degrees for the defaults).
    double tip_radius_fraction = 0.02;
    double winding_angle_deg = 74.0;  // OM pitch angle measured from the axis

    // Cross-section area fractions at the base.
    double frac_anc = 0.10;
    double frac_lm = 0.50;
    double frac_tm = 0.20;
    double frac_om = 0.20;

    int n_lm = 8;
    int n_om_per_hand = 4;
    int n_tm_rings = 180;

    int elements_per_rod = 40;   // ANC and LM
    int tm_ring_segments = 16;   // multiple of n_lm
    int om_elements_per_turn = 8;

    double density = 1042.0;          // kg/m^3
    double shear_correction = 0.9;    // circular section, nu = 1/2
    double alpha_s = 1.0;             // connection scale
    double alpha_c = 1.0;             // contact scale
    double k_s_override = 0.0;        // N/m; 0 = scale * E_mean * elem length
    double k_c_override = 0.0;        // N/m^(3/2); 0 = scale * Hertz from E*
    double connection_stiffness_scale = 10.0;
    double contact_stiffness_scale = 100.0;
    double contact_damping_ratio = 0.7;
    double strain_rate_filter_time = 0.01;  // s
    std::string materials_path;       // empty = built-in fallback set

    void validate() const;
    double base_radius() const { return 0.5 * base_diameter; }
    // Radius scale factor at axial position z.
    double taper_scale(double z) const;
};

struct ArmRod {
    RodGroup group = RodGroup::ANC;
    int index_in_group = 0;
    int handedness = 0;  // +1 / -1 for the two OM hands
    RodState state;
    RodElasticity elast;
    MuscleMaterial material;      // axial law; unused for ANC
    std::vector<double> arc_coord;  // normalized arc length per element
    // Low-pass filtered axial strain rate feeding the force-velocity law.
    // Muscle force development is not instantaneous, and the raw rate would
    // couple an explicitly integrated damping term too stiffly to the very
    // light ring elements.
    std::vector<double> filtered_strain_rate;
    bool is_ring = false;
};

// Distributed displacement-force binding between two elements. Surface
// points x_i = c_i + h_i * s_i with s_i co-rotating with the element frame;
// h_i splits the rest center distance in proportion to the radii so the two
// surface points coincide at rest (equal to the radius when rods touch).
struct Connection {
    int rod_a = 0, rod_b = 0;
    int elem_a = 0, elem_b = 0;
    Vec3 s_local_a = Vec3::Zero(), s_local_b = Vec3::Zero();
    double arm_a = 0.0, arm_b = 0.0;  // h_i, m
    double k_s = 0.0;                 // N/m
};

struct ContactPair {
    int rod_a = 0, rod_b = 0;
    int elem_a = 0, elem_b = 0;
    double k_c = 0.0;        // N/m^(3/2)
    Vec3 rest_direction = Vec3::UnitX();  // fallback for coincident centers
};

// One muscle command: which rods it drives and the activation template.
struct ActivationTarget {
    RodGroup group = RodGroup::LM;
    int index = -1;       // index within group; -1 = all
    int handedness = 0;   // OM only: +1/-1, 0 = both hands
    ActivationSchedule schedule;
};
using ActivationSet = std::vector<ActivationTarget>;

struct AssemblyLoads {
    std::vector<ExternalLoads> external;            // per rod
    std::vector<std::vector<double>> axial_override; // per rod, per element; n3
    double max_penetration_ratio = 0.0;
};

struct CrossSectionAudit {
    double anc = 0.0, lm = 0.0, tm = 0.0, om = 0.0;
};

struct ArmAssembly {
    ArmSpec spec;
    std::vector<ArmRod> rods;
    std::vector<Connection> connections;
    std::vector<ContactPair> contacts;
    // (rod index, node index) pairs pinned to their rest position.
    std::vector<std::pair<int, int>> clamped_nodes;
    std::vector<Vec3> clamp_positions;

    int count(RodGroup g) const;
    int rod_of(RodGroup g, int index_in_group, int handedness = 0) const;
    double arm_length() const;  // ANC current length
    Vec3 tip_position() const;

    // Re-pin clamped nodes (call after each integration step).
    void enforce_clamps();
};

ArmAssembly build_arm(const ArmSpec& spec);

// Area fractions at the base cross-section relative to the nominal radius.
CrossSectionAudit cross_section_audit(const ArmAssembly& arm);

// Loads on both elements of a connection, lab frame:
// F_i = alpha_s k_s delta_i, C_i = h_i s_i x F_i.
struct ConnectionLoads {
    Vec3 force_a, force_b;    // exactly opposite
    Vec3 couple_a, couple_b;  // lab frame
};
ConnectionLoads connection_loads(const Connection& c, const RodState& a,
                                 const RodState& b, double alpha_s);

// Hertzian force on elem_a (elem_b receives the negative).
Vec3 rod_contact_force(const ContactPair& p, const RodState& a,
                       const RodState& b, double alpha_c,
                       double* penetration_ratio = nullptr);

// Resultant cancelled radial stress from a set of contact forces:
// sigma_r = (sum |F_k| - |sum F_k|) / (2 A_c), axial force A_c sigma_r.
double resultant_radial_stress(const std::vector<Vec3>& contact_forces,
                               double contact_area);

// Connections + contacts + intramuscular pressure + muscle axial law,
// accumulated in fixed order. Activations evaluated at time t.
AssemblyLoads gather_assembly_loads(const ArmAssembly& arm,
                                    const ActivationSet& activations, double t);

// Evaluate the combined activation for one rod at element arc coordinate s.
double rod_activation(const ArmRod& rod, const ActivationSet& activations,
                      double s, double t);

}  // namespace octarm
