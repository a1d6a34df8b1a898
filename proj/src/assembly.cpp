#include "octarm/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace octarm {

namespace {

constexpr double tau = 2.0 * std::numbers::pi;

// Directors from chord tangents with d1 as close to `seed` as possible;
// guarantees zero rest shear against the recorded reference lengths.
void frame_from_chords(RodState& s, const std::vector<Vec3>& d1_seed) {
    const int n = s.n_elements();
    for (int k = 0; k < n; ++k) {
        const Vec3 chord = s.node_positions[k + 1] - s.node_positions[k];
        const double len = chord.norm();
        if (len < 1e-12) throw GeometryError("build_arm: degenerate element");
        const Vec3 d3 = chord / len;
        Vec3 d1 = d1_seed[k] - d1_seed[k].dot(d3) * d3;
        if (d1.norm() < 1e-10) throw GeometryError("build_arm: singular frame seed");
        d1.normalize();
        Mat3 q;
        q.row(0) = d1;
        q.row(1) = d3.cross(d1);
        q.row(2) = d3;
        s.directors[k] = q;
        s.reference_lengths[k] = len;
    }
}

RodElasticity make_elasticity(const RodState& state, double density, double E,
                              double alpha_c) {
    const int n = state.n_elements();
    RodElasticity el;
    el.density = density;
    el.youngs_modulus = E;
    el.shear_modulus = E / 3.0;  // nu = 1/2, incompressible tissue
    el.shear_correction = alpha_c;
    el.area.resize(n);
    el.second_moments.resize(n);
    for (int k = 0; k < n; ++k) {
        const double r = state.current_radii[k];
        el.area[k] = std::numbers::pi * r * r;
        const double I = 0.25 * std::numbers::pi * r * r * r * r;
        el.second_moments[k] = Vec3(I, I, 2.0 * I);
    }
    el.intrinsic_shear = compute_shear_strain(state);
    el.intrinsic_curvature = compute_curvature(state);
    return el;
}

struct BaseLayout {
    double r_anc, r_lm, rho_lm, r_tm, rho_tm, r_om, rho_om_inner, rho_om_outer;
};

BaseLayout layout(const ArmSpec& spec) {
    const double R = spec.base_radius();
    BaseLayout g;
    g.r_anc = std::sqrt(spec.frac_anc) * R;
    g.r_lm = std::sqrt(spec.frac_lm / spec.n_lm) * R;
    // LM ring radius: touch the ANC if possible, but never let neighboring
    // LM rods interpenetrate.
    g.rho_lm = std::max(g.r_anc + g.r_lm,
                        g.r_lm / std::sin(std::numbers::pi / spec.n_lm));
    const double ring_spacing = spec.total_length / spec.n_tm_rings;
    g.r_tm = std::min(0.5 * ring_spacing, 0.5 * g.r_lm);
    // All placement radii position ELEMENT CENTERS (chord midpoints); node
    // radii are inflated by the polygon sag factor at build time. The 10%
    // clearances leave a small rest gap (bridged by connections) so that
    // discretization and taper can never produce rest overlap.
    g.rho_tm = g.rho_lm + g.r_lm + 1.1 * g.r_tm;
    // An oblique fiber crosses the base plane as an ellipse of area
    // pi r^2 / cos(psi), so for a fixed plane-area budget the fiber
    // cross-section itself shrinks by cos(psi) as the winding steepens.
    const double cpsi = std::cos(spec.winding_angle_deg * std::numbers::pi / 180.0);
    g.r_om = std::sqrt(spec.frac_om * cpsi / (2.0 * spec.n_om_per_hand)) * R;
    g.rho_om_inner = g.rho_tm + g.r_tm + 1.1 * g.r_om;
    // Opposite-handed helices cross; the second hand sits one diameter out
    // so the layers just clear each other at the crossings.
    g.rho_om_outer = g.rho_om_inner + 2.1 * g.r_om;
    return g;
}

double group_modulus(RodGroup g, const std::map<std::string, MuscleMaterial>& mats) {
    switch (g) {
        case RodGroup::TM: return mats.at("TM").compression_modulus;
        case RodGroup::LM: return mats.at("LM").compression_modulus;
        case RodGroup::OM: return mats.at("OM").compression_modulus;
        case RodGroup::ANC: return mats.at("LM").compression_modulus;
    }
    return 25e3;
}

}  // namespace

std::string to_string(RodGroup g) {
    switch (g) {
        case RodGroup::ANC: return "ANC";
        case RodGroup::LM: return "LM";
        case RodGroup::TM: return "TM";
        case RodGroup::OM: return "OM";
    }
    return "?";
}

RodGroup rod_group_from_string(const std::string& s) {
    if (s == "ANC") return RodGroup::ANC;
    if (s == "LM") return RodGroup::LM;
    if (s == "TM") return RodGroup::TM;
    if (s == "OM") return RodGroup::OM;
    throw ConfigError("unknown rod group '" + s + "'");
}

void ArmSpec::validate() const {
    if (total_length <= 0.0 || base_diameter <= 0.0)
        throw ConfigError("arm spec: length and diameter must be positive");
    if (frac_anc + frac_lm + frac_tm + frac_om > 1.0 + 1e-9)
        throw ConfigError("arm spec: cross-section fractions exceed 1");
    if (n_lm < 2 || n_om_per_hand < 1 || n_tm_rings < 1)
        throw ConfigError("arm spec: invalid rod counts");
    if (elements_per_rod < 2 || tm_ring_segments < n_lm ||
        tm_ring_segments % n_lm != 0)
        throw ConfigError("arm spec: ring segments must be a positive multiple of n_lm");
    if (tip_radius_fraction <= 0.0 || tip_radius_fraction > 1.0)
        throw ConfigError("arm spec: tip radius fraction outside (0, 1]");
    if (winding_angle_deg <= 0.0 || winding_angle_deg >= 90.0)
        throw ConfigError("arm spec: winding angle outside (0, 90)");
}

double ArmSpec::taper_scale(double z) const {
    if (!tapered) return 1.0;
    const double u = std::clamp(z / total_length, 0.0, 1.0);
    return 1.0 - (1.0 - tip_radius_fraction) * u;
}

int ArmAssembly::count(RodGroup g) const {
    int c = 0;
    for (const auto& r : rods) c += (r.group == g);
    return c;
}

int ArmAssembly::rod_of(RodGroup g, int index_in_group, int handedness) const {
    for (int i = 0; i < static_cast<int>(rods.size()); ++i)
        if (rods[i].group == g && rods[i].index_in_group == index_in_group &&
            (handedness == 0 || rods[i].handedness == handedness))
            return i;
    throw ConfigError("rod_of: no such rod");
}

double ArmAssembly::arm_length() const { return rods[0].state.current_length(); }

Vec3 ArmAssembly::tip_position() const {
    return rods[0].state.node_positions.back();
}

void ArmAssembly::enforce_clamps() {
    for (size_t i = 0; i < clamped_nodes.size(); ++i) {
        auto& st = rods[clamped_nodes[i].first].state;
        st.node_positions[clamped_nodes[i].second] = clamp_positions[i];
        st.node_velocities[clamped_nodes[i].second].setZero();
    }
}

ArmAssembly build_arm(const ArmSpec& spec) {
    spec.validate();
    const auto mats = spec.materials_path.empty()
                          ? fallback_muscle_materials()
                          : load_muscle_materials(spec.materials_path);
    const BaseLayout g = layout(spec);
    const double L = spec.total_length;

    ArmAssembly arm;
    arm.spec = spec;

    auto straight_rod = [&](RodGroup group, int idx, double rho, double phi,
                            double radius) {
        ArmRod rod;
        rod.group = group;
        rod.index_in_group = idx;
        const int n = spec.elements_per_rod;
        rod.state.node_positions.resize(n + 1);
        rod.state.directors.resize(n);
        rod.state.reference_lengths.resize(n);
        rod.state.current_radii.resize(n);
        std::vector<Vec3> seed(n, Vec3(std::cos(phi), std::sin(phi), 0.0));
        if (rho == 0.0) seed.assign(n, Vec3::UnitX());
        for (int i = 0; i <= n; ++i) {
            const double z = L * i / n;
            const double s = spec.taper_scale(z);
            rod.state.node_positions[i] =
                Vec3(rho * s * std::cos(phi), rho * s * std::sin(phi), z);
        }
        frame_from_chords(rod.state, seed);
        for (int k = 0; k < n; ++k) {
            const double zm = L * (k + 0.5) / n;
            rod.state.current_radii[k] = radius * spec.taper_scale(zm);
            rod.arc_coord.push_back(zm / L);
        }
        rod.state.node_velocities.assign(n + 1, Vec3::Zero());
        rod.state.angular_velocities.assign(n, Vec3::Zero());
        rod.material = mats.at(group == RodGroup::ANC ? "LM" : to_string(group));
        rod.elast = make_elasticity(rod.state, spec.density,
                                    group_modulus(group, mats),
                                    spec.shear_correction);
        return rod;
    };

    // ANC down the axis, then the LM octet around it.
    arm.rods.push_back(straight_rod(RodGroup::ANC, 0, 0.0, 0.0, g.r_anc));
    for (int j = 0; j < spec.n_lm; ++j)
        arm.rods.push_back(
            straight_rod(RodGroup::LM, j, g.rho_lm, tau * j / spec.n_lm, g.r_lm));

    // TM rings: closed polygons in planes z = (i + 1/2) * spacing, node zero
    // offset by half a segment so element centers line up with the LM angles.
    const int m = spec.tm_ring_segments;
    for (int i = 0; i < spec.n_tm_rings; ++i) {
        const double zc = L * (i + 0.5) / spec.n_tm_rings;
        const double s = spec.taper_scale(zc);
        ArmRod rod;
        rod.group = RodGroup::TM;
        rod.index_in_group = i;
        rod.is_ring = true;
        rod.state.node_positions.resize(m + 1);
        rod.state.directors.resize(m);
        rod.state.reference_lengths.resize(m);
        rod.state.current_radii.assign(m, g.r_tm * s);
        std::vector<Vec3> seed(m);
        // Nodes pushed out by the sag factor so chord midpoints land on the
        // nominal center radius.
        const double rho_nodes = g.rho_tm / std::cos(std::numbers::pi / m);
        for (int j = 0; j <= m; ++j) {
            const double th = tau * (j - 0.5) / m;
            rod.state.node_positions[j] =
                Vec3(rho_nodes * s * std::cos(th), rho_nodes * s * std::sin(th), zc);
        }
        for (int j = 0; j < m; ++j) {
            const double th = tau * j / m;
            seed[j] = Vec3(std::cos(th), std::sin(th), 0.0);
            rod.arc_coord.push_back(zc / L);
        }
        frame_from_chords(rod.state, seed);
        rod.state.node_velocities.assign(m + 1, Vec3::Zero());
        rod.state.angular_velocities.assign(m, Vec3::Zero());
        rod.material = mats.at("TM");
        rod.elast = make_elasticity(rod.state, spec.density,
                                    group_modulus(RodGroup::TM, mats),
                                    spec.shear_correction);
        arm.rods.push_back(std::move(rod));
    }

    // OM helices: constant pitch angle from the axis, element length chosen
    // to keep the wrap per element fixed. Opposite hands on nested layers.
    const double psi = spec.winding_angle_deg * std::numbers::pi / 180.0;
    const double wrap_per_element = tau / spec.om_elements_per_turn;
    const double om_sag = std::cos(0.5 * wrap_per_element);
    for (int hand : {+1, -1}) {
        const double rho0 = (hand > 0 ? g.rho_om_inner : g.rho_om_outer) / om_sag;
        for (int q = 0; q < spec.n_om_per_hand; ++q) {
            ArmRod rod;
            rod.group = RodGroup::OM;
            rod.index_in_group = q;
            rod.handedness = hand;
            double z = 0.0, th = tau * q / spec.n_om_per_hand;
            std::vector<Vec3> pts;
            std::vector<double> zs;
            while (true) {
                const double s = spec.taper_scale(z);
                pts.push_back(Vec3(rho0 * s * std::cos(th),
                                   rho0 * s * std::sin(th), z));
                zs.push_back(z);
                if (z >= L) break;
                const double dz =
                    wrap_per_element * rho0 * s / std::tan(psi);
                th += hand * wrap_per_element;
                z = std::min(z + dz, L);
            }
            const int n = static_cast<int>(pts.size()) - 1;
            rod.state.node_positions = pts;
            rod.state.directors.resize(n);
            rod.state.reference_lengths.resize(n);
            rod.state.current_radii.resize(n);
            std::vector<Vec3> seed(n);
            for (int k = 0; k < n; ++k) {
                const double zm = 0.5 * (zs[k] + zs[k + 1]);
                rod.state.current_radii[k] = g.r_om * spec.taper_scale(zm);
                rod.arc_coord.push_back(zm / L);
                const Vec3 c = 0.5 * (pts[k] + pts[k + 1]);
                seed[k] = Vec3(c.x(), c.y(), 0.0).normalized();
            }
            frame_from_chords(rod.state, seed);
            rod.state.node_velocities.assign(n + 1, Vec3::Zero());
            rod.state.angular_velocities.assign(n, Vec3::Zero());
            rod.material = mats.at("OM");
            rod.elast = make_elasticity(rod.state, spec.density,
                                        group_modulus(RodGroup::OM, mats),
                                        spec.shear_correction);
            arm.rods.push_back(std::move(rod));
        }
    }

    for (auto& rod : arm.rods)
        rod.filtered_strain_rate.assign(rod.state.n_elements(), 0.0);

    // ---- Connections ----
    auto spring_k = [&](const ArmRod& a, const ArmRod& b, int ea, int eb) {
        if (spec.k_s_override > 0.0) return spec.k_s_override;
        const double e_mean =
            0.5 * (a.elast.youngs_modulus + b.elast.youngs_modulus);
        return spec.connection_stiffness_scale * e_mean *
               std::min(a.state.reference_lengths[ea],
                        b.state.reference_lengths[eb]);
    };
    auto bind = [&](int ra, int rb, int ea, int eb) {
        const ArmRod& a = arm.rods[ra];
        const ArmRod& b = arm.rods[rb];
        const Vec3 ca = a.state.element_center(ea);
        const Vec3 cb = b.state.element_center(eb);
        const Vec3 d = cb - ca;
        const double dist = d.norm();
        if (dist < 1e-12)
            throw GeometryError("build_arm: coincident connection centers");
        const Vec3 s1 = d / dist;
        Connection c;
        c.rod_a = ra;
        c.rod_b = rb;
        c.elem_a = ea;
        c.elem_b = eb;
        c.s_local_a = a.state.directors[ea] * s1;
        c.s_local_b = b.state.directors[eb] * (-s1);
        const double r1 = a.state.current_radii[ea];
        const double r2 = b.state.current_radii[eb];
        c.arm_a = dist * r1 / (r1 + r2);
        c.arm_b = dist * r2 / (r1 + r2);
        c.k_s = spring_k(a, b, ea, eb);
        arm.connections.push_back(c);
    };

    const int anc = 0;
    auto lm_rod = [&](int j) { return 1 + ((j % spec.n_lm) + spec.n_lm) % spec.n_lm; };
    for (int j = 0; j < spec.n_lm; ++j)
        for (int k = 0; k < spec.elements_per_rod; ++k) {
            bind(anc, lm_rod(j), k, k);            // ANC <-> LM
            bind(lm_rod(j), lm_rod(j + 1), k, k);  // LM <-> next LM
        }

    const int first_ring = 1 + spec.n_lm;
    for (int i = 0; i < spec.n_tm_rings; ++i) {
        const int ring = first_ring + i;
        const double zc = L * (i + 0.5) / spec.n_tm_rings;
        int k_lm = std::clamp(static_cast<int>(zc / L * spec.elements_per_rod), 0,
                              spec.elements_per_rod - 1);
        for (int j = 0; j < spec.n_lm; ++j)
            bind(ring, lm_rod(j), j * m / spec.n_lm, k_lm);
        // Ring closure: couple the last element back to the first.
        bind(ring, ring, m - 1, 0);
    }

    // An oblique helix crosses each ring plane exactly once; the connective
    // tissue anchors it there. One binding per (rod, ring) keeps the hoop
    // torque path intact at any discretization without tying the in-between
    // elements down (long oblique struts would rigidify bending).
    for (int ro = 0; ro < static_cast<int>(arm.rods.size()); ++ro) {
        if (arm.rods[ro].group != RodGroup::OM) continue;
        const ArmRod& o = arm.rods[ro];
        for (int i = 0; i < spec.n_tm_rings; ++i) {
            const int ring = first_ring + i;
            const double zc = L * (i + 0.5) / spec.n_tm_rings;
            int k_best = 0;
            double dz_best = std::numeric_limits<double>::max();
            for (int k = 0; k < o.state.n_elements(); ++k) {
                const double dz = std::abs(o.state.element_center(k).z() - zc);
                if (dz < dz_best) { dz_best = dz; k_best = k; }
            }
            const Vec3 c = o.state.element_center(k_best);
            const ArmRod& rring = arm.rods[ring];
            int e_best = 0;
            double d_best = std::numeric_limits<double>::max();
            for (int e = 0; e < rring.state.n_elements(); ++e) {
                const double d = (rring.state.element_center(e) - c).norm();
                if (d < d_best) { d_best = d; e_best = e; }
            }
            bind(ro, ring, k_best, e_best);
        }
    }

    // ---- Contact pairs: static neighbor lists with a 50% capture margin ----
    auto contact_k = [&](const ArmRod& a, const ArmRod& b, int ea, int eb) {
        if (spec.k_c_override > 0.0) return spec.k_c_override;
        const double e1 = a.elast.youngs_modulus, e2 = b.elast.youngs_modulus;
        const double e_star = e1 * e2 / (e1 + e2);
        const double r1 = a.state.current_radii[ea];
        const double r2 = b.state.current_radii[eb];
        // The bare Hertz point-contact stiffness of ~25 kPa tissue is far too
        // compliant against peak muscle stress (130 kPa); the scale keeps
        // penetration within the architecture-preserving regime.
        return spec.contact_stiffness_scale * e_star *
               std::sqrt(r1 * r2 / (r1 + r2));
    };
    const int n_rods = static_cast<int>(arm.rods.size());
    for (int ra = 0; ra < n_rods; ++ra)
        for (int rb = ra + 1; rb < n_rods; ++rb) {
            const ArmRod& a = arm.rods[ra];
            const ArmRod& b = arm.rods[rb];
            for (int ea = 0; ea < a.state.n_elements(); ++ea)
                for (int eb = 0; eb < b.state.n_elements(); ++eb) {
                    const Vec3 d = b.state.element_center(eb) -
                                   a.state.element_center(ea);
                    const double touch = a.state.current_radii[ea] +
                                         b.state.current_radii[eb];
                    const double dist = d.norm();
                    if (dist > 1.5 * touch) continue;
                    if (touch - dist > 1e-6 * touch)
                        throw GeometryError(
                            "build_arm: rest overlap between rods " +
                            std::to_string(ra) + ":" + std::to_string(ea) +
                            " and " + std::to_string(rb) + ":" +
                            std::to_string(eb) + " (dist " +
                            std::to_string(dist) + ", touch " +
                            std::to_string(touch) + ")");
                    ContactPair p;
                    p.rod_a = ra;
                    p.rod_b = rb;
                    p.elem_a = ea;
                    p.elem_b = eb;
                    p.k_c = contact_k(a, b, ea, eb);
                    p.rest_direction = dist > 1e-12 ? Vec3(d / dist) : Vec3::UnitX();
                    arm.contacts.push_back(p);
                }
        }

    // Base clamps on ANC and LM.
    arm.clamped_nodes.push_back({anc, 0});
    arm.clamp_positions.push_back(arm.rods[anc].state.node_positions[0]);
    for (int j = 0; j < spec.n_lm; ++j) {
        arm.clamped_nodes.push_back({lm_rod(j), 0});
        arm.clamp_positions.push_back(arm.rods[lm_rod(j)].state.node_positions[0]);
    }
    return arm;
}

CrossSectionAudit cross_section_audit(const ArmAssembly& arm) {
    const ArmSpec& spec = arm.spec;
    const BaseLayout g = layout(spec);
    const double R2 = spec.base_radius() * spec.base_radius();
    CrossSectionAudit a;
    a.anc = g.r_anc * g.r_anc / R2;
    a.lm = spec.n_lm * g.r_lm * g.r_lm / R2;
    // A base cut through a ring plane shows the full annulus swept by the ring.
    a.tm = ((g.rho_tm + g.r_tm) * (g.rho_tm + g.r_tm) -
            (g.rho_tm - g.r_tm) * (g.rho_tm - g.r_tm)) / R2;
    const double cpsi = std::cos(spec.winding_angle_deg * std::numbers::pi / 180.0);
    a.om = 2.0 * spec.n_om_per_hand * g.r_om * g.r_om / (R2 * cpsi);
    return a;
}

ConnectionLoads connection_loads(const Connection& c, const RodState& a,
                                 const RodState& b, double alpha_s) {
    const Vec3 sa = a.directors[c.elem_a].transpose() * c.s_local_a;
    const Vec3 sb = b.directors[c.elem_b].transpose() * c.s_local_b;
    const Vec3 xa = a.element_center(c.elem_a) + c.arm_a * sa;
    const Vec3 xb = b.element_center(c.elem_b) + c.arm_b * sb;
    ConnectionLoads out;
    out.force_a = alpha_s * c.k_s * (xb - xa);
    out.force_b = -out.force_a;
    out.couple_a = (c.arm_a * sa).cross(out.force_a);
    out.couple_b = (c.arm_b * sb).cross(out.force_b);
    return out;
}

Vec3 rod_contact_force(const ContactPair& p, const RodState& a,
                       const RodState& b, double alpha_c,
                       double* penetration_ratio) {
    const Vec3 d = b.element_center(p.elem_b) - a.element_center(p.elem_a);
    const double dist = d.norm();
    const double touch = a.current_radii[p.elem_a] + b.current_radii[p.elem_b];
    const double eps = touch - dist;
    if (penetration_ratio) *penetration_ratio = eps > 0.0 ? eps / touch : 0.0;
    if (eps <= 0.0) return Vec3::Zero();
    const Vec3 dir = dist > 1e-12 ? Vec3(d / dist) : p.rest_direction;
    return -alpha_c * p.k_c * eps * std::sqrt(eps) * dir;
}

double resultant_radial_stress(const std::vector<Vec3>& contact_forces,
                               double contact_area) {
    double sum_abs = 0.0;
    Vec3 sum = Vec3::Zero();
    for (const auto& f : contact_forces) {
        sum_abs += f.norm();
        sum += f;
    }
    const double cancelled = 0.5 * (sum_abs - sum.norm());
    return std::max(cancelled, 0.0) / contact_area;
}

double rod_activation(const ArmRod& rod, const ActivationSet& activations,
                      double s, double t) {
    double a = 0.0;
    for (const auto& tgt : activations) {
        if (tgt.group != rod.group) continue;
        if (tgt.index >= 0 && tgt.index != rod.index_in_group) continue;
        if (tgt.handedness != 0 && tgt.handedness != rod.handedness) continue;
        a += evaluate_activation(tgt.schedule, s, t);
    }
    return std::clamp(a, 0.0, 1.0);
}

AssemblyLoads gather_assembly_loads(const ArmAssembly& arm,
                                    const ActivationSet& activations,
                                    double t) {
    const int n_rods = static_cast<int>(arm.rods.size());
    AssemblyLoads out;
    out.external.reserve(n_rods);
    out.axial_override.resize(n_rods);
    for (const auto& r : arm.rods)
        out.external.emplace_back(r.state.n_elements());

    auto add_element_force = [&](int rod, int elem, const Vec3& f) {
        out.external[rod].node_forces[elem] += 0.5 * f;
        out.external[rod].node_forces[elem + 1] += 0.5 * f;
    };

    for (const auto& c : arm.connections) {
        const auto loads = connection_loads(c, arm.rods[c.rod_a].state,
                                            arm.rods[c.rod_b].state,
                                            arm.spec.alpha_s);
        add_element_force(c.rod_a, c.elem_a, loads.force_a);
        add_element_force(c.rod_b, c.elem_b, loads.force_b);
        out.external[c.rod_a].element_couples[c.elem_a] += loads.couple_a;
        out.external[c.rod_b].element_couples[c.elem_b] += loads.couple_b;
    }

    // Contact: forces plus the cancellation bookkeeping feeding the
    // intramuscular-pressure pathway on the longitudinal rods.
    struct PressureAcc { double sum_abs = 0.0; Vec3 sum = Vec3::Zero(); };
    std::vector<std::vector<PressureAcc>> pressure(n_rods);
    for (int r = 0; r < n_rods; ++r)
        if (arm.rods[r].group == RodGroup::ANC || arm.rods[r].group == RodGroup::LM)
            pressure[r].resize(arm.rods[r].state.n_elements());

    for (const auto& p : arm.contacts) {
        double ratio = 0.0;
        const Vec3 f_a = rod_contact_force(p, arm.rods[p.rod_a].state,
                                           arm.rods[p.rod_b].state,
                                           arm.spec.alpha_c, &ratio);
        out.max_penetration_ratio = std::max(out.max_penetration_ratio, ratio);
        if (f_a.isZero(0.0)) continue;
        add_element_force(p.rod_a, p.elem_a, f_a);
        add_element_force(p.rod_b, p.elem_b, -f_a);
        // Dashpot on the normal relative velocity; without it the light
        // transverse rings chatter against their neighbours indefinitely.
        if (arm.spec.contact_damping_ratio > 0.0) {
            const RodState& sa = arm.rods[p.rod_a].state;
            const RodState& sb = arm.rods[p.rod_b].state;
            const Vec3 d = sb.element_center(p.elem_b) - sa.element_center(p.elem_a);
            const double dist = d.norm();
            if (dist > 1e-12) {
                const Vec3 dir = d / dist;
                const double touch = sa.current_radii[p.elem_a] +
                                     sb.current_radii[p.elem_b];
                const double eps = touch - dist;
                const double k_t =
                    1.5 * arm.spec.alpha_c * p.k_c * std::sqrt(eps);
                auto em = [&](int r, int k) {
                    const auto& rod = arm.rods[r];
                    return rod.elast.density * rod.elast.area[k] *
                           rod.state.reference_lengths[k];
                };
                const double ma = em(p.rod_a, p.elem_a);
                const double mb = em(p.rod_b, p.elem_b);
                const double m_red = ma * mb / (ma + mb);
                const double v_n =
                    (sb.element_velocity(p.elem_b) -
                     sa.element_velocity(p.elem_a)).dot(dir);
                const Vec3 f_d = 2.0 * arm.spec.contact_damping_ratio *
                                 std::sqrt(k_t * m_red) * v_n * dir;
                add_element_force(p.rod_a, p.elem_a, f_d);
                add_element_force(p.rod_b, p.elem_b, -f_d);
            }
        }
        if (!pressure[p.rod_a].empty()) {
            pressure[p.rod_a][p.elem_a].sum_abs += f_a.norm();
            pressure[p.rod_a][p.elem_a].sum += f_a;
        }
        if (!pressure[p.rod_b].empty()) {
            pressure[p.rod_b][p.elem_b].sum_abs += f_a.norm();
            pressure[p.rod_b][p.elem_b].sum -= f_a;
        }
    }

    // Axial internal force per element: muscle law for LM/TM/OM, linear
    // elasticity for the ANC, minus the pressure-driven compression.
    for (int r = 0; r < n_rods; ++r) {
        const ArmRod& rod = arm.rods[r];
        const int n = rod.state.n_elements();
        out.axial_override[r].resize(n);
        const auto strain = compute_shear_strain(rod.state);
        std::vector<double> rate;
        if (static_cast<int>(rod.filtered_strain_rate.size()) == n)
            rate = rod.filtered_strain_rate;
        else
            rate = compute_axial_strain_rate(rod.state);
        for (int k = 0; k < n; ++k) {
            const double eps = strain[k].z() - rod.elast.intrinsic_shear[k].z();
            double n3;
            if (rod.group == RodGroup::ANC) {
                n3 = rod.elast.youngs_modulus * rod.elast.area[k] * eps;
            } else {
                const double a = rod_activation(rod, activations,
                                                rod.arc_coord[k], t);
                const double sa = active_stress(a, eps, rate[k], rod.material);
                const double sp = passive_stress(eps, rod.material);
                n3 = axial_internal_force(rod.elast.area[k], sa, sp);
            }
            if (!pressure[r].empty()) {
                const PressureAcc& acc = pressure[r][k];
                if (acc.sum_abs > 0.0) {
                    const double patch = 2.0 * rod.state.current_radii[k] *
                                         rod.state.reference_lengths[k];
                    const double cancelled =
                        std::max(0.5 * (acc.sum_abs - acc.sum.norm()), 0.0);
                    const double sigma_r = cancelled / patch;
                    n3 -= patch * sigma_r;  // compressive -> elongation
                }
            }
            out.axial_override[r][k] = n3;
        }
    }
    return out;
}

}  // namespace octarm
