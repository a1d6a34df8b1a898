#include "doctest.h"

#include <cmath>
#include <numbers>
#include <set>

#include "octarm/assembly.hpp"
#include "octarm/simulation.hpp"

using namespace octarm;

namespace {

ArmSpec reduced_spec() {
    // Small enough to step in a unit test, same architecture otherwise.
    ArmSpec s;
    s.n_tm_rings = 20;
    s.elements_per_rod = 12;
    s.tm_ring_segments = 16;
    s.tapered = false;
    return s;
}

ActivationSchedule ramp(double amplitude, double duration = 0.15) {
    ActivationSchedule r;
    r.kind = ActivationKind::Ramp;
    r.onset = 0.0;
    r.ramp_duration = duration;
    r.amplitude = amplitude;
    return r;
}

DampingConfig quasi_static_damping() { return DampingConfig{30.0, 0.5, 2}; }

// Run a schedule for `duration` and return the peak penetration ratio.
double run_arm(ArmAssembly& arm, const ActivationSet& act, double duration) {
    const double dt = 0.7 * assembly_stable_dt(arm);
    const long steps = static_cast<long>(duration / dt);
    const auto damping = quasi_static_damping();
    double max_pen = 0.0;
    for (long s = 0; s < steps; ++s) {
        const auto stats = step_arm(arm, act, s * dt, dt, damping, s + 1);
        max_pen = std::max(max_pen, stats.max_penetration_ratio);
    }
    return max_pen;
}

// Net rotation of the axial rod's tip cross-section about its own axis.
double tip_rotation(const ArmAssembly& arm) {
    const auto& state = arm.rods[0].state;
    const Mat3& q = state.directors.back();
    // Rest directors are axis-aligned, so the angle of d1 in the lab x-y
    // plane measures the accumulated twist at the tip.
    const Vec3 d1 = q.row(0).transpose();
    return std::atan2(d1.y(), d1.x());
}

}  // namespace

TEST_CASE("build: default census is 1 ANC + 8 LM + 180 TM + 8 OM") {
    const auto arm = build_arm(ArmSpec{});
    CHECK(arm.rods.size() == 197);
    CHECK(arm.count(RodGroup::ANC) == 1);
    CHECK(arm.count(RodGroup::LM) == 8);
    CHECK(arm.count(RodGroup::TM) == 180);
    CHECK(arm.count(RodGroup::OM) == 8);
    CHECK(arm.clamped_nodes.size() == 9);  // ANC + LM bases
    CHECK(!arm.connections.empty());
    CHECK(!arm.contacts.empty());
}

TEST_CASE("build: rod_of reverses group bookkeeping") {
    const auto arm = build_arm(reduced_spec());
    for (size_t r = 0; r < arm.rods.size(); ++r) {
        const auto& rod = arm.rods[r];
        CHECK(arm.rod_of(rod.group, rod.index_in_group, rod.handedness) ==
              static_cast<int>(r));
    }
}

TEST_CASE("build: only TM rods are rings") {
    const auto arm = build_arm(reduced_spec());
    for (const auto& rod : arm.rods)
        CHECK(rod.is_ring == (rod.group == RodGroup::TM));
}

TEST_CASE("build: base cross-section audit matches the area budget") {
    const auto audit = cross_section_audit(build_arm(ArmSpec{}));
    CHECK(audit.anc == doctest::Approx(0.10).epsilon(1e-6));
    CHECK(audit.lm == doctest::Approx(0.50).epsilon(1e-6));
    CHECK(audit.om == doctest::Approx(0.20).epsilon(1e-6));
    // The rings trade a little area for clearance; keep them within three
    // points of the budget.
    CHECK(std::abs(audit.tm - 0.20) < 0.03);
}

TEST_CASE("build: oblique rods run within a degree of the winding angle") {
    const auto arm = build_arm(ArmSpec{});
    for (const auto& rod : arm.rods) {
        if (rod.group != RodGroup::OM) continue;
        // The last element straddles the tip, where the helix radius shrinks
        // fast enough within one element that the chord no longer tracks the
        // continuous pitch.
        for (size_t k = 0; k + 2 < rod.state.node_positions.size(); ++k) {
            const Vec3 chord =
                rod.state.node_positions[k + 1] - rod.state.node_positions[k];
            const double pitch =
                std::acos(std::abs(chord.normalized().z())) * 180.0 / std::numbers::pi;
            CHECK(std::abs(pitch - arm.spec.winding_angle_deg) < 1.0);
        }
    }
}

TEST_CASE("build: tapered radii shrink to the tip fraction") {
    ArmSpec spec;  // tapered by default
    const auto arm = build_arm(spec);
    const auto& anc = arm.rods[0].state;
    // Element radii are sampled at element centers, half an element away
    // from the exact base and tip values.
    const double ratio = anc.current_radii.back() / anc.current_radii.front();
    CHECK(ratio > 0.5 * spec.tip_radius_fraction);
    CHECK(ratio < 3.0 * spec.tip_radius_fraction);
    for (size_t k = 1; k < anc.current_radii.size(); ++k)
        CHECK(anc.current_radii[k] < anc.current_radii[k - 1]);
}

TEST_CASE("build: no contact pair overlaps at rest") {
    const auto arm = build_arm(ArmSpec{});
    for (const auto& p : arm.contacts) {
        const auto& a = arm.rods[p.rod_a].state;
        const auto& b = arm.rods[p.rod_b].state;
        const double dist =
            (b.element_center(p.elem_b) - a.element_center(p.elem_a)).norm();
        const double touch = a.current_radii[p.elem_a] + b.current_radii[p.elem_b];
        CHECK(dist >= touch * (1.0 - 1e-12));
        CHECK(p.k_c > 0.0);
    }
    for (const auto& c : arm.connections) CHECK(c.k_s > 0.0);
}

TEST_CASE("connection loads: coincident surface points carry no force") {
    const auto arm = build_arm(reduced_spec());
    for (const auto& c : arm.connections) {
        const auto loads = connection_loads(c, arm.rods[c.rod_a].state,
                                            arm.rods[c.rod_b].state, 1.0);
        CHECK(loads.force_a.norm() < 1e-9);
    }
}

TEST_CASE("connection loads: lateral offset gives k_s * d and a Newton pair") {
    auto a = make_straight_rod(Vec3::Zero(), Vec3::UnitZ(), 0.1, 4, 0.01);
    auto b = make_straight_rod(Vec3(0.02, 0.0, 0.0), Vec3::UnitZ(), 0.1, 4, 0.01);
    Connection c;
    c.elem_a = 1;
    c.elem_b = 1;
    c.k_s = 250.0;
    c.arm_a = 0.01;
    c.arm_b = 0.01;
    c.s_local_a = Vec3::UnitX();   // surface points touch at rest
    c.s_local_b = -Vec3::UnitX();
    const double d = 3e-3;
    for (auto& p : b.node_positions) p += Vec3(0.0, d, 0.0);

    const auto loads = connection_loads(c, a, b, 1.0);
    CHECK(loads.force_a.norm() == doctest::Approx(c.k_s * d));
    CHECK(loads.force_a.y() == doctest::Approx(c.k_s * d));
    CHECK((loads.force_a + loads.force_b).norm() == 0.0);
    // C = h s x F on each side.
    const Vec3 expect_a = (c.arm_a * Vec3::UnitX()).cross(loads.force_a);
    CHECK((loads.couple_a - expect_a).norm() < 1e-12);
}

TEST_CASE("connection loads: rigid rotation of the pair rotates the loads") {
    auto a = make_straight_rod(Vec3::Zero(), Vec3::UnitZ(), 0.1, 4, 0.01);
    auto b = make_straight_rod(Vec3(0.02, 0.0, 0.0), Vec3::UnitZ(), 0.1, 4, 0.01);
    Connection c;
    c.elem_a = 2;
    c.elem_b = 2;
    c.k_s = 100.0;
    c.arm_a = 0.01;
    c.arm_b = 0.01;
    c.s_local_a = Vec3::UnitX();
    c.s_local_b = -Vec3::UnitX();
    for (auto& p : b.node_positions) p += Vec3(1e-3, 2e-3, 0.0);
    const auto before = connection_loads(c, a, b, 1.0);

    const Mat3 rot = rotation_exp(Vec3(0.3, -0.8, 0.5));
    for (auto* s : {&a, &b}) {
        for (auto& p : s->node_positions) p = rot * p;
        for (auto& q : s->directors) q = q * rot.transpose();
    }
    const auto after = connection_loads(c, a, b, 1.0);
    CHECK((after.force_a - rot * before.force_a).norm() < 1e-12);
    CHECK((after.couple_a - rot * before.couple_a).norm() < 1e-12);
}

TEST_CASE("contact force: separated rods feel nothing") {
    auto a = make_straight_rod(Vec3::Zero(), Vec3::UnitZ(), 0.1, 4, 0.01);
    auto b = make_straight_rod(Vec3(0.05, 0.0, 0.0), Vec3::UnitZ(), 0.1, 4, 0.01);
    ContactPair p;
    p.elem_a = 1;
    p.elem_b = 1;
    p.k_c = 1e6;
    double ratio = -1.0;
    CHECK(rod_contact_force(p, a, b, 1.0, &ratio).norm() == 0.0);
    CHECK(ratio == 0.0);
}

TEST_CASE("contact force: known overlap matches the three-halves law") {
    const double eps = 1e-4;
    auto a = make_straight_rod(Vec3::Zero(), Vec3::UnitZ(), 0.1, 4, 0.01);
    auto b = make_straight_rod(Vec3(0.02 - eps, 0.0, 0.0), Vec3::UnitZ(), 0.1, 4,
                               0.01);
    ContactPair p;
    p.elem_a = 2;
    p.elem_b = 2;
    p.k_c = 1e6;
    double ratio = 0.0;
    const Vec3 f = rod_contact_force(p, a, b, 1.0, &ratio);
    CHECK(f.norm() == doctest::Approx(1.0));  // 1e6 * (1e-4)^1.5
    CHECK(f.x() == doctest::Approx(-1.0));    // pushes a away from b
    CHECK(ratio == doctest::Approx(eps / 0.02));
}

TEST_CASE("radial stress: opposing pair squeezes, lone force does not") {
    const double area = 2e-4;
    const Vec3 f(0.0, 3.0, 0.0);
    CHECK(resultant_radial_stress({}, area) == 0.0);
    CHECK(resultant_radial_stress({f}, area) == doctest::Approx(0.0));
    CHECK(resultant_radial_stress({f, -f}, area) ==
          doctest::Approx(f.norm() / area));
    // Orthogonal pair: only the cancelled component counts.
    const Vec3 g(3.0, 0.0, 0.0);
    const double expect = 0.5 * (6.0 - std::sqrt(18.0)) / area;
    CHECK(resultant_radial_stress({f, -g}, area) == doctest::Approx(expect));
}

TEST_CASE("rod activation: group, index, and handedness filters compose") {
    const auto arm = build_arm(reduced_spec());
    ActivationSet act;
    act.push_back({RodGroup::LM, 2, 0, ramp(0.4)});
    act.push_back({RodGroup::OM, -1, +1, ramp(0.3)});
    const double t = 1.0;  // past the ramp
    for (const auto& rod : arm.rods) {
        const double a = rod_activation(rod, act, 0.5, t);
        if (rod.group == RodGroup::LM && rod.index_in_group == 2)
            CHECK(a == doctest::Approx(0.4));
        else if (rod.group == RodGroup::OM && rod.handedness == +1)
            CHECK(a == doctest::Approx(0.3));
        else
            CHECK(a == 0.0);
    }
}

TEST_CASE("rod activation: stacked targets clamp at one") {
    const auto arm = build_arm(reduced_spec());
    ActivationSet act;
    act.push_back({RodGroup::LM, -1, 0, ramp(0.8)});
    act.push_back({RodGroup::LM, 0, 0, ramp(0.7)});
    const auto& lm0 = arm.rods[arm.rod_of(RodGroup::LM, 0)];
    CHECK(rod_activation(lm0, act, 0.5, 1.0) == 1.0);
}

TEST_CASE("assembly loads: rest configuration is load free") {
    const auto arm = build_arm(ArmSpec{});
    const auto loads = gather_assembly_loads(arm, {}, 0.0);
    CHECK(loads.max_penetration_ratio < 1e-12);
    for (size_t r = 0; r < arm.rods.size(); ++r) {
        for (const auto& f : loads.external[r].node_forces)
            CHECK(f.norm() < 1e-10);
        for (const auto& n3 : loads.axial_override[r])
            CHECK(std::abs(n3) < 1e-8);
    }
}

TEST_CASE("assembly loads: couplings conserve linear momentum") {
    auto arm = build_arm(reduced_spec());
    // Shake the geometry so connections and contacts all carry load.
    unsigned state = 12345;
    auto jitter = [&]() {
        state = state * 1664525u + 1013904223u;
        return (static_cast<double>(state) / 4294967296.0 - 0.5) * 4e-4;
    };
    for (auto& rod : arm.rods)
        for (auto& p : rod.state.node_positions)
            p += Vec3(jitter(), jitter(), jitter());

    const auto loads = gather_assembly_loads(arm, {}, 0.0);
    Vec3 total = Vec3::Zero();
    double scale = 0.0;
    for (const auto& ext : loads.external)
        for (const auto& f : ext.node_forces) {
            total += f;
            scale += f.norm();
        }
    CHECK(scale > 0.0);
    CHECK(total.norm() < 1e-9 * scale);
}

TEST_CASE("timestep: coupling stiffness tightens the assembly bound") {
    const auto arm = build_arm(reduced_spec());
    const double dt = assembly_stable_dt(arm);
    CHECK(dt > 0.0);
    double rod_only = 1e9;
    for (const auto& rod : arm.rods)
        rod_only = std::min(rod_only, stable_dt_full(rod.state, rod.elast));
    CHECK(dt <= rod_only);
}

TEST_CASE("motion: transverse activation lengthens the arm" *
          doctest::timeout(120)) {
    auto arm = build_arm(reduced_spec());
    const double rest_length = arm.arm_length();
    ActivationSet act;
    act.push_back({RodGroup::TM, -1, 0, ramp(0.3)});
    const double pen = run_arm(arm, act, 0.4);
    CHECK(arm.arm_length() > rest_length * 1.003);
    CHECK(pen <= 0.15);
}

TEST_CASE("motion: symmetric longitudinal activation shortens the arm" *
          doctest::timeout(120)) {
    auto arm = build_arm(reduced_spec());
    const double rest_length = arm.arm_length();
    ActivationSet act;
    act.push_back({RodGroup::LM, -1, 0, ramp(0.15)});
    const double pen = run_arm(arm, act, 0.4);
    CHECK(arm.arm_length() < rest_length * 0.9);
    CHECK(pen <= 0.15);
}

TEST_CASE("motion: single longitudinal muscle bends in its own plane" *
          doctest::timeout(120)) {
    auto arm = build_arm(reduced_spec());
    // LM 0 sits on the +x ray of the base cross-section.
    ActivationSet act;
    act.push_back({RodGroup::LM, 0, 0, ramp(0.25)});
    const double pen = run_arm(arm, act, 0.4);
    const Vec3 tip = arm.tip_position();
    CHECK(tip.x() > 0.005);
    CHECK(std::abs(tip.y()) < 0.05 * tip.x());
    CHECK(pen <= 0.15);
}

TEST_CASE("motion: the two oblique hands twist in opposite directions" *
          doctest::timeout(240)) {
    double angle[2] = {0.0, 0.0};
    double pen[2] = {0.0, 0.0};
    for (int h = 0; h < 2; ++h) {
        auto arm = build_arm(reduced_spec());
        ActivationSet act;
        act.push_back({RodGroup::OM, -1, h == 0 ? +1 : -1, ramp(0.3)});
        pen[h] = run_arm(arm, act, 0.4);
        angle[h] = tip_rotation(arm);
    }
    CHECK(angle[0] * angle[1] < 0.0);
    CHECK(std::abs(angle[0]) > 1e-3);
    CHECK(std::abs(angle[1]) > 1e-3);
    CHECK(pen[0] <= 0.15);
    CHECK(pen[1] <= 0.15);
}

TEST_CASE("motion: clamped base stays put") {
    auto arm = build_arm(reduced_spec());
    ActivationSet act;
    act.push_back({RodGroup::LM, -1, 0, ramp(0.2, 0.05)});
    run_arm(arm, act, 0.05);
    for (size_t i = 0; i < arm.clamped_nodes.size(); ++i) {
        const auto [r, n] = arm.clamped_nodes[i];
        CHECK((arm.rods[r].state.node_positions[n] - arm.clamp_positions[i])
                  .norm() < 1e-12);
    }
}

TEST_CASE("spec validation rejects nonsense") {
    ArmSpec bad = reduced_spec();
    bad.frac_lm = 0.95;  // fractions exceed one
    CHECK_THROWS(bad.validate());
    bad = reduced_spec();
    bad.tm_ring_segments = 12;  // not a multiple of n_lm
    CHECK_THROWS(bad.validate());
    bad = reduced_spec();
    bad.total_length = -1.0;
    CHECK_THROWS(bad.validate());
}
