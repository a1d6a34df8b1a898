#pragma once

#include <array>
#include <map>
#include <string>

#include "octarm/types.hpp"

namespace octarm {

// Active/passive axial constitutive law for one muscle group.
struct MuscleMaterial {
    std::string group;
    double sigma_max = 130e3;             // Pa
    std::array<double, 9> active_coeffs{};  // a0..a8, polynomial in (eps+1)
    std::array<double, 9> passive_coeffs{}; // b0..b8
    double compression_modulus = 25e3;    // E_c, Pa
    double min_strain_rate = -1.8;        // 1/s, negative by convention
    // Offset subtracted so the tension branch meets sigma_p(0)=0; recorded at
    // load time when the fitted b_i do not pass through zero.
    double passive_offset = 0.0;

    void validate() const;
};

enum class ActivationKind { Ramp, TravelingWave, SigmoidWavefront };

// f_a(s, t) in [0,1] over a normalized arc-length interval.
struct ActivationSchedule {
    ActivationKind kind = ActivationKind::Ramp;
    double s_start = 0.0;  // normalized arc length in [0,1]
    double s_end = 1.0;
    double onset = 0.0;          // s
    double ramp_duration = 0.1;  // s
    double wave_speed = 1.0;     // normalized arc length / s
    double wave_width = 0.1;     // normalized arc length
    double sigmoid_steepness = 30.0; // 1 / normalized arc length
    double amplitude = 1.0;      // [0,1]

    void validate() const;
};

// Force-length factor, Sum a_i (eps+1)^i, clamped at zero below.
double force_length(double eps, const MuscleMaterial& m);

// Force-velocity factor, piecewise in eps_dot* = eps_dot / eps_dot_min.
double force_velocity(double eps_dot, const MuscleMaterial& m);

// Passive stress: polynomial branch in tension, linear E_c * eps in compression.
double passive_stress(double eps, const MuscleMaterial& m);

// sigma_a = f_a sigma_max f_l f_v
double active_stress(double activation, double eps, double eps_dot,
                     const MuscleMaterial& m);

// n3 = A (sigma_a + sigma_p)
double axial_internal_force(double area, double sigma_a, double sigma_p);

// Evaluate a template at normalized arc length s and time t.
double evaluate_activation(const ActivationSchedule& sched, double s, double t);

// Plain-text coefficient table, one row per muscle group:
//   group sigma_max a0..a8 b0..b8 E_c
// First non-comment line must declare "schema octarm-muscle-v1".
std::map<std::string, MuscleMaterial> load_muscle_materials(const std::string& path);

// Built-in fallback set (smooth unit-shaped curves, not fitted data).
std::map<std::string, MuscleMaterial> fallback_muscle_materials();

}  // namespace octarm
