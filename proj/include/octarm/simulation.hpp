#pragma once

#include <functional>

#include "octarm/assembly.hpp"

namespace octarm {

// Hook for environment loads (obstacles, drag); called with the midpoint
// configuration. May update the penetration maximum.
using ExtraLoadFn =
    std::function<void(const ArmAssembly&, std::vector<ExternalLoads>&,
                       double t, double* max_penetration)>;

struct ArmStepStats {
    double max_penetration_ratio = 0.0;
};

// Tightest stable timestep over all rods in the assembly.
double assembly_stable_dt(const ArmAssembly& arm, double safety = 0.3);

// One position-Verlet step of the whole assembly with coupling loads
// evaluated at the midpoint, followed by damping and clamp enforcement.
ArmStepStats step_arm(ArmAssembly& arm, const ActivationSet& activations,
                      double t, double dt, const DampingConfig& damping,
                      long step_index, const ExtraLoadFn& extra = {});

}  // namespace octarm
