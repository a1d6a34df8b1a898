#pragma once

#include <string>
#include <vector>

#include "octarm/assembly.hpp"
#include "octarm/environment.hpp"
#include "octarm/trajectory.hpp"

namespace octarm {

inline constexpr const char* kEngineVersion = "octarm 0.1.0";

struct OutputConfig {
    int trajectory_stride = 20;  // record every Nth step; 0 picks ~250 frames
    int knot_stride = 100;       // analysis sampling hint
};

// Everything one experiment needs, parsed from a versioned JSON file.
struct ScenarioConfig {
    int schema_version = 1;
    ArmSpec arm;
    DampingConfig damping{30.0, 0.5, 2};
    ActivationSet activations;
    Environment environment;
    double duration = 0.5;   // s
    double dt = 0.0;         // s; 0 = automatic from the stability bound
    double dt_safety = 0.7;  // fraction of the bound when automatic
    OutputConfig output;
    unsigned seed = 0;
    std::string source_text;  // canonical form, hashed into records

    void validate() const;
    std::uint64_t hash() const { return fnv1a_hash(source_text); }
};

// Parse/serialize. Errors carry the offending field (or line for syntax).
ScenarioConfig parse_scenario(const std::string& json_text,
                              const std::string& origin = "<memory>");
ScenarioConfig load_scenario(const std::string& path);
std::string scenario_to_json(const ScenarioConfig& config);

// Run one scenario to completion (or to the first non-finite state, in which
// case the record is partial and failure_frame is set).
TrajectoryRecord run(const ScenarioConfig& config);

struct SweepRow {
    double angle_deg = 0.0;
    double steady_twist = 0.0;  // |Tw| of the axial centerline ribbon
    bool ok = false;
    std::string message;
};
struct SweepTable {
    std::vector<SweepRow> rows;
    double argmax_angle = 0.0;
};
// One twist run per angle; per-row failures are recorded and the sweep
// continues. Rows may run concurrently.
SweepTable sweep_winding_angle(const ScenarioConfig& base,
                               const std::vector<double>& angles,
                               int threads = 1);

struct ValidationRow {
    std::string id;
    double measured = 0.0;
    double bound = 0.0;
    bool pass = false;
};
struct ValidationReport {
    std::string suite;
    std::vector<ValidationRow> rows;
    bool all_pass() const;
};
std::vector<std::string> validation_suite_names();
ValidationReport run_validation_suite(const std::string& suite, unsigned seed = 0);

struct KnotRow {
    double time = 0.0;
    double link = 0.0, writhe = 0.0, twist = 0.0, residual = 0.0;
};
// Knot quantities of the axial rod's centerline ribbon, one row per frame.
std::vector<KnotRow> analyze_knot(const TrajectoryRecord& record);

struct BendRow {
    double time = 0.0;
    double arc_position = 0.0;  // normalized arc length of max |kappa_1|
    double velocity = 0.0;      // finite-difference d(arc)/dt
};
// Bend point tracked over the distal 90% of the axial rod.
std::vector<BendRow> analyze_bend(const TrajectoryRecord& record);

}  // namespace octarm
